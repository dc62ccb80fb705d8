#include "piranha/series.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace piranha {

Series Series::normalize(std::vector<Eigen::VectorXd> raw, PadMode pad) {
    if (raw.empty()) throw DataError("cannot normalize an empty series");
    const int m = static_cast<int>(raw.front().size());
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    for (const auto& row : raw) {
        if (row.size() != m) throw DataError("ragged series rows");
        lo = lo.cwiseMin(row);
        hi = hi.cwiseMax(row);
    }
    Series s;
    s.offset = 0.5 * (hi + lo);
    s.scale = 0.5 * (hi - lo);
    for (int c = 0; c < m; ++c)
        if (s.scale[c] == 0.0) s.scale[c] = 1.0;  // constant channel maps to 0 with unit scale
    for (auto& row : raw)
        row = ((row - s.offset).array() / s.scale.array()).matrix();
    s.values = std::move(raw);
    s.pad = pad;
    return s;
}

Series Series::preNormalized(std::vector<Eigen::VectorXd> rows, PadMode pad) {
    if (rows.empty()) throw DataError("cannot wrap an empty series");
    const int m = static_cast<int>(rows.front().size());
    Series s;
    s.values = std::move(rows);
    s.scale = Eigen::VectorXd::Ones(m);
    s.offset = Eigen::VectorXd::Zero(m);
    s.pad = pad;
    return s;
}

Series gen_series(SeriesKind kind, const std::vector<SineSpec>& components,
                  long length, int m, std::uint64_t /*seed*/) {
    if (length < 2) throw DataError("generated series needs at least 2 samples");
    if (m < 1) throw DataError("channel count must be >= 1");
    if (components.empty()) throw DataError("generator needs at least one component");
    if (kind == SeriesKind::sine && std::abs(components[0].amp) > 1.0)
        throw DataError("sine amplitude must stay within [-1,1]");

    const double two_pi = 2.0 * std::numbers::pi;
    // Channels get a deterministic phase stagger so multichannel data is not degenerate.
    auto channel_phase = [&](int c) { return two_pi * static_cast<double>(c) / (2.0 * m); };

    double amp_total = 0.0;
    for (const auto& sp : components) amp_total += std::abs(sp.amp);
    if (amp_total == 0.0) amp_total = 1.0;

    std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(length));
    for (long t = 0; t < length; ++t) {
        Eigen::VectorXd row(m);
        for (int c = 0; c < m; ++c) {
            double v = 0.0;
            switch (kind) {
                case SeriesKind::sine:
                    v = components[0].amp *
                        std::sin(two_pi * components[0].freq * t + components[0].phase + channel_phase(c));
                    break;
                case SeriesKind::sum_of_sines:
                    for (const auto& sp : components)
                        v += sp.amp * std::sin(two_pi * sp.freq * t + sp.phase + channel_phase(c));
                    v /= amp_total;  // keep the sum range-safe
                    break;
                case SeriesKind::square: {
                    double s = std::sin(two_pi * components[0].freq * t + components[0].phase + channel_phase(c));
                    v = (s > 0.0) - (s < 0.0);
                    break;
                }
            }
            row[c] = v;
        }
        rows[static_cast<std::size_t>(t)] = std::move(row);
    }
    return Series::preNormalized(std::move(rows));
}

} // namespace piranha
