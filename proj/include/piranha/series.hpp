#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "piranha/errors.hpp"

namespace piranha {

enum class PadMode { none, hold };

/**
 * A multichannel time series in the squashing range [-1,1], together with
 * the per-channel affine map (scale, offset) that took the raw data there.
 * denormalize() recovers raw values: raw = scale * stored + offset.
 */
struct Series {
    std::vector<Eigen::VectorXd> values;
    Eigen::VectorXd scale;   // per channel, half-range of the raw data (1 if degenerate)
    Eigen::VectorXd offset;  // per channel, midpoint of the raw data
    PadMode pad = PadMode::none;

    int channels() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
    long size() const { return static_cast<long>(values.size()); }

    /// Value at time t; with pad == hold, indices past the end repeat the last sample.
    const Eigen::VectorXd& at(long t) const {
        if (t < 0) throw RangeError("series index " + std::to_string(t) + " is negative");
        if (t < size()) return values[static_cast<std::size_t>(t)];
        if (pad == PadMode::hold && !values.empty()) return values.back();
        throw RangeError("series too short: index " + std::to_string(t) +
                         " requested, length " + std::to_string(size()));
    }

    /// True if indices 0..last are available (directly or via hold padding).
    bool covers(long last) const {
        return last < size() || (pad == PadMode::hold && !values.empty());
    }

    Eigen::VectorXd denormalize(const Eigen::VectorXd& v) const {
        return (v.array() * scale.array() + offset.array()).matrix();
    }

    /// Wrap raw rows, fitting the per-channel affine map onto [-1,1].
    static Series normalize(std::vector<Eigen::VectorXd> raw, PadMode pad = PadMode::none);

    /// Wrap rows that are already range-safe; identity scale/offset.
    static Series preNormalized(std::vector<Eigen::VectorXd> rows, PadMode pad = PadMode::none);
};

struct SineSpec {
    double freq = 0.02;   // cycles per step
    double phase = 0.0;
    double amp = 1.0;
};

enum class SeriesKind { sine, sum_of_sines, square };

/**
 * Deterministic benchmark generators; output is already range-safe so the
 * stored scale/offset are the identity. `seed` is accepted for interface
 * stability but the waveforms are pure functions of their parameters.
 */
Series gen_series(SeriesKind kind, const std::vector<SineSpec>& components,
                  long length, int m, std::uint64_t seed);

inline Series gen_sine(double freq, double phase, long length, int m, std::uint64_t seed = 0) {
    return gen_series(SeriesKind::sine, {SineSpec{freq, phase, 1.0}}, length, m, seed);
}

} // namespace piranha
