#include "piranha/cost.hpp"

#include <cmath>
#include <string>

namespace piranha {

namespace {

void check_lengths(const StateSeq& U, const Series& x, const Hyperparams& hp) {
    hp.validate();
    if (static_cast<int>(U.size()) != hp.T + 1)
        throw ShapeError("state sequence length " + std::to_string(U.size()) +
                         " does not match T+1 = " + std::to_string(hp.T + 1));
    if (!x.covers(hp.T - 1 + hp.K))
        throw RangeError("series must cover indices 0.." + std::to_string(hp.T - 1 + hp.K) +
                         " (length T+K); got length " + std::to_string(x.size()));
}

} // namespace

double immediate_cost(const StateSeq& U, const Series& x) {
    if (U.empty()) throw ShapeError("empty state sequence");
    const long T = static_cast<long>(U.size()) - 1;
    if (T >= 1 && !x.covers(T - 1))
        throw RangeError("series too short for immediate cost over " + std::to_string(T) +
                         " transitions");
    const int m = x.channels();
    double c = 0.0;
    for (long t = 0; t < T; ++t)
        c += (U[static_cast<std::size_t>(t)].head(m) - x.at(t)).squaredNorm();
    return c;
}

CostBreakdown discounted_cost(const Weights& w, const StateSeq& U, const Series& x,
                              const Hyperparams& hp, const SquashFn& sq) {
    // Same chains and summation order as improvement_objective with
    // w_cand == w_eval, so the two agree bitwise.
    check_lengths(U, x, hp);
    const int m = x.channels();
    CostBreakdown out;
    out.per_horizon.assign(static_cast<std::size_t>(hp.K) + 1, 0.0);
    for (long t = 0; t < hp.T; ++t) {
        const HiddenState& ut = U[static_cast<std::size_t>(t)];
        double e0 = (ut.head(m) - x.at(t)).squaredNorm();
        out.per_horizon[0] += e0;
        out.total += e0;
        double wt = 1.0;
        HiddenState z;
        for (int k = 1; k <= hp.K; ++k) {
            wt *= hp.gamma;
            if (wt == 0.0) break;
            z = (k == 1) ? step(w, ut, x.at(t), sq) : closed_step(w, z, sq);
            double ek = wt * (z.head(m) - x.at(t + k)).squaredNorm();
            out.per_horizon[static_cast<std::size_t>(k)] += ek;
            out.total += ek;
        }
    }
    if (!std::isfinite(out.total)) throw NumericError("non-finite discounted cost");
    return out;
}

double improvement_objective(const Weights& w_cand, const Weights& w_eval, const StateSeq& U,
                             const Series& x, const Hyperparams& hp, const SquashFn& sq) {
    check_lengths(U, x, hp);
    if (w_cand.n() != w_eval.n() || w_cand.m() != w_eval.m())
        throw ShapeError("candidate and evaluation weights differ in shape");
    const int m = x.channels();
    double J = 0.0;
    for (long t = 0; t < hp.T; ++t) {
        const HiddenState& ut = U[static_cast<std::size_t>(t)];
        J += (ut.head(m) - x.at(t)).squaredNorm();
        double wt = 1.0;
        HiddenState z;
        for (int k = 1; k <= hp.K; ++k) {
            wt *= hp.gamma;
            if (wt == 0.0) break;
            z = (k == 1) ? step(w_cand, ut, x.at(t), sq) : closed_step(w_eval, z, sq);
            J += wt * (z.head(m) - x.at(t + k)).squaredNorm();
        }
    }
    if (!std::isfinite(J)) throw NumericError("non-finite improvement objective");
    return J;
}

} // namespace piranha
