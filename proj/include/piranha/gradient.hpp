#pragma once

#include "piranha/cost.hpp"
#include "piranha/net.hpp"

namespace piranha {

/// Gradient of the improvement objective with respect to the weight pair.
struct Gradient {
    Eigen::MatrixXd dF;
    Eigen::MatrixXd dG;

    /// Euclidean norm over all n(n+m+1) entries (weights viewed as one vector).
    double norm() const { return std::sqrt(dF.squaredNorm() + dG.squaredNorm()); }

    static Gradient zero(const Shape& s) {
        return Gradient{Eigen::MatrixXd::Zero(s.n, s.n), Eigen::MatrixXd::Zero(s.n, s.m + 1)};
    }
};

/// Horizon selection result: smallest K whose tail bound C1 * gamma^(K/2)
/// drops below the requested gradient accuracy eps0.
struct TruncationReport {
    int K = 1;
    double bound = 0.0;  // C1 * gamma^(K/2)
    double C0 = 0.0;     // 2 T sqrt(gamma) / (1 - sqrt(gamma))
    double C1 = 0.0;     // sqrt(n (n+m+1)) * C0
};

/**
 * Exact gradient of improvement_objective(w_cand, w_eval, U, x, hp) with
 * respect to w_cand, evaluated at w_cand = w_eval = w. Computed by
 * reverse-mode accumulation through each K-step chain; the immediate-cost
 * term contributes nothing since it does not involve the candidate weights.
 */
Gradient grad(const Weights& w, const StateSeq& U, const Series& x, const Hyperparams& hp,
              const SquashFn& sq = tanh_squash());

/// Central-difference oracle for grad, step h per component.
Gradient fd_grad(const Weights& w, const StateSeq& U, const Series& x, const Hyperparams& hp,
                 double h, const SquashFn& sq = tanh_squash());

/// Smallest admissible truncation horizon for a target gradient accuracy.
TruncationReport truncation_horizon(double eps0, const Hyperparams& hp, const Shape& shape);

} // namespace piranha
