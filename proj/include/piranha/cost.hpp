#pragma once

#include <vector>

#include "piranha/net.hpp"

namespace piranha {

/// Discount, truncation horizon and sequence length for the training cost.
struct Hyperparams {
    double gamma = 0.5;  // discount in [0,1); training additionally needs gamma > 0
    int K = 1;           // truncation horizon, >= 1
    int T = 1;           // number of transitions, >= 1

    void validate() const {
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw ShapeError("discount gamma must lie in [0,1)");
        if (K < 1) throw ShapeError("truncation horizon K must be >= 1");
        if (T < 1) throw ShapeError("sequence length T must be >= 1");
    }
};

/// Total discounted cost plus its per-horizon decomposition (k = 0..K).
struct CostBreakdown {
    double total = 0.0;
    std::vector<double> per_horizon;
};

/// Sum over transition indices of the squared readout error ||H u_t - x_t||^2.
double immediate_cost(const StateSeq& U, const Series& x);

/**
 * Truncated discounted multi-step cost: for every anchor t the state u_t is
 * advanced once with teacher input x_t and then run closed-loop, and each
 * horizon-k prediction is scored against x_{t+k} with weight gamma^k.
 * Accumulation is t-major, k-inner, so results are bit-reproducible.
 */
CostBreakdown discounted_cost(const Weights& w, const StateSeq& U, const Series& x,
                              const Hyperparams& hp, const SquashFn& sq = tanh_squash());

/**
 * The objective a policy-improvement step descends: c(U) plus the discounted
 * errors of chains whose first step uses the candidate weights and whose
 * remaining steps use the evaluation weights. With w_cand == w_eval this
 * equals discounted_cost(w, U, x, hp).total exactly.
 */
double improvement_objective(const Weights& w_cand, const Weights& w_eval, const StateSeq& U,
                             const Series& x, const Hyperparams& hp,
                             const SquashFn& sq = tanh_squash());

} // namespace piranha
