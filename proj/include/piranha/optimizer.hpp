#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "piranha/cost.hpp"
#include "piranha/gradient.hpp"
#include "piranha/net.hpp"

namespace piranha {

struct FixedStep {
    double alpha = 0.1;
};

struct Backtracking {
    double alpha_init = 1.0;
    double rho = 0.5;       // shrink factor per halving, in (0,1)
    int max_halvings = 40;
};

struct TrainConfig {
    Hyperparams hp;
    int max_iter = 100;
    bool use_backtracking = true;
    FixedStep fixed;
    Backtracking backtrack;
    bool clip_enabled = true;
    int smooth_steps = 0;  // 0: re-roll U every iteration; j>0: U := S^j U instead
    std::uint64_t seed = 1;
    double stop_tol = 1e-8;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double alpha = 0.0;  // accepted step size; 0 on rows where no step was taken
    double f_norm_inf = 0.0;
    double ms = 0.0;  // wall-clock of the iteration
};

using TrainTrace = std::vector<TraceRow>;

enum class StopReason { max_iter, gradient_below_tol, line_search_failed };

std::string to_string(StopReason r);

struct TrainResult {
    Weights weights;
    double objective = 0.0;
    StopReason reason = StopReason::max_iter;
};

/// Max absolute row sum of a matrix.
double inf_norm(const Eigen::MatrixXd& M);

/**
 * Rescales any row of F whose absolute sum exceeds 1/sqrt(gamma) back onto
 * that limit; admissible rows (and admissible F) are returned untouched.
 * Keeping ||F||_inf small this way avoids chaotic closed-loop behavior and
 * keeps the truncation-bound constants valid.
 */
Eigen::MatrixXd clip_recurrent(const Eigen::MatrixXd& F, double gamma);

struct LineSearchResult {
    bool ok = false;
    double alpha = 0.0;
    Weights next;
    double objective = 0.0;  // re-rolled objective of the accepted candidate
};

/**
 * Backtracking search along -d: tries alpha_init * rho^j for j = 0.. and
 * accepts the first (largest) alpha whose candidate weights, after optional
 * clipping, strictly lower the full re-rolled objective. The quantity
 * tested is exactly the one the trace records.
 */
LineSearchResult line_search(const Weights& w, const Gradient& d, const Series& x,
                             const TrainConfig& cfg, double current_objective,
                             const SquashFn& sq = tanh_squash());

/**
 * The full training loop: policy evaluation (rollout + discounted cost),
 * policy improvement (gradient step with line search or fixed step),
 * optional recurrent-weight clipping, one trace row per evaluated iterate.
 * Initial weights are w0 if given, else seeded uniform in [-r, r] with
 * r = 0.1/sqrt(n).
 */
std::pair<TrainResult, TrainTrace> piranha_train(const Series& x, const Shape& shape,
                                                 const TrainConfig& cfg,
                                                 const std::optional<Weights>& w0 = std::nullopt,
                                                 const SquashFn& sq = tanh_squash());

/**
 * Replay check: teacher-force inputs up to t_switch, then feed the
 * network its own predictions; returns the accumulated squared readout
 * error over t' = t_switch..T.
 */
double replay_error(const Weights& w, const Series& x, int t_switch, int T,
                    const SquashFn& sq = tanh_squash());

/// Prediction rows H u_t for t = 0..T from the replay simulation above.
std::vector<Eigen::VectorXd> replay_predictions(const Weights& w, const Series& x, int t_switch,
                                                int T, const SquashFn& sq = tanh_squash());

/**
 * Teacher-forced one-step baseline: gradient descent on
 * sum_t ||H sigma(F u_t + G [x_t;1]) - x_{t+1}||^2 with u_t taken from the
 * teacher-forced rollout of the current weights. Same trace format.
 */
std::pair<TrainResult, TrainTrace> baseline_onestep_train(const Series& x, const Shape& shape,
                                                          const TrainConfig& cfg,
                                                          const std::optional<Weights>& w0 = std::nullopt,
                                                          const SquashFn& sq = tanh_squash());

} // namespace piranha
