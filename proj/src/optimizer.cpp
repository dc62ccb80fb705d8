#include "piranha/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>

namespace piranha {

void TrainConfig::validate() const {
    hp.validate();
    if (hp.gamma == 0.0)
        throw ShapeError(
            "gamma = 0 degenerates training: every candidate-dependent term of the "
            "improvement objective carries gamma^k (k >= 1), so its gradient vanishes "
            "identically; use gamma > 0 (gamma = 0 remains valid for cost evaluation)");
    if (max_iter < 1) throw ShapeError("max_iter must be >= 1");
    if (use_backtracking) {
        if (backtrack.alpha_init <= 0.0) throw ShapeError("alpha_init must be positive");
        if (!(backtrack.rho > 0.0 && backtrack.rho < 1.0))
            throw ShapeError("backtracking shrink rho must lie in (0,1)");
        if (backtrack.max_halvings < 0) throw ShapeError("max_halvings must be >= 0");
    } else {
        if (fixed.alpha <= 0.0) throw ShapeError("fixed step alpha must be positive");
    }
    if (smooth_steps < 0) throw ShapeError("smooth state-update count must be >= 0");
    if (stop_tol < 0.0) throw ShapeError("stop_tol must be >= 0");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::max_iter: return "max_iter";
        case StopReason::gradient_below_tol: return "gradient_below_tol";
        case StopReason::line_search_failed: return "line_search_failed";
    }
    return "unknown";
}

double inf_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXd clip_recurrent(const Eigen::MatrixXd& F, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ShapeError("clipping requires 0 < gamma < 1");
    const double limit = 1.0 / std::sqrt(gamma);
    Eigen::MatrixXd out = F;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double rowsum = out.row(i).cwiseAbs().sum();
        if (rowsum > limit) out.row(i) *= limit / rowsum;
    }
    return out;
}

namespace {

struct Iterate {
    double objective;
    Gradient gradient;
};

// Shared descent loop; the two trainers differ only in how an iterate is
// evaluated and how a candidate's objective is scored.
std::pair<TrainResult, TrainTrace> descend(
    const Shape& shape, const TrainConfig& cfg, const std::optional<Weights>& w0,
    const std::function<Iterate(const Weights&)>& evaluate,
    const std::function<double(const Weights&)>& candidate_objective) {
    cfg.validate();

    Weights w;
    if (w0) {
        w = *w0;
        check_weights(w);
        if (w.n() != shape.n || w.m() != shape.m)
            throw ShapeError("initial weights do not match the requested shape");
    } else {
        const double r = 0.1 / std::sqrt(static_cast<double>(shape.n));
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-r, r);
        w = Weights::zero(shape);
        for (int i = 0; i < shape.n; ++i)
            for (int j = 0; j < shape.n; ++j) w.F(i, j) = dist(rng);
        for (int i = 0; i < shape.n; ++i)
            for (int j = 0; j < shape.m + 1; ++j) w.G(i, j) = dist(rng);
    }
    if (cfg.clip_enabled) w.F = clip_recurrent(w.F, cfg.hp.gamma);

    TrainTrace trace;
    TrainResult result;

    for (int iter = 1;; ++iter) {
        const auto tic = std::chrono::steady_clock::now();
        Iterate it;
        try {
            it = evaluate(w);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (iteration " + std::to_string(iter) + ")");
        }
        TraceRow row;
        row.iter = iter;
        row.objective = it.objective;
        row.grad_norm = it.gradient.norm();
        row.f_norm_inf = inf_norm(w.F);

        auto finish_row = [&] {
            row.ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - tic).count();
            trace.push_back(row);
        };

        if (row.grad_norm < cfg.stop_tol) {
            finish_row();
            result = {w, it.objective, StopReason::gradient_below_tol};
            break;
        }
        if (iter > cfg.max_iter) {
            finish_row();
            result = {w, it.objective, StopReason::max_iter};
            break;
        }

        Weights next;
        if (cfg.use_backtracking) {
            bool accepted = false;
            double alpha = cfg.backtrack.alpha_init;
            for (int j = 0; j <= cfg.backtrack.max_halvings; ++j, alpha *= cfg.backtrack.rho) {
                Weights cand{w.F - alpha * it.gradient.dF, w.G - alpha * it.gradient.dG};
                if (cfg.clip_enabled) cand.F = clip_recurrent(cand.F, cfg.hp.gamma);
                if (candidate_objective(cand) < it.objective) {
                    row.alpha = alpha;
                    next = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                finish_row();
                result = {w, it.objective, StopReason::line_search_failed};
                break;
            }
        } else {
            row.alpha = cfg.fixed.alpha;
            next = Weights{w.F - cfg.fixed.alpha * it.gradient.dF,
                           w.G - cfg.fixed.alpha * it.gradient.dG};
            if (cfg.clip_enabled) next.F = clip_recurrent(next.F, cfg.hp.gamma);
        }
        finish_row();
        w = std::move(next);
    }
    return {result, trace};
}

} // namespace

LineSearchResult line_search(const Weights& w, const Gradient& d, const Series& x,
                             const TrainConfig& cfg, double current_objective,
                             const SquashFn& sq) {
    LineSearchResult res;
    double alpha = cfg.backtrack.alpha_init;
    for (int j = 0; j <= cfg.backtrack.max_halvings; ++j, alpha *= cfg.backtrack.rho) {
        Weights cand{w.F - alpha * d.dF, w.G - alpha * d.dG};
        if (cfg.clip_enabled) cand.F = clip_recurrent(cand.F, cfg.hp.gamma);
        const double J = discounted_cost(cand, rollout(cand, x, cfg.hp.T, sq), x, cfg.hp, sq).total;
        if (J < current_objective) {
            res.ok = true;
            res.alpha = alpha;
            res.next = std::move(cand);
            res.objective = J;
            return res;
        }
    }
    return res;
}

std::pair<TrainResult, TrainTrace> piranha_train(const Series& x, const Shape& shape,
                                                 const TrainConfig& cfg,
                                                 const std::optional<Weights>& w0,
                                                 const SquashFn& sq) {
    cfg.validate();
    if (!x.covers(cfg.hp.T - 1 + cfg.hp.K))
        throw RangeError("series must supply T+K samples (or enable hold padding)");
    if (x.channels() != shape.m)
        throw ShapeError("series channel count does not match the requested shape");
    if (sq.max_slope > 1.0)
        std::cerr << "warning: squashing slope " << sq.max_slope
                  << " > 1 voids the truncation-bound assumptions\n";

    // Footnote-style smoothing keeps one persistent state sequence and
    // advances it j times per iteration instead of re-rolling.
    StateSeq smooth_U;
    bool smooth_ready = false;

    auto evaluate = [&](const Weights& w) -> Iterate {
        StateSeq U = rollout(w, x, cfg.hp.T, sq);  // policy evaluation
        const double J = discounted_cost(w, U, x, cfg.hp, sq).total;
        const StateSeq* grad_states = &U;
        if (cfg.smooth_steps > 0) {
            if (!smooth_ready) {
                smooth_U = U;
                smooth_ready = true;
            }
            for (int j = 0; j < cfg.smooth_steps; ++j) smooth_U = apply_S(w, smooth_U, x, sq);
            grad_states = &smooth_U;
        }
        return {J, grad(w, *grad_states, x, cfg.hp, sq)};  // policy improvement direction
    };
    auto candidate_objective = [&](const Weights& cand) {
        return discounted_cost(cand, rollout(cand, x, cfg.hp.T, sq), x, cfg.hp, sq).total;
    };
    return descend(shape, cfg, w0, evaluate, candidate_objective);
}

namespace {

double onestep_objective(const Weights& w, const StateSeq& U, const Series& x, int T,
                         const SquashFn& sq) {
    const int m = x.channels();
    double J = 0.0;
    for (int t = 0; t < T; ++t) {
        HiddenState z = step(w, U[static_cast<std::size_t>(t)], x.at(t), sq);
        J += (z.head(m) - x.at(t + 1)).squaredNorm();
    }
    return J;
}

// Gradient of the one-step objective with the rollout states held fixed.
Gradient onestep_grad(const Weights& w, const StateSeq& U, const Series& x, int T,
                      const SquashFn& sq) {
    const int n = w.n();
    const int m = w.m();
    Gradient g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, m + 1)};
    for (int t = 0; t < T; ++t) {
        const HiddenState& ut = U[static_cast<std::size_t>(t)];
        Eigen::VectorXd a = w.F * ut;
        a.noalias() += w.G.leftCols(m) * x.at(t);
        a += w.G.col(m);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i)
            s[i] = 2.0 * (sq.value(a[i]) - x.at(t + 1)[i]);
        for (int i = 0; i < n; ++i) s[i] *= sq.deriv(a[i]);
        g.dF.noalias() += s * ut.transpose();
        g.dG.leftCols(m).noalias() += s * x.at(t).transpose();
        g.dG.col(m) += s;
    }
    return g;
}

} // namespace

std::pair<TrainResult, TrainTrace> baseline_onestep_train(const Series& x, const Shape& shape,
                                                          const TrainConfig& cfg,
                                                          const std::optional<Weights>& w0,
                                                          const SquashFn& sq) {
    cfg.validate();
    if (!x.covers(cfg.hp.T))
        throw RangeError("series must supply T+1 samples for the one-step baseline");
    if (x.channels() != shape.m)
        throw ShapeError("series channel count does not match the requested shape");

    auto evaluate = [&](const Weights& w) -> Iterate {
        StateSeq U = rollout(w, x, cfg.hp.T, sq);
        return {onestep_objective(w, U, x, cfg.hp.T, sq), onestep_grad(w, U, x, cfg.hp.T, sq)};
    };
    auto candidate_objective = [&](const Weights& cand) {
        return onestep_objective(cand, rollout(cand, x, cfg.hp.T, sq), x, cfg.hp.T, sq);
    };
    return descend(shape, cfg, w0, evaluate, candidate_objective);
}

namespace {

std::vector<Eigen::VectorXd> replay_sim(const Weights& w, const Series& x, int t_switch, int T,
                                        const SquashFn& sq) {
    if (t_switch < 1 || t_switch >= T)
        throw std::invalid_argument("t_switch must satisfy 1 <= t_switch < T");
    if (!x.covers(T))
        throw RangeError("series must cover index T for replay evaluation");
    const int m = x.channels();
    std::vector<Eigen::VectorXd> preds;
    preds.reserve(static_cast<std::size_t>(T) + 1);
    HiddenState u = Eigen::VectorXd::Zero(w.n());
    for (int t = 0; t <= T; ++t) {
        preds.push_back(project(u, m));
        if (t < T) {
            const Eigen::VectorXd v = (t <= t_switch) ? x.at(t) : project(u, m);
            u = step(w, u, v, sq);
        }
    }
    return preds;
}

} // namespace

double replay_error(const Weights& w, const Series& x, int t_switch, int T, const SquashFn& sq) {
    const auto preds = replay_sim(w, x, t_switch, T, sq);
    double err = 0.0;
    for (int t = t_switch; t <= T; ++t)
        err += (preds[static_cast<std::size_t>(t)] - x.at(t)).squaredNorm();
    return err;
}

std::vector<Eigen::VectorXd> replay_predictions(const Weights& w, const Series& x, int t_switch,
                                                int T, const SquashFn& sq) {
    return replay_sim(w, x, t_switch, T, sq);
}

} // namespace piranha
