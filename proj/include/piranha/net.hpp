#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "piranha/errors.hpp"
#include "piranha/series.hpp"

namespace piranha {

/// Network dimensions: m visible channels, n > m hidden units.
struct Shape {
    int m = 1;
    int n = 2;

    Shape() = default;
    Shape(int m_, int n_) : m(m_), n(n_) {
        if (m < 1) throw ShapeError("visible dimension m must be >= 1");
        if (n <= m) throw ShapeError("hidden dimension n must exceed visible dimension m");
    }
};

/**
 * The trainable weight pair: recurrent matrix F (n x n) and input matrix
 * G (n x (m+1)), whose last column multiplies the constant bias input 1.
 * The readout is the fixed projection onto the first m state components,
 * so no output matrix is stored.
 */
struct Weights {
    Eigen::MatrixXd F;
    Eigen::MatrixXd G;

    int n() const { return static_cast<int>(F.rows()); }
    int m() const { return static_cast<int>(G.cols()) - 1; }

    static Weights zero(const Shape& s) {
        return Weights{Eigen::MatrixXd::Zero(s.n, s.n), Eigen::MatrixXd::Zero(s.n, s.m + 1)};
    }
};

void check_weights(const Weights& w);

using HiddenState = Eigen::VectorXd;
using StateSeq = std::vector<HiddenState>;

StateSeq zero_state_seq(int T, int n);

/**
 * Componentwise squashing nonlinearity and its derivative. The derivative
 * is carried alongside so gradient code stays generic in the activation.
 * max_slope is metadata used to flag configurations that break the
 * small-slope assumption the truncation bound relies on.
 */
struct SquashFn {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double max_slope = 1.0;
};

/// Default activation: tanh, whose slope never exceeds 1.
const SquashFn& tanh_squash();

/// One step of the dynamics: sigma(F u + G [v;1]).
HiddenState step(const Weights& w, const HiddenState& u, const Eigen::VectorXd& v,
                 const SquashFn& sq = tanh_squash());

/// First m components of a hidden state (the network output).
Eigen::VectorXd project(const HiddenState& u, int m);

/// Closed-loop step: feeds the state's own projection back as input.
HiddenState closed_step(const Weights& w, const HiddenState& u, const SquashFn& sq = tanh_squash());

/**
 * k-step propagation of a single state anchored at time t: the state is
 * first advanced once by w_first with teacher input x_t, then k-1 further
 * times by w_rest in closed loop (input = own projection, bias input
 * stays 1). k = 0 is the identity.
 */
HiddenState propagate_k(const Weights& w_first, const Weights& w_rest, const HiddenState& u,
                        long t, int k, const Series& x, const SquashFn& sq = tanh_squash());

/**
 * Synchronous one-step propagation of a whole state sequence with teacher
 * inputs: (0, sigma(F u_0 + G x_0), ..., sigma(F u_{T-1} + G x_{T-1})).
 * The rollout is its unique fixed point.
 */
StateSeq apply_S(const Weights& w, const StateSeq& U, const Series& x,
                 const SquashFn& sq = tanh_squash());

/// Teacher-forced state sequence of length T+1 from the zero initial state.
StateSeq rollout(const Weights& w, const Series& x, int T, const SquashFn& sq = tanh_squash());

} // namespace piranha
