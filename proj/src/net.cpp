#include "piranha/net.hpp"

#include <cmath>
#include <string>

namespace piranha {

void check_weights(const Weights& w) {
    if (w.F.rows() != w.F.cols())
        throw ShapeError("F must be square, got " + std::to_string(w.F.rows()) + "x" +
                         std::to_string(w.F.cols()));
    if (w.G.rows() != w.F.rows())
        throw ShapeError("G must have the same row count as F");
    if (w.G.cols() < 2)
        throw ShapeError("G needs at least one input column plus the bias column");
    if (!w.F.allFinite() || !w.G.allFinite())
        throw NumericError("non-finite weight entries");
}

StateSeq zero_state_seq(int T, int n) {
    if (T < 0) throw ShapeError("sequence length T must be >= 0");
    return StateSeq(static_cast<std::size_t>(T) + 1, Eigen::VectorXd::Zero(n));
}

const SquashFn& tanh_squash() {
    static const SquashFn sq{
        [](double z) { return std::tanh(z); },
        [](double z) { double th = std::tanh(z); return 1.0 - th * th; },
        1.0};
    return sq;
}

namespace {

// Pre-activation F u + G [v;1]; every forward path funnels through here so
// results are bitwise comparable across rollout / apply_S / propagate_k.
Eigen::VectorXd preactivation(const Weights& w, const HiddenState& u, const Eigen::VectorXd& v) {
    const int m = w.m();
    Eigen::VectorXd a = w.F * u;
    a.noalias() += w.G.leftCols(m) * v;
    a += w.G.col(m);  // bias column times the constant 1
    return a;
}

Eigen::VectorXd squash(const Eigen::VectorXd& a, const SquashFn& sq) {
    Eigen::VectorXd out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = sq.value(a[i]);
    return out;
}

} // namespace

HiddenState step(const Weights& w, const HiddenState& u, const Eigen::VectorXd& v,
                 const SquashFn& sq) {
    if (u.size() != w.F.cols())
        throw ShapeError("state dimension " + std::to_string(u.size()) +
                         " does not match F (" + std::to_string(w.F.cols()) + ")");
    if (v.size() != w.m())
        throw ShapeError("input dimension " + std::to_string(v.size()) +
                         " does not match G (" + std::to_string(w.m()) + " channels)");
    if (!v.allFinite()) throw NumericError("non-finite input to step");
    return squash(preactivation(w, u, v), sq);
}

Eigen::VectorXd project(const HiddenState& u, int m) {
    if (m < 0 || m > u.size())
        throw ShapeError("cannot project " + std::to_string(u.size()) +
                         " components onto " + std::to_string(m));
    return u.head(m);
}

HiddenState closed_step(const Weights& w, const HiddenState& u, const SquashFn& sq) {
    return step(w, u, project(u, w.m()), sq);
}

HiddenState propagate_k(const Weights& w_first, const Weights& w_rest, const HiddenState& u,
                        long t, int k, const Series& x, const SquashFn& sq) {
    if (k < 0) throw ShapeError("propagation count k must be >= 0");
    if (k == 0) return u;
    if (!x.covers(t + k))
        throw RangeError("series too short for t+k = " + std::to_string(t + k));
    HiddenState z = step(w_first, u, x.at(t), sq);
    for (int j = 2; j <= k; ++j) z = closed_step(w_rest, z, sq);
    return z;
}

StateSeq apply_S(const Weights& w, const StateSeq& U, const Series& x, const SquashFn& sq) {
    if (U.empty()) throw ShapeError("state sequence must contain at least the initial state");
    const long T = static_cast<long>(U.size()) - 1;
    if (!x.covers(T - 1))
        throw RangeError("series too short for state sequence of length " +
                         std::to_string(U.size()));
    StateSeq out(U.size());
    out[0] = Eigen::VectorXd::Zero(U[0].size());
    for (long t = 0; t < T; ++t) out[static_cast<std::size_t>(t) + 1] = step(w, U[static_cast<std::size_t>(t)], x.at(t), sq);
    return out;
}

StateSeq rollout(const Weights& w, const Series& x, int T, const SquashFn& sq) {
    if (T < 0) throw ShapeError("rollout length T must be >= 0");
    if (T > 0 && !x.covers(T - 1))
        throw RangeError("series too short for rollout length " + std::to_string(T));
    StateSeq U(static_cast<std::size_t>(T) + 1);
    U[0] = Eigen::VectorXd::Zero(w.n());
    for (int t = 0; t < T; ++t) U[static_cast<std::size_t>(t) + 1] = step(w, U[static_cast<std::size_t>(t)], x.at(t), sq);
    return U;
}

} // namespace piranha
