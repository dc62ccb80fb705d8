#include "piranha/gradient.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace piranha {

Gradient grad(const Weights& w, const StateSeq& U, const Series& x, const Hyperparams& hp,
              const SquashFn& sq) {
    hp.validate();
    if (static_cast<int>(U.size()) != hp.T + 1)
        throw ShapeError("state sequence length does not match T+1");
    if (!x.covers(hp.T - 1 + hp.K))
        throw RangeError("series must cover T+K samples for the gradient");

    const int n = w.n();
    const int m = w.m();
    Gradient g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, m + 1)};

    const auto Fx = w.G.leftCols(m);  // input block of G
    std::vector<Eigen::VectorXd> pre(static_cast<std::size_t>(hp.K) + 1);
    std::vector<Eigen::VectorXd> z(static_cast<std::size_t>(hp.K) + 1);
    std::vector<double> wt(static_cast<std::size_t>(hp.K) + 1, 0.0);
    {
        double p = 1.0;
        for (int k = 1; k <= hp.K; ++k) { p *= hp.gamma; wt[static_cast<std::size_t>(k)] = p; }
    }

    // TODO: the per-t chains are independent; distribute them over threads
    // with an ordered reduction if large T*K*n^2 ever becomes a bottleneck.
    for (long t = 0; t < hp.T; ++t) {
        const HiddenState& ut = U[static_cast<std::size_t>(t)];

        // Forward pass along the chain anchored at t, keeping pre-activations.
        for (int k = 1; k <= hp.K; ++k) {
            const Eigen::VectorXd& src = (k == 1) ? ut : z[static_cast<std::size_t>(k) - 1];
            Eigen::VectorXd a = w.F * src;
            if (k == 1) a.noalias() += Fx * x.at(t);
            else        a.noalias() += Fx * src.head(m);
            a += w.G.col(m);
            Eigen::VectorXd zk(n);
            for (int i = 0; i < n; ++i) zk[i] = sq.value(a[i]);
            pre[static_cast<std::size_t>(k)] = std::move(a);
            z[static_cast<std::size_t>(k)] = std::move(zk);
        }

        // Reverse sweep: r carries the adjoint of the chain state z_k.
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        for (int k = hp.K; k >= 1; --k) {
            const Eigen::VectorXd& zk = z[static_cast<std::size_t>(k)];
            r.head(m) += 2.0 * wt[static_cast<std::size_t>(k)] * (zk.head(m) - x.at(t + k));
            Eigen::VectorXd s(n);
            const Eigen::VectorXd& a = pre[static_cast<std::size_t>(k)];
            for (int i = 0; i < n; ++i) s[i] = sq.deriv(a[i]) * r[i];
            if (k >= 2) {
                // pre_k = F z_{k-1} + Fx (H z_{k-1}) + bias, so the pullback is (F + Fx H)^T.
                r = w.F.transpose() * s;
                r.head(m).noalias() += Fx.transpose() * s;
            } else {
                // pre_1 = F u_t + G [x_t; 1]: the only place the candidate enters.
                g.dF.noalias() += s * ut.transpose();
                g.dG.leftCols(m).noalias() += s * x.at(t).transpose();
                g.dG.col(m) += s;
            }
        }
        if (!r.allFinite())
            throw NumericError("non-finite gradient contribution at t=" + std::to_string(t));
    }
    if (!g.dF.allFinite() || !g.dG.allFinite())
        throw NumericError("non-finite gradient");
    return g;
}

Gradient fd_grad(const Weights& w, const StateSeq& U, const Series& x, const Hyperparams& hp,
                 double h, const SquashFn& sq) {
    if (h <= 0.0) throw ShapeError("finite-difference step h must be positive");
    const int n = w.n();
    const int m = w.m();
    Gradient g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, m + 1)};
    Weights probe = w;

    auto central = [&](double& slot) {
        const double saved = slot;
        slot = saved + h;
        double up = improvement_objective(probe, w, U, x, hp, sq);
        slot = saved - h;
        double dn = improvement_objective(probe, w, U, x, hp, sq);
        slot = saved;
        return (up - dn) / (2.0 * h);
    };

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.dF(i, j) = central(probe.F(i, j));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m + 1; ++j) g.dG(i, j) = central(probe.G(i, j));
    return g;
}

TruncationReport truncation_horizon(double eps0, const Hyperparams& hp, const Shape& shape) {
    if (eps0 <= 0.0) throw ShapeError("eps0 must be positive");
    if (!(hp.gamma >= 0.0 && hp.gamma < 1.0))
        throw ShapeError("truncation horizon requires 0 <= gamma < 1");
    if (hp.T < 1) throw ShapeError("T must be >= 1");

    TruncationReport r;
    const double sg = std::sqrt(hp.gamma);
    r.C0 = 2.0 * static_cast<double>(hp.T) * sg / (1.0 - sg);
    r.C1 = std::sqrt(static_cast<double>(shape.n) * (shape.n + shape.m + 1)) * r.C0;

    // Smallest K >= 1 with C1 * gamma^(K/2) < eps0; the bound shrinks by
    // sqrt(gamma) per step so the scan terminates for any gamma < 1.
    int K = 1;
    double bound = r.C1 * sg;
    while (bound >= eps0 && K < 100000000) {
        ++K;
        bound *= sg;
    }
    if (bound >= eps0)
        throw NumericError("truncation horizon exceeds 1e8; request a larger eps0 or smaller gamma");
    r.K = K;
    r.bound = bound;
    return r;
}

} // namespace piranha
