#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace piranha;
using testutil::make_instance;
using testutil::oracle_discounted;
using testutil::oracle_immediate;
using testutil::oracle_improvement;
using testutil::random_series;
using testutil::random_state_seq;
using testutil::random_weights;
using testutil::rel_diff;

TEST_CASE("hyperparameter validation") {
    Hyperparams hp;
    hp.gamma = 1.0;
    CHECK_THROWS_AS(hp.validate(), ShapeError);
    hp.gamma = -0.1;
    CHECK_THROWS_AS(hp.validate(), ShapeError);
    hp.gamma = 0.5;
    hp.K = 0;
    CHECK_THROWS_AS(hp.validate(), ShapeError);
    hp.K = 1;
    hp.T = 0;
    CHECK_THROWS_AS(hp.validate(), ShapeError);
}

TEST_CASE("immediate cost: zero states against fixed targets") {
    StateSeq U = zero_state_seq(2, 3);
    std::vector<Eigen::VectorXd> rows(2);
    rows[0] = Eigen::VectorXd::Constant(1, 0.5);
    rows[1] = Eigen::VectorXd::Constant(1, -0.5);
    Series x = Series::preNormalized(std::move(rows));
    CHECK(immediate_cost(U, x) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("immediate cost: exact match costs zero") {
    std::mt19937_64 rng(31);
    Series x = random_series(rng, 4, 2);
    StateSeq U = zero_state_seq(4, 3);
    for (int t = 0; t < 4; ++t) {
        U[static_cast<std::size_t>(t)].head(2) = x.at(t);
    }
    CHECK(immediate_cost(U, x) == 0.0);
}

TEST_CASE("immediate cost: brute-force double loop oracle, T=5 m=2") {
    std::mt19937_64 rng(32);
    Series x = random_series(rng, 5, 2);
    StateSeq U = random_state_seq(rng, 5, 4);
    CHECK(rel_diff(immediate_cost(U, x), oracle_immediate(U, x)) < 1e-12);
}

TEST_CASE("discounted cost: gamma=0 equals the immediate cost exactly") {
    auto inst = make_instance(41, 4, 2, 6, 5, 0.0, false);
    CostBreakdown cb = discounted_cost(inst.w, inst.U, inst.x, inst.hp);
    CHECK(cb.total == immediate_cost(inst.U, inst.x));  // bitwise
    for (std::size_t k = 1; k < cb.per_horizon.size(); ++k) CHECK(cb.per_horizon[k] == 0.0);
}

TEST_CASE("discounted cost: everything zero costs zero") {
    Weights w = Weights::zero(Shape(1, 3));
    StateSeq U = zero_state_seq(4, 3);
    std::vector<Eigen::VectorXd> rows(10, Eigen::VectorXd::Zero(1));
    Series x = Series::preNormalized(std::move(rows));
    Hyperparams hp{0.5, 4, 4};
    CHECK(discounted_cost(w, U, x, hp).total == 0.0);
}

TEST_CASE("discounted cost: naive re-simulation oracle, n=3 m=1 T=4 K=5") {
    auto inst = make_instance(42, 3, 1, 4, 5, 0.6, false);
    CostBreakdown cb = discounted_cost(inst.w, inst.U, inst.x, inst.hp);
    CHECK(rel_diff(cb.total, oracle_discounted(inst.w, inst.U, inst.x, inst.hp)) < 1e-12);
}

TEST_CASE("discounted cost: per-horizon entries sum to the total") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto inst = make_instance(seed, 5, 2, 7, 6, 0.7, seed % 2 == 0);
        CostBreakdown cb = discounted_cost(inst.w, inst.U, inst.x, inst.hp);
        double s = 0.0;
        for (double v : cb.per_horizon) s += v;
        CHECK(rel_diff(cb.total, s) < 1e-12);
        CHECK(cb.per_horizon.size() == static_cast<std::size_t>(inst.hp.K) + 1);
    }
}

TEST_CASE("discounted cost: non-negative, and non-decreasing in K") {
    auto inst = make_instance(43, 4, 1, 6, 1, 0.5, false, 0.3, /*series_horizon=*/6);
    double prev = -1.0;
    for (int K = 1; K <= 6; ++K) {
        Hyperparams hp{0.5, K, 6};
        const double J = discounted_cost(inst.w, inst.U, inst.x, hp).total;
        CHECK(J >= 0.0);
        CHECK(J >= prev);
        prev = J;
    }
}

TEST_CASE("discounted cost: series shorter than T+K is rejected") {
    auto inst = make_instance(44, 3, 1, 5, 3, 0.5, false);
    Hyperparams too_long{0.5, 40, 5};
    CHECK_THROWS_AS(discounted_cost(inst.w, inst.U, inst.x, too_long), RangeError);
}

TEST_CASE("improvement objective: equals the discounted cost when candidate == evaluator") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        auto inst = make_instance(seed, 4, 2, 6, 4, 0.65, true);
        const double imp = improvement_objective(inst.w, inst.w, inst.U, inst.x, inst.hp);
        const double disc = discounted_cost(inst.w, inst.U, inst.x, inst.hp).total;
        CHECK(imp == disc);  // same chains, same accumulation order
    }
}

TEST_CASE("improvement objective: all-zero instance costs zero") {
    Weights w = Weights::zero(Shape(1, 3));
    StateSeq U = zero_state_seq(3, 3);
    std::vector<Eigen::VectorXd> rows(8, Eigen::VectorXd::Zero(1));
    Series x = Series::preNormalized(std::move(rows));
    Hyperparams hp{0.5, 3, 3};
    CHECK(improvement_objective(w, w, U, x, hp) == 0.0);
}

TEST_CASE("improvement objective: naive re-simulation oracle with distinct weight pairs") {
    std::mt19937_64 rng(45);
    Weights wc = random_weights(rng, 4, 1, 0.4);
    Weights we = random_weights(rng, 4, 1, 0.4);
    Series x = random_series(rng, 12, 1);
    StateSeq U = random_state_seq(rng, 6, 4);
    Hyperparams hp{0.55, 6, 6};
    CHECK(rel_diff(improvement_objective(wc, we, U, x, hp),
                   oracle_improvement(wc, we, U, x, hp)) < 1e-12);
}
