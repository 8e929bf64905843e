#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <sstream>

#include "carbonweights/iam.hpp"
#include "carbonweights/optimizer.hpp"
#include "fixtures.hpp"

using namespace cw;

namespace {

double rosenbrock(const Vec& x) { return -(std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2)); }

bool bit_identical(const OptResult& a, const OptResult& b) {
    if (a.x.size() != b.x.size() || a.evals != b.evals) return false;
    if (std::memcmp(&a.f, &b.f, sizeof(double)) != 0) return false;
    return std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Subplex, OneDimensionalQuadratic) {
    const auto r = maximize_bounded([](const Vec& x) { return -(x[0] - 1) * (x[0] - 1); }, {-5}, {5});
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.f, 0.0, 1e-6);
    EXPECT_TRUE(r.converged);
}

TEST(Subplex, Rosenbrock) {
    const auto r = maximize_bounded(rosenbrock, {-2, -2}, {2, 2});
    EXPECT_NEAR(r.x[0], 1.0, 1e-3);
    EXPECT_NEAR(r.x[1], 1.0, 1e-3);
}

TEST(Subplex, TwelveDimensionalSeparableQuadratic) {
    Vec target(12);
    for (std::size_t i = 0; i < 12; ++i) target[i] = -1.0 + 0.17 * i;
    const auto f = [&](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s -= (1.0 + i) * (x[i] - target[i]) * (x[i] - target[i]);
        return s;
    };
    const auto r = maximize_bounded(f, Vec(12, -3.0), Vec(12, 3.0));
    for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(r.x[i], target[i], 1e-5) << i;
}

TEST(Subplex, DeterministicUnderSeed) {
    OptimizerConfig cfg;
    cfg.seed = 42;
    const auto a = maximize_bounded(rosenbrock, {-2, -2}, {2, 2}, cfg);
    const auto b = maximize_bounded(rosenbrock, {-2, -2}, {2, 2}, cfg);
    EXPECT_TRUE(bit_identical(a, b));
    cfg.parallelRestarts = false;
    EXPECT_TRUE(bit_identical(a, maximize_bounded(rosenbrock, {-2, -2}, {2, 2}, cfg)));
}

TEST(Subplex, TranslationInvariance) {
    const double shift = 7.25;
    const auto base = maximize_bounded(rosenbrock, {-2, -2}, {2, 2});
    const auto moved = maximize_bounded([&](const Vec& x) { return rosenbrock({x[0] - shift, x[1] - shift}); },
                                        {-2 + shift, -2 + shift}, {2 + shift, 2 + shift});
    EXPECT_NEAR(moved.x[0] - shift, base.x[0], 1e-4);
    EXPECT_NEAR(moved.x[1] - shift, base.x[1], 1e-4);
}

TEST(Subplex, NeverLeavesTheBox) {
    std::atomic<bool> outside{false};
    const auto f = [&](const Vec& x) {
        for (double v : x)
            if (v < 0.0 || v > 1.0) outside = true;
        return x[0] + 2 * x[1] - x[2];  // optimum on the boundary
    };
    const auto r = maximize_bounded(f, {0, 0, 0}, {1, 1, 1});
    EXPECT_FALSE(outside.load());
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
    EXPECT_NEAR(r.x[2], 0.0, 1e-6);
}

TEST(Subplex, BudgetExhaustionReportsBestSoFar) {
    OptimizerConfig cfg;
    cfg.maxEvals = 30;
    const auto r = maximize_bounded(rosenbrock, {-2, -2}, {2, 2}, cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(std::isfinite(r.f));
}

TEST(Subplex, TraceRecordsEvaluations) {
    OptimizerConfig cfg;
    cfg.trace = true;
    cfg.restarts = 1;
    const auto r = maximize_bounded([](const Vec& x) { return -x[0] * x[0]; }, {-1}, {1}, cfg);
    ASSERT_FALSE(r.trace.empty());
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "eval,x0,f,violation");
}

TEST(Config, Validation) {
    OptimizerConfig cfg;
    cfg.subspaceDim = 1;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.penaltyGrowth = 1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.xtol = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(AugmentedLagrangian, Projection) {
    const auto r = maximize_eq_constrained([](const Vec& x) { return -(x[0] * x[0] + x[1] * x[1]); },
                                           [](const Vec& x) { return Vec{x[0] + x[1] - 1.0}; }, {-2, -2}, {2, 2});
    EXPECT_NEAR(r.x[0], 0.5, 1e-4);
    EXPECT_NEAR(r.x[1], 0.5, 1e-4);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.constraintViolation, OptimizerConfig{}.ctol);
}

TEST(AugmentedLagrangian, ContradictionFails) {
    EXPECT_THROW(maximize_eq_constrained([](const Vec& x) { return -(x[0] * x[0] + x[1] * x[1]); },
                                         [](const Vec& x) { return Vec{x[0] + x[1] - 1.0, x[0] + x[1] - 2.0}; },
                                         {-2, -2}, {2, 2}),
                 ConvergenceError);
}

TEST(AugmentedLagrangian, EqualisedMarginalCostMatchesUniformParameterisation) {
    const auto s = cwtest::two_region_scenario(1);
    const auto& a = s.regions[0];
    const auto& b = s.regions[1];
    const auto welfare = [&](const Vec& mu) {
        return evaluate_swf(simulate(s, {PolicyMode::Differentiated, mu}), s, Swf::utilitarian());
    };
    const auto equalised = [&](const Vec& mu) {
        return Vec{a.backstop[0] * std::pow(mu[0], a.theta - 1) - b.backstop[0] * std::pow(mu[1], b.theta - 1)};
    };
    const auto constrained = maximize_eq_constrained(welfare, equalised, {0, 0}, {1, 1});
    const double priceAL = a.backstop[0] * std::pow(constrained.x[0], a.theta - 1);
    const auto uniform = optimize_policy(s, Swf::utilitarian(), PolicyMode::Uniform);
    EXPECT_NEAR(priceAL, uniform.policy.rates[0], 1e-4);
}

TEST(GridOracle, MatchesSubplex) {
    const auto f = [](const Vec& x) { return -(x[0] - 1) * (x[0] - 1); };
    const auto g = grid_oracle(f, {-5}, {5}, 101);
    EXPECT_NEAR(g.x[0], maximize_bounded(f, {-5}, {5}).x[0], 10.0 / 100);
}

TEST(GridOracle, MonotoneObjectiveReturnsCorner) {
    const auto g = grid_oracle([](const Vec& x) { return x[0] - x[1]; }, {0, 0}, {2, 3}, 11);
    EXPECT_EQ(g.x[0], 2.0);
    EXPECT_EQ(g.x[1], 0.0);
}

TEST(GridOracle, RejectsHighDimension) {
    EXPECT_THROW(grid_oracle([](const Vec&) { return 0.0; }, Vec(4, 0.0), Vec(4, 1.0), 3), DomainError);
}
