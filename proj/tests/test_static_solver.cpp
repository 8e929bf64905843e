#include <gtest/gtest.h>

#include <cmath>

#include "carbonweights/optimizer.hpp"
#include "carbonweights/static_props.hpp"
#include "fixtures.hpp"

using namespace cw;
using cwtest::toy_static;

namespace {

// Grid search over a uniform price maximising `score(allocation)`.
template <class Score>
double grid_uniform_price(const EconomyStatic& e, Score score) {
    const double cap = uniform_price_cap(e);
    const auto r = grid_oracle([&](const Vec& x) { return score(allocation_at_prices(e, x[0], x[0])); }, {0.0},
                               {cap}, 2001, 3);
    return r.x[0];
}

}  // namespace

TEST(Negishi, SymmetricToy) {
    const auto e = toy_static(0.5, 0.5);
    const auto s = solve_negishi_static(e);
    EXPECT_NEAR(s.tauN, 2.0, 1e-9);
    EXPECT_EQ(s.tauN, s.tauS);
    EXPECT_NEAR(s.abatementN, 1.0, 1e-9);
    EXPECT_NEAR(s.global_abatement(), 2.0, 1e-9);
    EXPECT_NEAR(grid_uniform_price(e, static_total_consumption), 2.0, 1e-6);
}

TEST(Negishi, DependsOnlyOnDamageSum) {
    const auto e = toy_static(0.25, 0.75);
    EXPECT_NEAR(solve_negishi_static(e).tauN, 2.0, 1e-9);
    EXPECT_NEAR(grid_uniform_price(e, static_total_consumption), 2.0, 1e-6);
}

TEST(Negishi, ZeroDamageMeansZeroPrice) {
    const auto s = solve_negishi_static(toy_static(0.0, 0.0));
    EXPECT_EQ(s.tauN, 0.0);
    EXPECT_EQ(s.global_abatement(), 0.0);
}

TEST(Negishi, WeightsEqualiseWeightedMarginalUtility) {
    const auto e = cwtest::table_static(2.0, 1.5);
    const auto s = solve_negishi_static(e);
    EXPECT_NEAR(s.weights.north * e.utility.marginal(s.xN), s.weights.south * e.utility.marginal(s.xS), 1e-12);
    EXPECT_NEAR(negishi_transfer_derivative(e, s), 0.0, 1e-10);
}

TEST(UtilitarianUniform, EqualsNegishiWhenSymmetric) {
    const auto e = toy_static(0.5, 0.5);
    EXPECT_NEAR(solve_utilitarian_uniform_static(e).tauN, solve_negishi_static(e).tauN, 1e-9);
}

TEST(UtilitarianUniform, EqualsNegishiUnderLinearUtility) {
    auto e = cwtest::table_static(2.0, 0.0);
    EXPECT_NEAR(solve_utilitarian_uniform_static(e).tauN, solve_negishi_static(e).tauN, 1e-12);
}

TEST(UtilitarianUniform, MatchesOracle) {
    const auto e = toy_static(0.25, 0.75, 40.0, 10.0);
    const auto s = solve_utilitarian_uniform_static(e);
    const double oracle = grid_uniform_price(e, [&](const StaticAllocation& a) {
        return static_welfare(e, {1.0, 1.0}, a);
    });
    EXPECT_NEAR(s.tauN, oracle, 1e-5);
}

TEST(UtilitarianUniform, ExactRatioNearTableCell) {
    const auto e = cwtest::table_static(2.0, 1.0);
    const double ratio = solve_utilitarian_uniform_static(e).tauN / solve_negishi_static(e).tauN;
    EXPECT_NEAR(ratio, 1.16, 0.05);
    EXPECT_NEAR(ratio, ratio_approx_static(3.7, 1.0 / 3.2, 2.0, 1.0, 1.0), 0.05);
}

TEST(Preferred, ToyPrices) {
    const auto e = toy_static(0.25, 0.75);
    const auto n = solve_preferred_static(e, Side::North);
    const auto s = solve_preferred_static(e, Side::South);
    EXPECT_NEAR(n.tauN, 1.5, 1e-9);
    EXPECT_NEAR(s.tauN, 2.25, 1e-9);
    EXPECT_EQ(n.preferredBy, Side::North);
    EXPECT_NEAR(grid_uniform_price(e, [](const StaticAllocation& a) { return a.aggregate[0]; }), 1.5, 1e-6);
    EXPECT_NEAR(grid_uniform_price(e, [](const StaticAllocation& a) { return a.aggregate[1]; }), 2.25, 1e-6);
}

TEST(Preferred, SymmetricEconomyCoincides) {
    const auto e = toy_static(0.5, 0.5);
    const double n = solve_preferred_static(e, Side::North).tauN;
    EXPECT_NEAR(n, solve_preferred_static(e, Side::South).tauN, 1e-12);
    EXPECT_NEAR(n, solve_negishi_static(e).tauN, 1e-9);
    EXPECT_NEAR(n, solve_utilitarian_uniform_static(e).tauN, 1e-9);
}

TEST(Differentiated, SymmetricGivesNegishi) {
    const auto e = toy_static(0.5, 0.5);
    const auto d = solve_utilitarian_differentiated_static(e);
    EXPECT_NEAR(d.tauN, 2.0, 1e-8);
    EXPECT_NEAR(d.tauS, 2.0, 1e-8);
}

TEST(Differentiated, PoorerRegionPaysLessAndOracleAgrees) {
    const auto e = toy_static(0.25, 0.75, 40.0, 10.0);
    const auto d = solve_utilitarian_differentiated_static(e);
    const auto n = solve_negishi_static(e);
    ASSERT_TRUE(d.northRicher);
    EXPECT_LT(d.tauS, n.tauN);
    EXPECT_GT(d.tauN, n.tauN);
    const double capN = e.north.cost.marginal(e.ebar()), capS = e.south.cost.marginal(e.ebar());
    const auto oracle = grid_oracle(
        [&](const Vec& x) {
            if (e.north.cost.abatement_at_price(x[0]) + e.south.cost.abatement_at_price(x[1]) > e.ebar())
                return -std::numeric_limits<double>::infinity();
            return static_welfare(e, {1.0, 1.0}, allocation_at_prices(e, x[0], x[1]));
        },
        {0.0, 0.0}, {capN, capS}, 401, 4);
    EXPECT_NEAR(oracle.x[0], d.tauN, 1e-3);
    EXPECT_NEAR(oracle.x[1], d.tauS, 1e-3);
}

TEST(ArbitraryWeights, UtilitarianWeightsReproduceNamedRegimes) {
    const auto e = cwtest::table_static(2.0, 1.5);
    EXPECT_EQ(solve_arbitrary_weights_static(e, {1.0, 1.0}, true).tauN, solve_utilitarian_uniform_static(e).tauN);
    const auto a = solve_arbitrary_weights_static(e, {1.0, 1.0}, false);
    const auto u = solve_utilitarian_differentiated_static(e);
    EXPECT_EQ(a.tauN, u.tauN);
    EXPECT_EQ(a.tauS, u.tauS);
}

TEST(ArbitraryWeights, CornerWeightIsPreferredPrice) {
    const auto e = toy_static(0.25, 0.75);
    EXPECT_NEAR(solve_arbitrary_weights_static(e, {1.0, 0.0}, true).tauN, 1.5, 1e-9);
}

TEST(ArbitraryWeights, ZeroWeightsRejected) {
    EXPECT_THROW(solve_arbitrary_weights_static(toy_static(0.5, 0.5), {0.0, 0.0}, true), DomainError);
}

TEST(ArbitraryWeights, NegishiWeightsGiveUniformPrices) {
    const auto e = cwtest::table_static(2.0, 1.5);
    const auto n = solve_negishi_static(e);
    const auto d = solve_arbitrary_weights_static(e, n.weights, false);
    EXPECT_LE(std::abs(d.tauN - d.tauS), 10 * SolverOptions{}.tol);
    EXPECT_NEAR(d.tauN, n.tauN, 1e-9);
}

TEST(ArbitraryWeights, IteratedWeightsConvergeToNegishi) {
    const auto e = cwtest::table_static(2.0, 1.5);
    const auto it = iterate_negishi_weights_static(e);
    const auto n = solve_negishi_static(e);
    EXPECT_NEAR(it.solution.tauN, n.tauN, 1e-9 * n.tauN);
    EXPECT_NEAR(it.solution.tauS, n.tauN, 1e-9 * n.tauN);
}

TEST(RatioApprox, TableCells) {
    EXPECT_NEAR(ratio_approx_static(3.7, 1 / 3.2, 2.0, 1.0, 1.0), 1.16, 0.005);
    EXPECT_NEAR(ratio_approx_static(3.7, 1 / 3.2, 0.5, 2.0, 1.5), 0.64, 0.005);
    for (double d : {0.5, 1.0, 2.0})
        for (double c : {0.5, 1.0, 2.0}) EXPECT_DOUBLE_EQ(ratio_approx_static(3.7, 1.0, d, c, 1.0), 1.0);
}

TEST(Propositions, SymmetricInstanceCoincides) {
    const auto rep = check_static_propositions(toy_static(0.5, 0.5));
    EXPECT_TRUE(rep.coincide);
    for (const auto& c : rep.checks) EXPECT_NE(c.verdict, Verdict::Fail) << c.name;
}

TEST(Propositions, SouthHeavyDamagesRaiseUtilitarianPrice) {
    const auto rep = check_static_propositions(cwtest::table_static(2.0, 1.0));
    EXPECT_GT(rep.utilitarianUniform.tauN, rep.negishi.tauN);
    EXPECT_GT(rep.preferredSouth.tauN, rep.preferredNorth.tauN);
    for (const auto& c : rep.checks) EXPECT_EQ(c.verdict, Verdict::Pass) << c.name;
}

TEST(Propositions, SmallSweepHasNoFailures) {
    const auto sweep = run_static_sweep(100, 99, 1e-6);
    EXPECT_EQ(sweep.failures(), 0);
    EXPECT_EQ(sweep.solverFailures, 0);
}

TEST(Propositions, InfiniteBandMakesEverythingIndeterminate) {
    const auto sweep = run_static_sweep(20, 5, std::numeric_limits<double>::infinity());
    for (const auto& [name, c] : sweep.counts) {
        EXPECT_EQ(c.pass, 0) << name;
        EXPECT_EQ(c.fail, 0) << name;
    }
}

TEST(Propositions, SweepIsDeterministic) {
    std::ostringstream a, b;
    write_static_sweep_csv(a, run_static_sweep(30, 4, 1e-6));
    write_static_sweep_csv(b, run_static_sweep(30, 4, 1e-6));
    EXPECT_EQ(a.str(), b.str());
}
