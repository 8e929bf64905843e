#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "carbonweights/tables.hpp"
#include "fixtures.hpp"

using namespace cw;
using cwtest::toy_dynamic;
using cwtest::toy_static;

TEST(DiscountFactor, Cases) {
    EXPECT_DOUBLE_EQ(negishi_discount_factor(0.3, 0.3, 0.7, 0.7, 0.4), 1.0);
    EXPECT_DOUBLE_EQ(negishi_discount_factor(0.3, 0.1, 0.7, 0.2, 1.0), 0.1 / 0.3);
    const UtilityParams log{1.0};
    const double xN = 5.0, xS = 1.5;
    EXPECT_DOUBLE_EQ(negishi_discount_factor(log.marginal(xN), log.marginal(2 * xN), log.marginal(xS),
                                             log.marginal(2 * xS), 0.3),
                     0.5);
    EXPECT_THROW(negishi_discount_factor(0.0, 1.0, 1.0, 1.0, 0.5), DomainError);
}

TEST(DynamicNegishi, CollapsesToStaticWithoutDiscountingOrGrowth) {
    // period-1 cost and period-2 damage sit on different endowments, so v
    // is exactly one only under linear utility; hold it there
    auto e = toy_dynamic(0.25, 0.75, 0.0);
    e.utility.eta = 0.0;
    const auto lin = solve_dynamic_negishi(e);
    EXPECT_NEAR(lin.v, 1.0, 1e-14);
    EXPECT_NEAR(lin.tau, solve_negishi_static(toy_static(0.25, 0.75)).tauN, 1e-8);
    DynamicOptions fixed;
    fixed.fixedV = 1.0;
    EXPECT_NEAR(solve_dynamic_negishi(toy_dynamic(0.25, 0.75, 0.0), fixed).tau, 2.0, 1e-8);
}

TEST(DynamicNegishi, HalvedDiscountFactorHalvesDamages) {
    // rho chosen so beta = 0.5 over a one-year horizon
    auto e = toy_dynamic(0.25, 0.75, 1.0, 1.0);
    DynamicOptions fixed;
    fixed.fixedV = 1.0;
    EXPECT_DOUBLE_EQ(e.beta(), 0.5);
    const double tau = solve_dynamic_negishi(e, fixed).tau;
    EXPECT_NEAR(tau, solve_negishi_static(toy_static(0.125, 0.375)).tauN, 1e-8);
    EXPECT_NEAR(tau, 1.5, 1e-8);  // tau = 0.5 * 2 (0.25 + 0.75)(3 - tau)
}

TEST(DynamicNegishi, FullyDiscountedFutureMeansZeroPrice) {
    auto e = toy_dynamic(0.25, 0.75, std::numeric_limits<double>::infinity());
    EXPECT_EQ(solve_dynamic_negishi(e).tau, 0.0);
}

TEST(DynamicNegishi, PriceIncreasesWithV) {
    const auto e = toy_dynamic(0.25, 0.75, 0.01);
    double prev = 0.0;
    for (double v : {0.2, 0.5, 1.0, 1.5}) {
        DynamicOptions opt;
        opt.fixedV = v;
        const double tau = solve_dynamic_negishi(e, opt).tau;
        EXPECT_GT(tau, prev);
        prev = tau;
    }
}

TEST(DynamicUtilitarian, CollapsesToStaticUtilitarian) {
    auto e = toy_dynamic(0.25, 0.75, 0.0);
    e.north.endowmentPerCapita1 = 40.0;
    e.south.endowmentPerCapita1 = 10.0;
    auto s = toy_static(0.25, 0.75, 40.0, 10.0);
    // static consumption nets damage and cost together; the two-period model
    // separates them, so compare under linear utility where that is immaterial
    e.utility.eta = 0.0;
    s.utility.eta = 0.0;
    EXPECT_NEAR(solve_dynamic_utilitarian_uniform(e).tau, solve_utilitarian_uniform_static(s).tauN, 1e-8);
}

TEST(DynamicUtilitarian, SymmetricEqualsNegishi) {
    auto e = toy_dynamic(0.5, 0.5, 0.02);
    e.north.populationGrowth = e.south.populationGrowth = 1.4;
    e.north.endowmentGrowth = e.south.endowmentGrowth = 2.0;
    const auto rep = check_proposition4(e);
    EXPECT_NEAR(rep.utilitarian.tau, rep.negishi.tau, 1e-9);
    EXPECT_EQ(rep.prop4.verdict, Verdict::Coincide);
}

TEST(Proposition4, FasterSouthPopulationGrowthRaisesUtilitarianPrice) {
    EconomyDynamic e;
    e.utility.eta = 1.5;
    e.rho = 0.015;
    const auto make = [&](const char* name, double L, double w, double gL) {
        RegionDynamic r{name, L, w, std::pow(1.0 + gL, 50.0), std::pow(1.02, 50.0), {}, {}};
        r.cost1 = {1.0 / r.endowment1(), 0.0, 0.0};
        r.damage2 = QuadraticDamage{0.0, 0.01, 1e-4, 1.0}.scaled(r.endowment2());
        return r;
    };
    e.north = make("north", 1.0, 3.2, 0.0);
    e.south = make("south", 3.7, 1.0, 0.02);
    e.pi = e.endowment_share_north2();
    const auto rep = check_proposition4(e);
    EXPECT_GT(rep.left, rep.right);
    EXPECT_GT(rep.utilitarian.tau, rep.negishi.tau);
    EXPECT_EQ(rep.prop4.verdict, Verdict::Pass);
}

TEST(Proposition4, SmallSweepHasNoFailures) {
    const auto sweep = run_dynamic_sweep(100, 3, 1e-6);
    EXPECT_EQ(sweep.counts.fail, 0);
    EXPECT_EQ(sweep.solverFailures, 0);
    EXPECT_GT(sweep.counts.pass, 90);
}

TEST(RatioApproxDynamic, TableCells) {
    EXPECT_NEAR(ratio_approx_dynamic(3.7, 1 / 3.2, 1.0, 1.0, 0.01, 0.0, 0.02, 0.02, 50, 1.0), 1.12, 0.005);
    EXPECT_NEAR(ratio_approx_dynamic(3.7, 1 / 3.2, 2.0, 1.0, 0.02, 0.0, 0.04, 0.02, 50, 1.5), 1.18, 0.005);
    EXPECT_NEAR(ratio_approx_dynamic(3.7, 1 / 3.2, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 50, 1.0), 1.16, 0.005);
}

TEST(RatioApproxDynamic, ZeroGrowthMatchesStatic) {
    for (double eta : {0.5, 1.0, 1.5, 2.0})
        for (double d : {0.5, 1.0, 2.0})
            for (double c : {0.5, 1.0, 2.0})
                EXPECT_NEAR(ratio_approx_dynamic(3.7, 1 / 3.2, d, c, 0, 0, 0, 0, 50, eta),
                            ratio_approx_static(3.7, 1 / 3.2, d, c, eta), 1e-12);
}

TEST(Tables, FirstDynamicRowEqualsStaticPanelA) {
    const auto t1 = table1_cells();
    const auto t2 = table2_cells();
    for (const auto& c2 : t2) {
        if (c2.panel != "A" || c2.row.rfind("gL_S=0%", 0) != 0) continue;
        for (const auto& c1 : t1)
            if (c1.panel == "A" && c1.row == "c''_N/c''_S=1" && c1.eta == c2.eta && c1.damageRatio == c2.damageRatio)
                EXPECT_EQ(format2(c1.value), format2(c2.value));
    }
}
