#pragma once

// Bundled synthetic four-region calibration. Twelve ten-year periods from
// 2005. The poorest region has the largest damage coefficients, the fastest
// population growth and catch-up income growth. Units: population in
// billions, output in trillions per year, emissions in Gt per year, prices
// in trillions per Gt.

#include <cmath>
#include <string>

#include "carbonweights/iam.hpp"

namespace cw {

namespace detail {

struct RegionSeed {
    const char* name;
    double population0;
    double populationGrowth0;  // annual, decays towards zero
    double income0;            // gross output per capita
    double incomeGrowth0;      // annual, decays towards 1 percent
    double sigma0;
    double a1, a2;
};

}  // namespace detail

inline IamScenario synthetic4_scenario() {
    IamScenario s;
    s.name = "synthetic4";
    s.startYear = 2005;
    s.step = 10.0;
    s.rho = 0.015;
    s.utility = UtilityParams{1.5};
    s.T0 = 0.8;
    s.climateSlope = 0.00045;
    constexpr std::size_t T = 12;

    const detail::RegionSeed seeds[] = {
        {"HighIncome", 1.0, 0.004, 40.0, 0.015, 0.35, 0.0, 0.0015},
        {"UpperMiddle", 1.5, 0.002, 10.0, 0.035, 0.75, 0.0010, 0.0025},
        {"LowerMiddle", 2.5, 0.010, 4.0, 0.035, 0.55, 0.0020, 0.0035},
        {"LowIncome", 1.0, 0.025, 1.5, 0.030, 0.45, 0.0060, 0.0060},
    };
    for (const auto& seed : seeds) {
        RegionPath r;
        r.name = seed.name;
        r.theta = 2.8;
        r.damage = {seed.a1, seed.a2};
        double L = seed.population0, y = seed.income0, sigma = seed.sigma0;
        for (std::size_t t = 0; t < T; ++t) {
            r.population.push_back(L);
            r.grossOutput.push_back(L * y);
            r.sigma.push_back(sigma);
            // backstop falls from 0.55 towards 0.15 over the horizon
            r.backstop.push_back(0.15 + 0.40 * std::pow(0.9, static_cast<double>(t)));
            const double decay = std::pow(0.85, static_cast<double>(t));
            L *= std::pow(1.0 + seed.populationGrowth0 * decay, s.step);
            y *= std::pow(1.0 + 0.01 + (seed.incomeGrowth0 - 0.01) * decay, s.step);
            sigma *= std::pow(1.0 - 0.01, s.step);
        }
        s.regions.push_back(std::move(r));
    }
    for (std::size_t t = 0; t < T; ++t) s.exogenousEmissions.push_back(5.0 * std::pow(0.8, static_cast<double>(t)));
    return s;
}

}  // namespace cw
