#pragma once

#include <cmath>
#include <string>

#include "carbonweights/dynamic_solver.hpp"
#include "carbonweights/iam.hpp"
#include "carbonweights/static_solver.hpp"

namespace cwtest {

// C_i = A_i^2, D_i = delta_i (3 - A)^2, large endowments so utility barely bends.
inline cw::EconomyStatic toy_static(double deltaN, double deltaS, double wN = 100.0, double wS = 100.0,
                                    double eta = 1.0) {
    cw::EconomyStatic e;
    e.north = {"north", 1.0, wN, {1.0, 0.0, 0.0}, {0.0, 0.0, deltaN, 3.0}};
    e.south = {"south", 1.0, wS, {1.0, 0.0, 0.0}, {0.0, 0.0, deltaS, 3.0}};
    e.utility.eta = eta;
    return e;
}

// Calibrated to the table ratios: L_S/L_N = 3.7, w_N/w_S = 3.2, per-endowment
// damages with d'_S/d'_N = dRatio, equal per-endowment cost. Damages are close
// to linear and abatement stays small, which is where the ratio approximation
// is meant to hold.
inline cw::EconomyStatic table_static(double dRatio, double eta) {
    cw::EconomyStatic e;
    e.utility.eta = eta;
    const double ebar = 1.0;
    auto region = [&](const char* name, double L, double w, double slope) {
        cw::RegionStatic r;
        r.name = name;
        r.population = L;
        r.endowmentPerCapita = w;
        r.cost = {1.0 / (L * w), 0.0, 0.0};  // C = W c(A / W) with c(a) = a^2
        r.damage = cw::simplified_rice_damage(L, w, cw::QuadraticDamage{0.0, slope, 1e-2 * slope, ebar});
        return r;
    };
    e.north = region("north", 1.0, 3.2, 1e-2);
    e.south = region("south", 3.7, 1.0, 1e-2 * dRatio);
    return e;
}

// Dynamic economy that collapses to toy_static when growth factors are 1.
inline cw::EconomyDynamic toy_dynamic(double deltaN, double deltaS, double rho = 0.0, double years = 50.0) {
    cw::EconomyDynamic e;
    e.north = {"north", 1.0, 100.0, 1.0, 1.0, {1.0, 0.0, 0.0}, {0.0, 0.0, deltaN, 3.0}};
    e.south = {"south", 1.0, 100.0, 1.0, 1.0, {1.0, 0.0, 0.0}, {0.0, 0.0, deltaS, 3.0}};
    e.utility.eta = 1.0;
    e.rho = rho;
    e.years = years;
    e.pi = 0.5;
    return e;
}

inline cw::RegionPath flat_region(const std::string& name, std::size_t T, double L, double Y, double sigma,
                                  double backstop, double a1, double a2) {
    cw::RegionPath r;
    r.name = name;
    r.population.assign(T, L);
    r.grossOutput.assign(T, Y);
    r.sigma.assign(T, sigma);
    r.backstop.assign(T, backstop);
    r.damage = {a1, a2};
    return r;
}

// Small scenario with a rich and a poor region, cheap enough for unit tests.
inline cw::IamScenario two_region_scenario(std::size_t T = 4) {
    cw::IamScenario s;
    s.name = "two-region";
    s.step = 10.0;
    s.T0 = 0.8;
    s.climateSlope = 0.0005;
    s.rho = 0.015;
    s.utility = cw::UtilityParams{1.5};
    s.regions.push_back(flat_region("Rich", T, 1.0, 40.0, 0.4, 0.5, 0.0, 0.002));
    s.regions.push_back(flat_region("Poor", T, 3.0, 6.0, 0.6, 0.5, 0.004, 0.005));
    s.exogenousEmissions.assign(T, 2.0);
    return s;
}

}  // namespace cwtest
