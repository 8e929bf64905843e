#pragma once

// Two-period world: regions abate in period 1 and suffer damages in period 2.
// Uniform prices only, under Negishi (time-variant) and utilitarian weights.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "carbonweights/econ.hpp"
#include "carbonweights/errors.hpp"
#include "carbonweights/random.hpp"
#include "carbonweights/roots.hpp"
#include "carbonweights/static_props.hpp"
#include "carbonweights/static_solver.hpp"

namespace cw {

struct RegionDynamic {
    std::string name;
    double population1 = 1.0;          // L_1
    double endowmentPerCapita1 = 1.0;  // w_1
    double populationGrowth = 1.0;     // L_2 / L_1 over the horizon
    double endowmentGrowth = 1.0;      // w_2 / w_1 over the horizon
    QuadraticCost cost1;
    QuadraticDamage damage2;

    double population2() const noexcept { return population1 * populationGrowth; }
    double endowmentPerCapita2() const noexcept { return endowmentPerCapita1 * endowmentGrowth; }
    double endowment1() const noexcept { return population1 * endowmentPerCapita1; }
    double endowment2() const noexcept { return population2() * endowmentPerCapita2(); }

    void validate() const {
        if (!(population1 > 0.0) || !(endowmentPerCapita1 > 0.0))
            throw DomainError("region '" + name + "': L1 and w1 must be > 0");
        if (!(populationGrowth > 0.0) || !(endowmentGrowth > 0.0) || !std::isfinite(populationGrowth) ||
            !std::isfinite(endowmentGrowth))
            throw DomainError("region '" + name + "': growth factors must be finite and > 0");
        cost1.validate();
        damage2.validate();
    }
};

struct EconomyDynamic {
    RegionDynamic north;
    RegionDynamic south;
    UtilityParams utility;
    double rho = 0.0;     // pure rate of time preference, per year
    double years = 50.0;  // distance between the two periods
    double pi = 0.5;      // North's discounting weight in v

    const RegionDynamic& region(Side s) const noexcept { return s == Side::North ? north : south; }
    double ebar() const noexcept { return north.damage2.ebar; }
    double beta() const { return std::isinf(rho) ? 0.0 : std::pow(1.0 + rho, -years); }

    /// North's share of period-2 endowment, the usual choice of pi.
    double endowment_share_north2() const {
        return north.endowment2() / (north.endowment2() + south.endowment2());
    }

    void validate() const {
        north.validate();
        south.validate();
        utility.validate();
        if (!(rho >= 0.0)) throw DomainError("rho must be >= 0");
        if (!(years > 0.0) || !std::isfinite(years)) throw DomainError("horizon must be > 0 years");
        if (!(pi > 0.0 && pi < 1.0)) throw DomainError("discounting weight pi must lie in (0, 1)");
        if (std::abs(north.damage2.ebar - south.damage2.ebar) > 1e-12 * std::max(1.0, ebar()))
            throw DomainError("both regions' damages must share baseline emissions");
    }
};

struct DynamicAllocation {
    std::array<double, 2> abatement{};
    std::array<double, 2> x1{};  // per-capita consumption, period 1
    std::array<double, 2> x2{};  // per-capita consumption, period 2

    double global() const noexcept { return abatement[0] + abatement[1]; }
};

inline DynamicAllocation dynamic_allocation(const EconomyDynamic& econ, double aN, double aS) {
    DynamicAllocation out;
    out.abatement = {aN, aS};
    const double total = aN + aS;
    if (aN < 0.0 || aS < 0.0 || total > econ.ebar() * (1.0 + 1e-12))
        throw DomainError("abatement outside 0 <= A_i, A <= Ebar");
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        const auto& r = econ.region(s);
        const double X1 = r.endowment1() - r.cost1.value(out.abatement[i]);
        const double X2 = r.endowment2() - r.damage2.value(total);
        if (!(X1 > 0.0)) throw InfeasibleAllocation(r.name, X1);
        if (!(X2 > 0.0)) throw InfeasibleAllocation(r.name, X2);
        out.x1[i] = X1 / r.population1;
        out.x2[i] = X2 / r.population2();
    }
    return out;
}

inline DynamicAllocation dynamic_allocation_at_price(const EconomyDynamic& econ, double tau) {
    return dynamic_allocation(econ, econ.north.cost1.abatement_at_price(tau),
                              econ.south.cost1.abatement_at_price(tau));
}

/// v = pi u'_N2/u'_N1 + (1 - pi) u'_S2/u'_S1.
inline double negishi_discount_factor(double upN1, double upN2, double upS1, double upS2, double pi) {
    for (double u : {upN1, upN2, upS1, upS2})
        if (!(u > 0.0) || !std::isfinite(u))
            throw DomainError("marginal utilities must be finite and > 0");
    return pi * upN2 / upN1 + (1.0 - pi) * upS2 / upS1;
}

inline double negishi_discount_factor(const EconomyDynamic& econ, const DynamicAllocation& a) {
    const auto& u = econ.utility;
    return negishi_discount_factor(u.marginal(a.x1[0]), u.marginal(a.x2[0]), u.marginal(a.x1[1]),
                                   u.marginal(a.x2[1]), econ.pi);
}

struct DynamicOptions : SolverOptions {
    std::optional<double> fixedV;  // hold v fixed instead of solving for it
    double damping = 0.5;          // weight on the previous v in the outer loop
};

struct DynamicSolution {
    Regime regime = Regime::NegishiUniform;
    double tau = 0.0;
    double abatementN = 0.0;
    double abatementS = 0.0;
    std::array<double, 2> x1{};
    std::array<double, 2> x2{};
    double v = 1.0;  // wealth-based discount factor at the solution
    std::array<double, 2> weights1{1.0, 1.0};
    std::array<double, 2> weights2{1.0, 1.0};
    int iterations = 0;
    double residual = 0.0;
    bool multipleSolutions = false;

    double global_abatement() const noexcept { return abatementN + abatementS; }
};

namespace detail {

inline double dynamic_price_cap(const EconomyDynamic& econ) {
    return uniform_price_cap(econ.north.cost1, econ.south.cost1, econ.ebar());
}

inline DynamicSolution finish_dynamic(const EconomyDynamic& econ, Regime regime, double tau) {
    DynamicSolution sol;
    sol.regime = regime;
    sol.tau = tau;
    const auto a = dynamic_allocation_at_price(econ, tau);
    sol.abatementN = a.abatement[0];
    sol.abatementS = a.abatement[1];
    sol.x1 = a.x1;
    sol.x2 = a.x2;
    return sol;
}

}  // namespace detail

/// tau = -v beta sum_i D'_i2(A(tau)) with v evaluated at the solution.
/// Outer damped iteration on v, inner root find on tau.
inline DynamicSolution solve_dynamic_negishi(const EconomyDynamic& econ, const DynamicOptions& opt = {}) {
    econ.validate();
    const double beta = econ.beta();
    const double cap = detail::dynamic_price_cap(econ);
    const auto price_at = [&](double v, int& iters, bool& multiple) {
        const auto residual = [&](double tau) {
            const auto total =
                econ.north.cost1.abatement_at_price(tau) + econ.south.cost1.abatement_at_price(tau);
            return tau + v * beta * (econ.north.damage2.marginal(total) + econ.south.damage2.marginal(total));
        };
        const auto r = find_roots(residual, 0.0, cap, detail::root_xtol(opt.tol), opt.scanPoints,
                                  "dynamic Negishi price");
        iters += r.iterations;
        multiple = multiple || r.roots.size() > 1;
        return r.x;
    };

    int iters = 0;
    bool multiple = false;
    double v = opt.fixedV.value_or(1.0);
    double tau = 0.0;
    std::vector<double> trace;
    if (opt.fixedV) {
        tau = price_at(v, iters, multiple);
    } else {
        v = negishi_discount_factor(econ, dynamic_allocation(econ, 0.0, 0.0));
        bool converged = false;
        for (int it = 0; it < opt.maxIterations; ++it) {
            tau = price_at(v, iters, multiple);
            const double next = negishi_discount_factor(econ, dynamic_allocation_at_price(econ, tau));
            const double change = std::abs(next - v);
            trace.push_back(change);
            if (change <= opt.tol * std::max(1.0, v)) {
                v = next;
                tau = price_at(v, iters, multiple);
                converged = true;
                break;
            }
            v = opt.damping * v + (1.0 - opt.damping) * next;
        }
        if (!converged) throw ConvergenceError("dynamic Negishi discount factor did not converge", trace);
    }

    auto sol = detail::finish_dynamic(econ, Regime::NegishiUniform, tau);
    sol.v = v;
    const auto& u = econ.utility;
    for (std::size_t i = 0; i < 2; ++i) {
        sol.weights1[i] = 1.0 / u.marginal(sol.x1[i]);
        sol.weights2[i] = v / u.marginal(sol.x2[i]);
    }
    const double total = sol.global_abatement();
    sol.residual = std::abs(tau + v * beta *
                                      (econ.north.damage2.marginal(total) + econ.south.damage2.marginal(total)));
    sol.iterations = iters;
    sol.multipleSolutions = multiple;
    return sol;
}

/// Right-hand side of the utilitarian uniform condition at price tau.
inline double dynamic_utilitarian_rhs(const EconomyDynamic& econ, double tau) {
    const auto a = dynamic_allocation_at_price(econ, tau);
    const auto& u = econ.utility;
    const double total = a.global();
    const double cN = econ.north.cost1.curvature(), cS = econ.south.cost1.curvature();
    const double benefit = -(u.marginal(a.x2[0]) * econ.north.damage2.marginal(total) +
                             u.marginal(a.x2[1]) * econ.south.damage2.marginal(total));
    return econ.beta() * benefit * (cS + cN) / (u.marginal(a.x1[0]) * cS + u.marginal(a.x1[1]) * cN);
}

inline double dynamic_utilitarian_welfare(const EconomyDynamic& econ, double tau) {
    const auto a = dynamic_allocation_at_price(econ, tau);
    const auto& u = econ.utility;
    double w = 0.0;
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        const auto& r = econ.region(s);
        w += r.population1 * u.u(a.x1[i]) + econ.beta() * r.population2() * u.u(a.x2[i]);
    }
    return w;
}

inline DynamicSolution solve_dynamic_utilitarian_uniform(const EconomyDynamic& econ,
                                                         const SolverOptions& opt = {}) {
    econ.validate();
    const auto residual = [&](double tau) { return tau - dynamic_utilitarian_rhs(econ, tau); };
    const auto r = find_roots(residual, 0.0, detail::dynamic_price_cap(econ), detail::root_xtol(opt.tol),
                              opt.scanPoints, "dynamic utilitarian price");
    bool multiple = false;
    const double tau = detail::select_root(
        r, opt.tol, [&](double t) { return dynamic_utilitarian_welfare(econ, t); }, multiple);
    auto sol = detail::finish_dynamic(econ, Regime::UtilitarianUniform, tau);
    sol.v = negishi_discount_factor(econ, dynamic_allocation_at_price(econ, tau));
    sol.iterations = r.iterations;
    sol.residual = std::abs(residual(tau));
    sol.multipleSolutions = multiple;
    return sol;
}

/// Approximate dynamic utilitarian-to-Negishi price ratio. Ratios are
/// South/North in period 1 except curvatureRatioNS1 (North/South); growth
/// rates are annual and compound over `years`.
inline double ratio_approx_dynamic(double populationRatioSN1, double endowmentRatioSN1,
                                   double damageRatioSN2, double curvatureRatioNS1, double gLS,
                                   double gLN, double gwS, double gwN, double years, double eta) {
    if (!(populationRatioSN1 > 0.0) || !(endowmentRatioSN1 > 0.0) || !(damageRatioSN2 > 0.0) ||
        !(curvatureRatioNS1 > 0.0))
        throw DomainError("ratio arguments must be > 0");
    if (!(years > 0.0)) throw DomainError("horizon must be > 0 years");
    const double gL = std::pow((1.0 + gLS) / (1.0 + gLN), years);
    const double gw = std::pow((1.0 + gwS) / (1.0 + gwN), years);
    const double L = populationRatioSN1 * gL;
    const double w = endowmentRatioSN1;
    const double discount = (L * w * gw + 1.0) / (L * w * std::pow(gw, 1.0 - eta) + 1.0);
    const double damage = (L * std::pow(w * gw, 1.0 - eta) * damageRatioSN2 + 1.0) /
                          (L * w * gw * damageRatioSN2 + 1.0);
    const double cost = (curvatureRatioNS1 * populationRatioSN1 * w + 1.0) /
                        (std::pow(w, -eta) * curvatureRatioNS1 * populationRatioSN1 * w + 1.0);
    return discount * damage * cost;
}

struct DynamicReport {
    DynamicSolution negishi;
    DynamicSolution utilitarian;
    PropositionCheck prop4;
    double left = 0.0;   // welfare-weighted average of D'_i2 at the utilitarian solution
    double right = 0.0;  // v times the curvature-weighted average of u'_i1
    bool coincide = false;
};

/// Utilitarian exceeds Negishi iff left > right. The v on the right is the
/// Negishi solution's, which makes the biconditional exact.
inline DynamicReport check_proposition4(const EconomyDynamic& econ, const DynamicOptions& opt = {},
                                        double band = 1e-6) {
    if (!(band > 0.0)) throw DomainError("tie band must be > 0");
    DynamicReport rep;
    rep.negishi = solve_dynamic_negishi(econ, opt);
    rep.utilitarian = solve_dynamic_utilitarian_uniform(econ, opt);
    const auto& u = econ.utility;
    const auto& U = rep.utilitarian;
    const double total = U.global_abatement();
    const double dN = econ.north.damage2.marginal(total), dS = econ.south.damage2.marginal(total);
    const double cN = econ.north.cost1.curvature(), cS = econ.south.cost1.curvature();
    rep.left = (u.marginal(U.x2[0]) * dN + u.marginal(U.x2[1]) * dS) / (dN + dS);
    rep.right = rep.negishi.v * (u.marginal(U.x1[0]) * cS + u.marginal(U.x1[1]) * cN) / (cS + cN);

    const double tU = U.tau, tN = rep.negishi.tau;
    rep.coincide = std::abs(tU - tN) <= 10.0 * opt.tol * std::max(1.0, std::max(tU, tN));
    Verdict v = rep.coincide ? Verdict::Coincide
                             : detail::biconditional(tU - tN, std::max(tU, tN), rep.left - rep.right,
                                                     std::max(rep.left, rep.right), band);
    rep.prop4 = {"prop4", v, tU - tN, rep.left - rep.right};
    return rep;
}

/// Random two-period economy. Growth rates are annual over a 50-year horizon
/// and pi is North's period-2 endowment share.
inline EconomyDynamic sample_dynamic_economy(Rng& rng) {
    EconomyDynamic econ;
    econ.utility.eta = uniform(rng, 0.25, 2.5);
    econ.rho = uniform(rng, 0.0, 0.03);
    econ.years = 50.0;
    const double ratio = log_uniform(rng, 1.1, 10.0);
    const double wS = log_uniform(rng, 1.0, 10.0);
    const std::array<double, 2> w{wS * ratio, wS};
    const std::array<const char*, 2> names{"North", "South"};
    for (std::size_t i = 0; i < 2; ++i) {
        RegionDynamic r;
        r.name = names[i];
        r.population1 = log_uniform(rng, 1.0, 10.0);
        r.endowmentPerCapita1 = w[i];
        r.populationGrowth = std::pow(1.0 + uniform(rng, -0.005, 0.025), econ.years);
        r.endowmentGrowth = std::pow(1.0 + uniform(rng, 0.0, 0.04), econ.years);
        const double level = log_uniform(rng, 0.005, 0.1);
        const double linearShare = uniform(rng, 0.0, 1.0);
        r.damage2 = QuadraticDamage{0.0, level * linearShare, level * (1.0 - linearShare), 1.0}.scaled(
            r.endowment2());
        r.cost1 = QuadraticCost{log_uniform(rng, 0.02, 0.5) * r.endowment1(), 0.0, 0.0};
        (i == 0 ? econ.north : econ.south) = r;
    }
    econ.pi = econ.endowment_share_north2();
    return econ;
}

struct DynamicSweepRow {
    std::uint64_t seed = 0;
    DynamicReport report;
};

struct DynamicSweep {
    std::vector<DynamicSweepRow> rows;
    SweepCounts counts;
    int rejectedSamples = 0;
    int solverFailures = 0;
};

inline DynamicSweep run_dynamic_sweep(int count, std::uint64_t seed, double band,
                                      const DynamicOptions& opt = {}) {
    if (count < 1) throw DomainError("sweep count must be >= 1");
    DynamicSweep sweep;
    for (int k = 0; k < count; ++k) {
        const std::uint64_t instanceSeed = derive_seed(seed ^ 0xd1b54a32d192ed03ULL, static_cast<std::uint64_t>(k));
        Rng rng(instanceSeed);
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const auto econ = sample_dynamic_economy(rng);
            try {
                auto rep = check_proposition4(econ, opt, band);
                sweep.counts.add(rep.prop4.verdict);
                sweep.rows.push_back({instanceSeed, std::move(rep)});
                break;
            } catch (const NoInteriorOptimum&) {
                ++sweep.rejectedSamples;
            } catch (const InfeasibleAllocation&) {
                ++sweep.rejectedSamples;
            } catch (const ConvergenceError&) {
                ++sweep.solverFailures;
            }
        }
    }
    return sweep;
}

inline void write_dynamic_sweep_csv(std::ostream& os, const DynamicSweep& sweep) {
    os << "seed,tau_negishi,tau_util_uniform,v,prop4_left,prop4_right,prop4_verdict\n";
    os.precision(12);
    for (const auto& row : sweep.rows) {
        const auto& r = row.report;
        os << row.seed << ',' << r.negishi.tau << ',' << r.utilitarian.tau << ',' << r.negishi.v << ','
           << r.left << ',' << r.right << ',' << to_string(r.prop4.verdict) << '\n';
    }
}

}  // namespace cw
