#pragma once

// Randomised verification of the static comparative results: every
// proposition is evaluated as a biconditional (or ordering) between solver
// outputs and an analytic discriminant, with a relative tie band inside which
// strict inequalities are reported as indeterminate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "carbonweights/econ.hpp"
#include "carbonweights/random.hpp"
#include "carbonweights/static_solver.hpp"

namespace cw {

enum class Verdict { Pass, Fail, Indeterminate, Coincide, Skipped };

inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Indeterminate: return "indeterminate";
        case Verdict::Coincide: return "coincide";
        case Verdict::Skipped: return "skipped";
    }
    return "?";
}

struct PropositionCheck {
    std::string name;
    Verdict verdict = Verdict::Skipped;
    double outcome = 0.0;       // signed solver-side quantity
    double discriminant = 0.0;  // signed analytic-side quantity
};

struct StaticReport {
    PriceSolution negishi;
    PriceSolution utilitarianUniform;
    PriceSolution utilitarianDifferentiated;
    PriceSolution preferredNorth;
    PriceSolution preferredSouth;
    std::vector<PropositionCheck> checks;  // prop1, corollary1, lemma1, prop2, lemma2, prop3
    bool coincide = false;

    const PropositionCheck& check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw DomainError("unknown proposition '" + name + "'");
    }
};

inline bool within_band(double diff, double scale, double band) {
    return std::abs(diff) <= band * std::max(std::abs(scale), 1e-300);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

namespace detail {

inline Verdict biconditional(double outcome, double outcomeScale, double disc, double discScale,
                             double band) {
    if (within_band(outcome, outcomeScale, band) || within_band(disc, discScale, band))
        return Verdict::Indeterminate;
    return sign_of(outcome) == sign_of(disc) ? Verdict::Pass : Verdict::Fail;
}

}  // namespace detail

inline StaticReport check_static_propositions(const EconomyStatic& econ, const SolverOptions& opt = {},
                                              double band = 1e-6) {
    if (!(band > 0.0)) throw DomainError("tie band must be > 0");
    StaticReport rep;
    rep.negishi = solve_negishi_static(econ, opt);
    rep.utilitarianUniform = solve_utilitarian_uniform_static(econ, opt);
    rep.utilitarianDifferentiated = solve_utilitarian_differentiated_static(econ, opt);
    rep.preferredNorth = solve_preferred_static(econ, Side::North, opt);
    rep.preferredSouth = solve_preferred_static(econ, Side::South, opt);

    const double tN = rep.negishi.tauN;
    const double tU = rep.utilitarianUniform.tauN;
    const double tDN = rep.utilitarianDifferentiated.tauN;
    const double tDS = rep.utilitarianDifferentiated.tauS;
    const double tPN = rep.preferredNorth.tauN;
    const double tPS = rep.preferredSouth.tauN;
    const std::array<double, 6> prices{tN, tU, tDN, tDS, tPN, tPS};
    const auto [pmin, pmax] = std::minmax_element(prices.begin(), prices.end());
    rep.coincide = (*pmax - *pmin) <= 10.0 * opt.tol * std::max(1.0, *pmax);

    const double cN = econ.north.cost.curvature(), cS = econ.south.cost.curvature();
    const double costRatio = cN / cS;  // C''_N / C''_S
    const auto& u = econ.utility;

    auto push = [&](std::string name, Verdict v, double outcome, double disc) {
        if (rep.coincide) v = Verdict::Coincide;
        rep.checks.push_back({std::move(name), v, outcome, disc});
    };

    // Utilitarian uniform vs Negishi: sign(tU - tN) = sign(D'_S/D'_N - C''_N/C''_S).
    const double aU = rep.utilitarianUniform.global_abatement();
    const double dS_U = econ.south.damage.marginal(aU), dN_U = econ.north.damage.marginal(aU);
    const bool uniformOrdered = rep.utilitarianUniform.northRicher;
    {
        const double disc = dS_U / dN_U - costRatio;
        const Verdict v = uniformOrdered ? detail::biconditional(tU - tN, std::max(tU, tN), disc,
                                                                 std::max(dS_U / dN_U, costRatio), band)
                                         : Verdict::Skipped;
        push("prop1", v, tU - tN, disc);
    }
    // Benefit/cost ratios of raising the uniform price straddle one.
    {
        const double sumInv = 1.0 / cN + 1.0 / cS;
        const double rS = (-dS_U * sumInv) / (tU / cS);
        const double rN = (-dN_U * sumInv) / (tU / cN);
        Verdict v = Verdict::Skipped;
        if (uniformOrdered) {
            if (within_band(tU - tN, std::max(tU, tN), band) || within_band(rS - 1.0, 1.0, band) ||
                within_band(rN - 1.0, 1.0, band))
                v = Verdict::Indeterminate;
            else if (tU > tN)
                v = (rS > 1.0 && rN < 1.0) ? Verdict::Pass : Verdict::Fail;
            else
                v = (rS < 1.0 && rN > 1.0) ? Verdict::Pass : Verdict::Fail;
        }
        push("corollary1", v, tU - tN, rS - rN);
    }
    // Differentiated prices bracket the Negishi price.
    const bool diffOrdered = rep.utilitarianDifferentiated.northRicher;
    {
        Verdict v = Verdict::Skipped;
        const auto& d = rep.utilitarianDifferentiated;
        const auto& n = rep.negishi;
        if (diffOrdered) {
            const std::array<double, 4> gaps{tN - tDS, tDN - tN, n.abatementS - d.abatementS,
                                             d.abatementN - n.abatementN};
            const std::array<double, 4> scales{std::max(tN, tDS), std::max(tN, tDN),
                                               std::max(n.abatementS, d.abatementS),
                                               std::max(n.abatementN, d.abatementN)};
            bool tie = false, ok = true;
            for (std::size_t i = 0; i < 4; ++i) {
                if (within_band(gaps[i], scales[i], band)) tie = true;
                if (!(gaps[i] > 0.0)) ok = false;
            }
            v = tie ? Verdict::Indeterminate : (ok ? Verdict::Pass : Verdict::Fail);
        }
        push("lemma1", v, tDN - tDS, d.xN - d.xS);
    }
    // Global abatement, differentiated vs Negishi.
    {
        const auto& d = rep.utilitarianDifferentiated;
        const double aD = d.global_abatement(), aN = rep.negishi.global_abatement();
        const double lhs = (u.marginal(d.xS) / u.marginal(d.xN)) *
                           (econ.south.damage.marginal(aD) / econ.north.damage.marginal(aD));
        const double disc = lhs - costRatio;
        const Verdict v = diffOrdered ? detail::biconditional(aD - aN, std::max(aD, aN), disc,
                                                              std::max(lhs, costRatio), band)
                                      : Verdict::Skipped;
        push("prop2", v, aD - aN, disc);
    }
    // Utilitarian and Negishi uniform prices lie strictly between preferred prices.
    {
        const double lo = std::min(tPN, tPS), hi = std::max(tPN, tPS);
        const std::array<double, 4> gaps{tU - lo, hi - tU, tN - lo, hi - tN};
        bool tie = false, ok = true;
        for (double g : gaps) {
            if (within_band(g, hi, band)) tie = true;
            if (!(g > 0.0)) ok = false;
        }
        push("lemma2", tie ? Verdict::Indeterminate : (ok ? Verdict::Pass : Verdict::Fail), hi - lo,
             std::min({gaps[0], gaps[1], gaps[2], gaps[3]}));
    }
    // sign(tU - tN) = sign(preferred_S - preferred_N).
    {
        const Verdict v = uniformOrdered ? detail::biconditional(tU - tN, std::max(tU, tN), tPS - tPN,
                                                                 std::max(tPS, tPN), band)
                                         : Verdict::Skipped;
        push("prop3", v, tU - tN, tPS - tPN);
    }
    return rep;
}

/// Random static economy: log-uniform L and w over one decade, w_N/w_S in
/// [1.1, 10], quadratic per-endowment damages and costs. Baseline emissions 1.
inline EconomyStatic sample_static_economy(Rng& rng) {
    EconomyStatic econ;
    econ.utility.eta = uniform(rng, 0.25, 2.5);
    const double ratio = log_uniform(rng, 1.1, 10.0);
    const double wS = log_uniform(rng, 1.0, 10.0);
    const std::array<double, 2> w{wS * ratio, wS};
    const std::array<const char*, 2> names{"North", "South"};
    for (std::size_t i = 0; i < 2; ++i) {
        RegionStatic r;
        r.name = names[i];
        r.population = log_uniform(rng, 1.0, 10.0);
        r.endowmentPerCapita = w[i];
        const double W = r.endowment();
        const double level = log_uniform(rng, 0.005, 0.1);  // damage share at zero abatement
        const double linearShare = uniform(rng, 0.0, 1.0);
        r.damage = simplified_rice_damage(r.population, r.endowmentPerCapita,
                                          QuadraticDamage{0.0, level * linearShare,
                                                          level * (1.0 - linearShare), 1.0});
        const double fullCost = log_uniform(rng, 0.02, 0.5);  // cost share if abating Ebar alone
        r.cost = QuadraticCost{fullCost * W, 0.0, 0.0};
        (i == 0 ? econ.north : econ.south) = r;
    }
    return econ;
}

struct SweepCounts {
    int pass = 0, fail = 0, indeterminate = 0, coincide = 0, skipped = 0;

    void add(Verdict v) {
        switch (v) {
            case Verdict::Pass: ++pass; break;
            case Verdict::Fail: ++fail; break;
            case Verdict::Indeterminate: ++indeterminate; break;
            case Verdict::Coincide: ++coincide; break;
            case Verdict::Skipped: ++skipped; break;
        }
    }
    int total() const { return pass + fail + indeterminate + coincide + skipped; }
};

struct StaticSweepRow {
    std::uint64_t seed = 0;
    StaticReport report;
};

struct StaticSweep {
    std::vector<StaticSweepRow> rows;
    std::map<std::string, SweepCounts> counts;
    int rejectedSamples = 0;  // no interior optimum, infeasible, or x_N <= x_S
    int solverFailures = 0;

    int failures() const {
        int f = 0;
        for (const auto& [_, c] : counts) f += c.fail;
        return f;
    }
};

/// One accepted economy per index. Instance k draws from derive_seed(seed, k)
/// and resamples until the economy has interior optima with North richer in
/// every regime.
inline StaticSweep run_static_sweep(int count, std::uint64_t seed, double band,
                                    const SolverOptions& opt = {}) {
    if (count < 1) throw DomainError("sweep count must be >= 1");
    StaticSweep sweep;
    for (int k = 0; k < count; ++k) {
        const std::uint64_t instanceSeed = derive_seed(seed, static_cast<std::uint64_t>(k));
        Rng rng(instanceSeed);
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const auto econ = sample_static_economy(rng);
            StaticReport rep;
            try {
                rep = check_static_propositions(econ, opt, band);
            } catch (const NoInteriorOptimum&) {
                ++sweep.rejectedSamples;
                continue;
            } catch (const InfeasibleAllocation&) {
                ++sweep.rejectedSamples;
                continue;
            } catch (const ConvergenceError&) {
                ++sweep.solverFailures;
                continue;
            }
            const bool ordered = rep.negishi.northRicher && rep.utilitarianUniform.northRicher &&
                                 rep.utilitarianDifferentiated.northRicher &&
                                 rep.preferredNorth.northRicher && rep.preferredSouth.northRicher;
            if (!ordered) {
                ++sweep.rejectedSamples;
                continue;
            }
            for (const auto& c : rep.checks) sweep.counts[c.name].add(c.verdict);
            sweep.rows.push_back({instanceSeed, std::move(rep)});
            break;
        }
    }
    return sweep;
}

inline void write_static_sweep_csv(std::ostream& os, const StaticSweep& sweep) {
    os << "seed,tau_negishi,tau_util_uniform,tau_util_diff_N,tau_util_diff_S,tau_pref_N,tau_pref_S";
    if (!sweep.rows.empty())
        for (const auto& c : sweep.rows.front().report.checks)
            os << ',' << c.name << "_outcome," << c.name << "_discriminant," << c.name << "_verdict";
    os << '\n';
    os.precision(12);
    for (const auto& row : sweep.rows) {
        const auto& r = row.report;
        os << row.seed << ',' << r.negishi.tauN << ',' << r.utilitarianUniform.tauN << ','
           << r.utilitarianDifferentiated.tauN << ',' << r.utilitarianDifferentiated.tauS << ','
           << r.preferredNorth.tauN << ',' << r.preferredSouth.tauN;
        for (const auto& c : r.checks)
            os << ',' << c.outcome << ',' << c.discriminant << ',' << to_string(c.verdict);
        os << '\n';
    }
}

}  // namespace cw
