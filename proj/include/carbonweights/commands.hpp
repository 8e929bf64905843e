#pragma once

// Command implementations behind the command-line front end. Each command
// writes delimiter-separated files into the output directory and a short
// human-readable summary to `out`, and returns a process exit code.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "carbonweights/calibration.hpp"
#include "carbonweights/comparison.hpp"
#include "carbonweights/dynamic_solver.hpp"
#include "carbonweights/iam.hpp"
#include "carbonweights/scenario_io.hpp"
#include "carbonweights/static_props.hpp"
#include "carbonweights/tables.hpp"

namespace cw {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitSolver = 3,
    kExitProposition = 4,
};

struct RunSpec {
    std::string command;
    std::string scenario;  // empty: built-in default for the command
    std::string outDir = ".";
    std::uint64_t seed = 1;
    std::optional<double> eta;
    std::optional<double> rho;
    int count = 1000;
    double band = 1e-6;
    std::vector<std::string> regimes;
    std::vector<std::string> overrides;
    int pulsePeriod = -1;  // -1: the 2025 period
    double pulseSize = 1.0;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"table1",    "table2",      "static-solve",     "dynamic-solve",
                                                "props-sweep", "iam-run",   "iam-compare",      "preferred-prices",
                                                "wecc",      "pulse"};
    return names;
}

// ---- built-in scenarios ------------------------------------------------------

/// Two regions with C_i = A_i^2 and D_i = delta_i (3 - A)^2, delta = 0.25 / 0.75.
inline EconomyStatic default_static_economy() {
    EconomyStatic e;
    e.north = {"north", 1.0, 100.0, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.25, 3.0}};
    e.south = {"south", 1.0, 100.0, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.75, 3.0}};
    e.utility.eta = 1.0;
    return e;
}

/// Ratios of the dynamic table defaults. Damages scale with the period-2
/// endowment and costs with abatement relative to the period-1 endowment.
inline EconomyDynamic default_dynamic_economy() {
    EconomyDynamic e;
    e.utility.eta = 1.5;
    e.rho = 0.015;
    e.years = 50.0;
    const auto make = [&](const char* name, double L, double w, double gL, double gw) {
        RegionDynamic r;
        r.name = name;
        r.population1 = L;
        r.endowmentPerCapita1 = w;
        r.populationGrowth = std::pow(1.0 + gL, e.years);
        r.endowmentGrowth = std::pow(1.0 + gw, e.years);
        r.cost1 = {1.0 / r.endowment1(), 0.0, 0.0};
        r.damage2 = QuadraticDamage{0.0, 0.01, 0.01, 1.0}.scaled(r.endowment2());
        return r;
    };
    e.north = make("north", 1.0, 3.2, 0.0, 0.02);
    e.south = make("south", 3.7, 1.0, 0.02, 0.02);
    e.pi = e.endowment_share_north2();
    return e;
}

namespace detail {

inline std::vector<std::string> all_overrides(const RunSpec& spec) {
    std::vector<std::string> o;
    std::ostringstream v;
    v.precision(17);
    if (spec.eta) {
        v << "eta=" << *spec.eta;
        o.push_back(v.str());
        v.str("");
    }
    if (spec.rho) {
        v << "rho=" << *spec.rho;
        o.push_back(v.str());
    }
    o.insert(o.end(), spec.overrides.begin(), spec.overrides.end());
    return o;
}

inline Json scenario_doc(const RunSpec& spec, const Json& fallback) {
    if (!spec.scenario.empty()) return load_scenario(spec.scenario, all_overrides(spec));
    Json doc = fallback;
    for (const auto& o : all_overrides(spec)) apply_override(doc, o);
    return doc;
}

inline EconomyStatic static_from_spec(const RunSpec& spec) {
    return static_economy_from_json(scenario_doc(spec, to_json(default_static_economy())));
}

inline EconomyDynamic dynamic_from_spec(const RunSpec& spec) {
    Json fallback = to_json(default_dynamic_economy());
    fallback["pi"] = nullptr;
    return dynamic_economy_from_json(scenario_doc(spec, fallback));
}

inline IamScenario iam_from_spec(const RunSpec& spec) {
    return iam_scenario_from_json(scenario_doc(spec, to_json(synthetic4_scenario())));
}

inline OptimizerConfig optimizer_from_spec(const RunSpec& spec) {
    OptimizerConfig cfg;
    cfg.seed = spec.seed;
    return cfg;
}

inline std::ofstream open_out(const RunSpec& spec, const std::string& file) {
    std::filesystem::create_directories(spec.outDir);
    const auto path = std::filesystem::path(spec.outDir) / file;
    std::ofstream os(path);
    if (!os) throw ParseError("cannot write '" + path.string() + "'");
    os.precision(12);
    return os;
}

inline std::vector<std::string> regimes_or(const RunSpec& spec, std::vector<std::string> fallback) {
    return spec.regimes.empty() ? fallback : spec.regimes;
}

inline void price_row(std::ostream& os, const PriceSolution& s) {
    os << to_string(s.regime);
    if (s.preferredBy) os << '-' << (*s.preferredBy == Side::North ? "north" : "south");
    os << ',' << s.tauN << ',' << s.tauS << ',' << s.abatementN << ',' << s.abatementS << ',' << s.xN << ','
       << s.xS << ',' << s.weights.north << ',' << s.weights.south << ',' << s.iterations << ',' << s.residual
       << ',' << (s.multipleSolutions ? 1 : 0) << ',' << (s.northRicher ? 1 : 0) << '\n';
}

}  // namespace detail

// ---- commands ------------------------------------------------------------------

inline int cmd_table1(const RunSpec& spec, std::ostream& out) {
    const auto cells = table1_cells();
    auto csv = detail::open_out(spec, "table1.csv");
    write_table_csv(csv, cells);
    out << "Utilitarian / Negishi uniform price ratio, static (d'_S/d'_N = 0.5 1 2 for eta = 1 | eta = 1.5)\n";
    write_table_text(out, cells, 3);
    return kExitOk;
}

inline int cmd_table2(const RunSpec& spec, std::ostream& out) {
    const auto cells = table2_cells();
    auto csv = detail::open_out(spec, "table2.csv");
    write_table_csv(csv, cells);
    out << "Utilitarian / Negishi uniform price ratio, two periods 50 years apart (d'_S2/d'_N2 = 1 2 for eta = 1 | "
           "eta = 1.5)\n";
    write_table_text(out, cells, 2);
    return kExitOk;
}

inline int cmd_static_solve(const RunSpec& spec, std::ostream& out) {
    const auto econ = detail::static_from_spec(spec);
    const auto regimes = detail::regimes_or(
        spec, {"negishi", "utilitarian-uniform", "utilitarian-differentiated", "preferred-north", "preferred-south"});
    auto csv = detail::open_out(spec, "static_solution.csv");
    csv << "regime,tau_N[money/emissions],tau_S[money/emissions],A_N[emissions],A_S[emissions],"
           "x_N[money/person],x_S[money/person],weight_N,weight_S,iterations,residual,multiple,north_richer\n";
    out << std::setprecision(8);
    for (const auto& r : regimes) {
        PriceSolution s;
        if (r == "negishi") s = solve_negishi_static(econ);
        else if (r == "utilitarian-uniform") s = solve_utilitarian_uniform_static(econ);
        else if (r == "utilitarian-differentiated") s = solve_utilitarian_differentiated_static(econ);
        else if (r == "preferred-north") s = solve_preferred_static(econ, Side::North);
        else if (r == "preferred-south") s = solve_preferred_static(econ, Side::South);
        else throw ParseError("unknown static regime '" + r + "'");
        detail::price_row(csv, s);
        out << std::left << std::setw(28) << r << " tau_N=" << s.tauN << " tau_S=" << s.tauS << " A=" << s.global_abatement()
            << (s.northRicher ? "" : "  [x_N <= x_S]") << (s.multipleSolutions ? "  [multiple roots]" : "") << '\n';
    }
    return kExitOk;
}

inline int cmd_dynamic_solve(const RunSpec& spec, std::ostream& out) {
    const auto econ = detail::dynamic_from_spec(spec);
    const auto rep = check_proposition4(econ, {}, spec.band);
    auto csv = detail::open_out(spec, "dynamic_solution.csv");
    csv << "regime,tau[money/emissions],A_N[emissions],A_S[emissions],x_N1,x_S1,x_N2,x_S2,v,iterations,residual\n";
    for (const auto* s : {&rep.negishi, &rep.utilitarian})
        csv << to_string(s->regime) << ',' << s->tau << ',' << s->abatementN << ',' << s->abatementS << ','
            << s->x1[0] << ',' << s->x1[1] << ',' << s->x2[0] << ',' << s->x2[1] << ',' << s->v << ','
            << s->iterations << ',' << s->residual << '\n';
    out << std::setprecision(8) << "beta=" << econ.beta() << " pi=" << econ.pi << '\n'
        << "negishi             tau=" << rep.negishi.tau << " v=" << rep.negishi.v << '\n'
        << "utilitarian-uniform tau=" << rep.utilitarian.tau << '\n'
        << "ratio=" << rep.utilitarian.tau / rep.negishi.tau << " left=" << rep.left << " right=" << rep.right
        << " verdict=" << to_string(rep.prop4.verdict) << '\n';
    return rep.prop4.verdict == Verdict::Fail ? kExitProposition : kExitOk;
}

inline int cmd_props_sweep(const RunSpec& spec, std::ostream& out) {
    if (spec.count < 1) throw ParseError("--count must be >= 1");
    const auto st = run_static_sweep(spec.count, spec.seed, spec.band);
    const auto dy = run_dynamic_sweep(spec.count, spec.seed, spec.band);
    {
        auto csv = detail::open_out(spec, "props_static.csv");
        write_static_sweep_csv(csv, st);
        auto dcsv = detail::open_out(spec, "props_dynamic.csv");
        write_dynamic_sweep_csv(dcsv, dy);
    }
    auto summary = detail::open_out(spec, "props_summary.csv");
    summary << "check,pass,fail,indeterminate,coincide,skipped,indeterminate_fraction\n";
    out << "instances=" << spec.count << " seed=" << spec.seed << " band=" << spec.band << '\n';
    int failures = 0;
    const auto line = [&](const std::string& name, const SweepCounts& c) {
        const double frac = c.total() ? static_cast<double>(c.indeterminate) / c.total() : 0.0;
        summary << name << ',' << c.pass << ',' << c.fail << ',' << c.indeterminate << ',' << c.coincide << ','
                << c.skipped << ',' << frac << '\n';
        out << std::left << std::setw(12) << name << " pass=" << c.pass << " fail=" << c.fail
            << " indeterminate=" << c.indeterminate << " coincide=" << c.coincide << " skipped=" << c.skipped << '\n';
        failures += c.fail;
    };
    for (const auto& [name, c] : st.counts) line(name, c);
    line("prop4", dy.counts);
    out << "static: rejected samples=" << st.rejectedSamples << " solver failures=" << st.solverFailures << '\n'
        << "dynamic: rejected samples=" << dy.rejectedSamples << " solver failures=" << dy.solverFailures << '\n';
    return failures > 0 ? kExitProposition : kExitOk;
}

namespace detail {

inline void write_comparison(const RunSpec& spec, const IamScenario& s, const Comparison& cmp, std::ostream& out,
                             bool withAccounting) {
    const std::size_t ref = reference_period(s);
    auto summary = open_out(spec, "iam_summary.csv");
    summary << "regime,status,peak_temperature[degC],cumulative_emissions[emissions],welfare_utilitarian[util],"
               "welfare_negishi[util],evals,converged\n";
    auto prices = open_out(spec, "iam_prices.csv");
    prices << "regime,region,period,year,price[money/emissions],mu[-]\n";
    auto emissions = open_out(spec, "iam_emissions.csv");
    emissions << "regime,period,year,total_emissions[emissions/yr],cumulative_emissions[emissions],temperature[degC]\n";
    out << std::setprecision(6);
    for (const auto& run : cmp.runs) {
        if (!run.outcome) {
            summary << run.regime << ",failed,,,,,,\n";
            out << run.regime << ": FAILED (" << run.error << ")\n";
            continue;
        }
        const auto& tr = run.outcome->trajectory;
        summary << run.regime << ",ok," << tr.peak_temperature() << ',' << tr.cumulative_emissions() << ','
                << run.welfareUtilitarian << ',' << run.welfareNegishi << ',' << run.outcome->opt.evals << ','
                << (run.outcome->opt.converged ? 1 : 0) << '\n';
        for (std::size_t i = 0; i < tr.regions; ++i)
            for (std::size_t t = 0; t < tr.periods; ++t)
                prices << run.regime << ',' << s.regions[i].name << ',' << t << ',' << s.year(t) << ','
                       << tr.price[tr.at(i, t)] << ',' << tr.mu[tr.at(i, t)] << '\n';
        for (std::size_t t = 0; t < tr.periods; ++t)
            emissions << run.regime << ',' << t << ',' << s.year(t) << ',' << tr.totalEmissions[t] << ','
                      << tr.cumulativeEmissions[t] << ',' << tr.temperature[t] << '\n';
        auto traj = open_out(spec, "trajectory_" + run.regime + ".csv");
        write_trajectory_csv(traj, tr, s);

        out << run.regime << ": peak " << tr.peak_temperature() << " degC, cumulative emissions "
            << tr.cumulative_emissions() << ", W_U " << run.welfareUtilitarian << ", W_N " << run.welfareNegishi
            << "\n  " << s.year(ref) << " prices:";
        for (std::size_t i = 0; i < tr.regions; ++i) out << ' ' << s.regions[i].name << '=' << tr.price[tr.at(i, ref)];
        out << '\n';
    }
    if (!withAccounting) return;

    const RegimeRun* neg = cmp.find("negishi");
    auto wecc = open_out(spec, "iam_wecc.csv");
    wecc << "regime,scope,region,delta_pv[util],delta_X0[money],delta_X0_share[-],unbounded\n";
    if (neg) {
        const auto& base = neg->outcome->trajectory;
        for (const auto& run : cmp.runs) {
            if (!run.outcome || run.regime == "negishi") continue;
            const auto& tr = run.outcome->trajectory;
            for (std::size_t i = 0; i < s.region_count(); ++i) {
                const auto w = welfare_equivalent_consumption_change(tr, base, s, WeccScope::Region, i);
                wecc << run.regime << ",region," << s.regions[i].name << ',' << w.deltaPV << ',' << w.deltaX << ','
                     << w.deltaX / base.consumption[base.at(i, 0)] << ',' << (w.unbounded ? 1 : 0) << '\n';
            }
            const auto g = welfare_equivalent_consumption_change(tr, base, s, WeccScope::GlobalEqual);
            double total0 = 0.0;
            for (std::size_t i = 0; i < s.region_count(); ++i) total0 += base.consumption[base.at(i, 0)];
            wecc << run.regime << ",global,all," << g.deltaPV << ',' << g.deltaX << ',' << g.deltaX / total0 << ','
                 << (g.unbounded ? 1 : 0) << '\n';
            out << "WECC " << run.regime << " vs negishi (global, equal distribution): " << g.deltaX << " ("
                << 100.0 * g.deltaX / total0 << "% of period-0 consumption)\n";
        }
    }

    const std::size_t period = spec.pulsePeriod >= 0 ? static_cast<std::size_t>(spec.pulsePeriod) : ref;
    auto pulse = open_out(spec, "iam_pulse.csv");
    pulse << "regime,pulse_year,region,marginal_damage_pv[money/emissions]\n";
    for (const auto& run : cmp.runs) {
        if (!run.outcome) continue;
        const auto md = marginal_damage_pulse(s, run.outcome->policy, period, spec.pulseSize);
        for (std::size_t i = 0; i < md.size(); ++i)
            pulse << run.regime << ',' << s.year(period) << ',' << s.regions[i].name << ',' << md[i] << '\n';
    }
}

}  // namespace detail

inline int cmd_iam_run(const RunSpec& spec, std::ostream& out) {
    const auto s = detail::iam_from_spec(spec);
    const auto cmp = compare_regimes(s, detail::regimes_or(spec, {"utilitarian-uniform"}), detail::optimizer_from_spec(spec));
    detail::write_comparison(spec, s, cmp, out, false);
    for (const auto& r : cmp.runs)
        if (!r.outcome) return kExitSolver;
    return kExitOk;
}

inline int cmd_iam_compare(const RunSpec& spec, std::ostream& out) {
    const auto s = detail::iam_from_spec(spec);
    const auto cmp = compare_regimes(s, detail::regimes_or(spec, iam_regime_names()), detail::optimizer_from_spec(spec));
    detail::write_comparison(spec, s, cmp, out, true);
    for (const auto& r : cmp.runs)
        if (!r.outcome) return kExitSolver;
    return kExitOk;
}

inline int cmd_preferred_prices(const RunSpec& spec, std::ostream& out) {
    const auto s = detail::iam_from_spec(spec);
    const auto cfg = detail::optimizer_from_spec(spec);
    const auto pref = preferred_uniform_prices(s, cfg);
    const std::size_t ref = reference_period(s);
    auto csv = detail::open_out(spec, "preferred_prices.csv");
    csv << "region,period,year,preferred_price[money/emissions]\n";
    out << std::setprecision(6) << "Preferred uniform prices in " << s.year(ref) << ":\n";
    for (std::size_t i = 0; i < s.region_count(); ++i) {
        const auto& p = pref.byRegion[i].policy.rates;
        for (std::size_t t = 0; t < s.periods(); ++t)
            csv << s.regions[i].name << ',' << t << ',' << s.year(t) << ',' << p[t] << '\n';
        out << "  " << std::left << std::setw(14) << s.regions[i].name << ' ' << p[ref] << '\n';
    }
    return kExitOk;
}

inline int cmd_wecc(const RunSpec& spec, std::ostream& out) {
    const auto s = detail::iam_from_spec(spec);
    auto regimes = detail::regimes_or(spec, {"utilitarian-uniform", "negishi"});
    if (regimes.size() != 2) throw ParseError("wecc needs exactly two regimes: <target>,<baseline>");
    const auto cmp = compare_regimes(s, regimes, detail::optimizer_from_spec(spec));
    const RegimeRun* a = cmp.find(regimes[0]);
    const RegimeRun* b = cmp.find(regimes[1]);
    if (!a || !b) return kExitSolver;
    const auto& ta = a->outcome->trajectory;
    const auto& tb = b->outcome->trajectory;
    auto csv = detail::open_out(spec, "wecc.csv");
    csv << "scope,region,delta_pv[util],counterfactual_x0[money/person],delta_X0[money],unbounded\n";
    out << std::setprecision(6) << "WECC of " << regimes[0] << " relative to " << regimes[1] << ":\n";
    for (std::size_t i = 0; i < s.region_count(); ++i) {
        const auto w = welfare_equivalent_consumption_change(ta, tb, s, WeccScope::Region, i);
        csv << "region," << s.regions[i].name << ',' << w.deltaPV << ',' << w.counterfactual << ',' << w.deltaX << ','
            << (w.unbounded ? 1 : 0) << '\n';
        out << "  " << std::left << std::setw(14) << s.regions[i].name << ' ' << w.deltaX << '\n';
    }
    const auto g = welfare_equivalent_consumption_change(ta, tb, s, WeccScope::GlobalEqual);
    csv << "global,all," << g.deltaPV << ',' << g.counterfactual << ',' << g.deltaX << ',' << (g.unbounded ? 1 : 0) << '\n';
    out << "  " << std::left << std::setw(14) << "global" << ' ' << g.deltaX << '\n';
    return kExitOk;
}

inline int cmd_pulse(const RunSpec& spec, std::ostream& out) {
    const auto s = detail::iam_from_spec(spec);
    auto regimes = detail::regimes_or(spec, {"negishi"});
    const auto cmp = compare_regimes(s, regimes, detail::optimizer_from_spec(spec));
    const std::size_t period =
        spec.pulsePeriod >= 0 ? static_cast<std::size_t>(spec.pulsePeriod) : reference_period(s);
    auto csv = detail::open_out(spec, "pulse.csv");
    csv << "regime,pulse_year,region,marginal_damage_pv[money/emissions]\n";
    out << std::setprecision(6);
    for (const auto& run : cmp.runs) {
        if (!run.outcome) return kExitSolver;
        const auto md = marginal_damage_pulse(s, run.outcome->policy, period, spec.pulseSize);
        out << run.regime << ", pulse in " << s.year(period) << ":\n";
        for (std::size_t i = 0; i < md.size(); ++i) {
            csv << run.regime << ',' << s.year(period) << ',' << s.regions[i].name << ',' << md[i] << '\n';
            out << "  " << std::left << std::setw(14) << s.regions[i].name << ' ' << md[i] << '\n';
        }
    }
    return kExitOk;
}

/// Dispatches `spec.command`, mapping library errors to exit codes.
inline int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        const auto& c = spec.command;
        if (c == "table1") return cmd_table1(spec, out);
        if (c == "table2") return cmd_table2(spec, out);
        if (c == "static-solve") return cmd_static_solve(spec, out);
        if (c == "dynamic-solve") return cmd_dynamic_solve(spec, out);
        if (c == "props-sweep") return cmd_props_sweep(spec, out);
        if (c == "iam-run") return cmd_iam_run(spec, out);
        if (c == "iam-compare") return cmd_iam_compare(spec, out);
        if (c == "preferred-prices") return cmd_preferred_prices(spec, out);
        if (c == "wecc") return cmd_wecc(spec, out);
        if (c == "pulse") return cmd_pulse(spec, out);
        throw ParseError("unknown command '" + c + "'");
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitParse;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }
}

}  // namespace cw
