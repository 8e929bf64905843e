#pragma once

// N-region, T-period integrated assessment: exogenous output and population,
// backstop-based abatement cost, quadratic temperature damages and a linear
// cumulative-emissions climate map.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "carbonweights/econ.hpp"
#include "carbonweights/errors.hpp"
#include "carbonweights/optimizer.hpp"

namespace cw {

struct DamageCoefficients {
    double a1 = 0.0;  // fraction of output per degree
    double a2 = 0.0;  // fraction of output per degree squared
};

struct RegionPath {
    std::string name;
    Vec population;   // persons
    Vec grossOutput;  // money per year
    Vec sigma;        // emissions per unit of output
    Vec backstop;     // money per emissions unit
    double theta = 2.8;
    DamageCoefficients damage;

    void validate(std::size_t periods) const {
        for (const Vec* v : {&population, &grossOutput, &sigma, &backstop})
            if (v->size() != periods)
                throw DomainError("region '" + name + "': every path must have one entry per period");
        for (std::size_t t = 0; t < periods; ++t) {
            if (!(population[t] > 0.0) || !(grossOutput[t] > 0.0))
                throw DomainError("region '" + name + "': population and output must be > 0");
            if (!(sigma[t] >= 0.0) || !(backstop[t] > 0.0))
                throw DomainError("region '" + name + "': sigma must be >= 0 and backstop > 0");
        }
        if (!(theta > 1.0)) throw DomainError("region '" + name + "': theta must be > 1");
    }
};

struct IamScenario {
    std::string name = "scenario";
    int startYear = 2005;
    double step = 10.0;  // years per period
    std::vector<RegionPath> regions;
    double climateSlope = 0.0;  // degrees per cumulative emissions unit
    double T0 = 0.0;            // degrees above preindustrial at the start
    double rho = 0.015;
    UtilityParams utility{1.5};
    Vec exogenousEmissions;  // emissions per year not controlled by any region

    std::size_t periods() const { return exogenousEmissions.size(); }
    std::size_t region_count() const { return regions.size(); }
    int year(std::size_t t) const { return startYear + static_cast<int>(std::lround(step * t)); }
    double discount(std::size_t t) const { return std::pow(1.0 + rho, -step * static_cast<double>(t)); }

    std::size_t region_index(const std::string& regionName) const {
        for (std::size_t i = 0; i < regions.size(); ++i)
            if (regions[i].name == regionName) return i;
        throw DomainError("unknown region '" + regionName + "'");
    }

    void validate() const {
        if (regions.empty()) throw DomainError("scenario needs at least one region");
        if (periods() == 0) throw DomainError("scenario needs at least one period");
        if (!(step > 0.0)) throw DomainError("period length must be > 0");
        if (!(climateSlope >= 0.0)) throw DomainError("climate slope must be >= 0");
        if (!(rho >= 0.0)) throw DomainError("rho must be >= 0");
        utility.validate();
        for (const auto& r : regions) r.validate(periods());
    }
};

enum class PolicyMode { Differentiated, Uniform };

inline const char* to_string(PolicyMode m) noexcept {
    return m == PolicyMode::Uniform ? "uniform" : "differentiated";
}

/// Differentiated: control rates, region-major (rates[i * T + t]).
/// Uniform: one carbon price per period shared by every region.
struct PolicyPath {
    PolicyMode mode = PolicyMode::Differentiated;
    Vec rates;

    static PolicyPath constant_rate(const IamScenario& s, double mu) {
        return {PolicyMode::Differentiated, Vec(s.region_count() * s.periods(), mu)};
    }
};

/// Control rate at which a region's marginal abatement cost equals `price`.
inline double control_rate_at_price(const RegionPath& r, std::size_t t, double price) {
    if (price <= 0.0) return 0.0;
    return std::min(1.0, std::pow(price / r.backstop[t], 1.0 / (r.theta - 1.0)));
}

struct Trajectory {
    std::size_t regions = 0;
    std::size_t periods = 0;
    // region-major N x T tables
    Vec mu, consumption, perCapita, emissions, abatement, abatementCost, damage, damageFraction, price;
    Vec floorShortfall;  // relative shortfall below the consumption floor, 0 when above
    // global per period
    Vec totalEmissions, cumulativeEmissions, temperature;
    bool floorHit = false;

    std::size_t at(std::size_t i, std::size_t t) const { return i * periods + t; }
    double peak_temperature() const { return *std::max_element(temperature.begin(), temperature.end()); }
    double cumulative_emissions() const { return cumulativeEmissions.back(); }
};

inline constexpr double kConsumptionFloor = 1e-9;  // share of gross output per capita

inline Trajectory simulate(const IamScenario& s, const PolicyPath& policy, std::size_t pulsePeriod = 0,
                           double pulse = 0.0) {
    const std::size_t N = s.region_count(), T = s.periods();
    if (policy.mode == PolicyMode::Differentiated && policy.rates.size() != N * T)
        throw DomainError("differentiated policy needs regions x periods control rates");
    if (policy.mode == PolicyMode::Uniform && policy.rates.size() != T)
        throw DomainError("uniform policy needs one price per period");

    Trajectory tr;
    tr.regions = N;
    tr.periods = T;
    for (Vec* v : {&tr.mu, &tr.consumption, &tr.perCapita, &tr.emissions, &tr.abatement, &tr.abatementCost,
                   &tr.damage, &tr.damageFraction, &tr.price, &tr.floorShortfall})
        v->assign(N * T, 0.0);
    tr.totalEmissions.assign(T, 0.0);
    tr.cumulativeEmissions.assign(T, 0.0);
    tr.temperature.assign(T, 0.0);

    double cumulative = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        double total = s.exogenousEmissions[t];
        if (t == pulsePeriod) total += pulse / s.step;
        for (std::size_t i = 0; i < N; ++i) {
            const auto& r = s.regions[i];
            const std::size_t k = tr.at(i, t);
            double mu = policy.mode == PolicyMode::Uniform ? control_rate_at_price(r, t, policy.rates[t])
                                                           : policy.rates[k];
            if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("control rates must lie in [0, 1]");
            tr.mu[k] = mu;
            const double baseline = r.sigma[t] * r.grossOutput[t];
            tr.emissions[k] = baseline * (1.0 - mu);
            tr.abatement[k] = baseline * mu;
            tr.abatementCost[k] = r.grossOutput[t] * (r.backstop[t] * r.sigma[t] / r.theta) * std::pow(mu, r.theta);
            tr.price[k] = r.backstop[t] * std::pow(mu, r.theta - 1.0);
            total += tr.emissions[k];
        }
        cumulative += total * s.step;
        tr.totalEmissions[t] = total;
        tr.cumulativeEmissions[t] = cumulative;
        tr.temperature[t] = s.T0 + s.climateSlope * cumulative;
        const double temp = tr.temperature[t];
        for (std::size_t i = 0; i < N; ++i) {
            const auto& r = s.regions[i];
            const std::size_t k = tr.at(i, t);
            const double d = std::min(r.damage.a1 * temp + r.damage.a2 * temp * temp,
                                      1.0 - std::numeric_limits<double>::epsilon());
            tr.damageFraction[k] = d;
            tr.damage[k] = r.grossOutput[t] * d;
            tr.consumption[k] = r.grossOutput[t] * (1.0 - d) - tr.abatementCost[k];
            const double floor = kConsumptionFloor * r.grossOutput[t] / r.population[t];
            double x = tr.consumption[k] / r.population[t];
            if (!(x >= floor)) {
                tr.floorShortfall[k] = (floor - x) / (r.grossOutput[t] / r.population[t]);
                tr.floorHit = true;
                x = floor;
            }
            tr.perCapita[k] = x;
        }
    }
    return tr;
}

enum class SwfKind { Utilitarian, NegishiWeighted, Regional };

struct Swf {
    SwfKind kind = SwfKind::Utilitarian;
    Vec weights;             // N x T, NegishiWeighted only
    std::size_t region = 0;  // Regional only

    static Swf utilitarian() { return {}; }
    static Swf negishi(Vec w) { return {SwfKind::NegishiWeighted, std::move(w), 0}; }
    static Swf regional(std::size_t i) { return {SwfKind::Regional, {}, i}; }
};

inline constexpr double kFloorPenalty = 1e3;

/// Discounted weighted welfare sum_i sum_t L beta^t alpha u(x), minus a
/// quadratic penalty on any consumption-floor shortfall.
inline double evaluate_swf(const Trajectory& tr, const IamScenario& s, const Swf& swf) {
    if (swf.kind == SwfKind::NegishiWeighted && swf.weights.size() != tr.regions * tr.periods)
        throw DomainError("Negishi SWF needs one weight per region-period");
    if (swf.kind != SwfKind::NegishiWeighted && !swf.weights.empty())
        throw DomainError("weights are only accepted by the Negishi-weighted SWF");
    if (swf.kind == SwfKind::Regional && swf.region >= tr.regions) throw DomainError("region index out of range");
    double w = 0.0, penalty = 0.0;
    for (std::size_t i = 0; i < tr.regions; ++i) {
        if (swf.kind == SwfKind::Regional && i != swf.region) continue;
        for (std::size_t t = 0; t < tr.periods; ++t) {
            const std::size_t k = tr.at(i, t);
            const double alpha = swf.kind == SwfKind::NegishiWeighted ? swf.weights[k] : 1.0;
            const double scale = s.regions[i].population[t] * s.discount(t) * alpha;
            w += scale * s.utility.u(tr.perCapita[k]);
            penalty += scale * tr.floorShortfall[k] * tr.floorShortfall[k];
        }
    }
    return w - kFloorPenalty * penalty;
}

/// Weights v_t / u'(x_it). v_t averages the regional wealth-based discount
/// factors u'(x_it)/u'(x_i0) with gross-output shares.
inline Vec negishi_weights_from(const Trajectory& tr, const IamScenario& s) {
    Vec w(tr.regions * tr.periods);
    for (std::size_t t = 0; t < tr.periods; ++t) {
        double output = 0.0, v = 0.0;
        for (const auto& r : s.regions) output += r.grossOutput[t];
        for (std::size_t i = 0; i < tr.regions; ++i)
            v += s.regions[i].grossOutput[t] / output * s.utility.marginal(tr.perCapita[tr.at(i, t)]) /
                 s.utility.marginal(tr.perCapita[tr.at(i, 0)]);
        for (std::size_t i = 0; i < tr.regions; ++i)
            w[tr.at(i, t)] = v / s.utility.marginal(tr.perCapita[tr.at(i, t)]);
    }
    return w;
}

/// Largest relative spread of alpha_it u'(x_it) around its period mean.
inline double negishi_equalization_gap(const Trajectory& tr, const IamScenario& s, const Vec& weights) {
    double gap = 0.0;
    for (std::size_t t = 0; t < tr.periods; ++t) {
        double mean = 0.0;
        for (std::size_t i = 0; i < tr.regions; ++i)
            mean += weights[tr.at(i, t)] * s.utility.marginal(tr.perCapita[tr.at(i, t)]) / tr.regions;
        for (std::size_t i = 0; i < tr.regions; ++i)
            gap = std::max(gap, std::abs(weights[tr.at(i, t)] * s.utility.marginal(tr.perCapita[tr.at(i, t)]) - mean) / mean);
    }
    return gap;
}

struct PolicyOutcome {
    PolicyPath policy;
    Trajectory trajectory;
    OptResult opt;
    double welfare = 0.0;  // under the SWF that was optimised
};

namespace detail {

inline double max_backstop(const IamScenario& s, std::size_t t) {
    double b = 0.0;
    for (const auto& r : s.regions) b = std::max(b, r.backstop[t]);
    return b;
}

inline PolicyPath decode_policy(const IamScenario& s, PolicyMode mode, const Vec& x) {
    PolicyPath p{mode, x};
    if (mode == PolicyMode::Uniform)
        for (std::size_t t = 0; t < s.periods(); ++t) p.rates[t] = x[t] * max_backstop(s, t);
    return p;
}

inline Vec encode_policy(const IamScenario& s, const PolicyPath& p, PolicyMode mode) {
    const std::size_t N = s.region_count(), T = s.periods();
    if (mode == PolicyMode::Uniform) {
        if (p.mode != PolicyMode::Uniform) throw DomainError("cannot start a uniform search from control rates");
        Vec x(T);
        for (std::size_t t = 0; t < T; ++t) x[t] = std::clamp(p.rates[t] / max_backstop(s, t), 0.0, 1.0);
        return x;
    }
    if (p.mode == PolicyMode::Differentiated) return p.rates;
    Vec x(N * T);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t t = 0; t < T; ++t) x[i * T + t] = control_rate_at_price(s.regions[i], t, p.rates[t]);
    return x;
}

}  // namespace detail

/// Maximise the SWF over bounded control rates (differentiated) or over one
/// price per period scaled by the largest backstop (uniform).
inline PolicyOutcome optimize_policy(const IamScenario& s, const Swf& swf, PolicyMode mode,
                                     const OptimizerConfig& cfg = {},
                                     const std::optional<PolicyPath>& warmStart = std::nullopt) {
    s.validate();
    const std::size_t dim = mode == PolicyMode::Uniform ? s.periods() : s.region_count() * s.periods();
    const Vec lower(dim, 0.0), upper(dim, 1.0);
    const Objective objective = [&](const Vec& x) {
        return evaluate_swf(simulate(s, detail::decode_policy(s, mode, x)), s, swf);
    };
    Vec start = warmStart ? detail::encode_policy(s, *warmStart, mode) : Vec(dim, 0.25);
    PolicyOutcome out;
    out.opt = maximize_bounded(objective, lower, upper, cfg, start);
    out.policy = detail::decode_policy(s, mode, out.opt.x);
    out.trajectory = simulate(s, out.policy);
    out.welfare = out.opt.f;
    return out;
}

struct NegishiOutcome {
    Vec weights;
    PolicyOutcome outcome;
    int iterations = 0;
    std::vector<double> changes;  // max relative weight change per iteration
};

/// Fixed point alpha = v_t / u'(x): start from the no-policy trajectory,
/// optimise the weighted SWF, recompute weights, repeat.
inline NegishiOutcome negishi_weights(const IamScenario& s, PolicyMode mode, const OptimizerConfig& cfg = {},
                                      double tol = 1e-6, int maxOuter = 50) {
    s.validate();
    NegishiOutcome res;
    const PolicyPath none = mode == PolicyMode::Uniform ? PolicyPath{PolicyMode::Uniform, Vec(s.periods(), 0.0)}
                                                        : PolicyPath::constant_rate(s, 0.0);
    res.weights = negishi_weights_from(simulate(s, none), s);
    std::optional<PolicyPath> warm;
    for (int it = 1; it <= maxOuter; ++it) {
        auto outcome = optimize_policy(s, Swf::negishi(res.weights), mode, cfg, warm);
        Vec next = negishi_weights_from(outcome.trajectory, s);
        double change = 0.0;
        for (std::size_t k = 0; k < next.size(); ++k)
            change = std::max(change, std::abs(next[k] - res.weights[k]) / std::abs(res.weights[k]));
        res.changes.push_back(change);
        warm = outcome.policy;
        res.outcome = std::move(outcome);
        res.iterations = it;
        if (change <= tol) return res;
        res.weights = std::move(next);
    }
    throw ConvergenceError("Negishi weights did not converge", res.changes);
}

enum class WeccScope { Region, GlobalEqual };

struct WeccResult {
    double deltaPV = 0.0;        // utility units
    double baseline = 0.0;       // per-capita consumption in period 0 of trajectory B
    double counterfactual = 0.0; // x_cf
    double deltaX = 0.0;         // money in period 0
    bool unbounded = false;      // target utility outside the range of u
};

/// Period-0 consumption change in trajectory B that is welfare-equivalent to
/// moving from B to A. Region scope uses region `region`'s own consumer;
/// GlobalEqual uses the world-average period-0 consumer.
inline WeccResult welfare_equivalent_consumption_change(const Trajectory& a, const Trajectory& b,
                                                        const IamScenario& s, WeccScope scope,
                                                        std::size_t region = 0) {
    if (a.regions != b.regions || a.periods != b.periods || a.regions != s.region_count() ||
        a.periods != s.periods())
        throw DomainError("trajectories must share the scenario grid");
    const auto& u = s.utility;
    WeccResult r;
    double population0 = 0.0;
    const auto pv_gap = [&](std::size_t i) {
        double gap = 0.0;
        for (std::size_t t = 0; t < s.periods(); ++t) {
            const double scale = s.regions[i].population[t] * s.discount(t);
            gap += scale * u.u(a.perCapita[a.at(i, t)]) - scale * u.u(b.perCapita[b.at(i, t)]);
        }
        return gap;
    };
    if (scope == WeccScope::Region) {
        if (region >= s.region_count()) throw DomainError("region index out of range");
        r.deltaPV = pv_gap(region);
        population0 = s.regions[region].population[0];
        r.baseline = b.perCapita[b.at(region, 0)];
    } else {
        double consumption0 = 0.0;
        for (std::size_t i = 0; i < s.region_count(); ++i) {
            r.deltaPV += pv_gap(i);
            population0 += s.regions[i].population[0];
            consumption0 += s.regions[i].population[0] * b.perCapita[b.at(i, 0)];
        }
        r.baseline = consumption0 / population0;
    }
    if (r.deltaPV == 0.0) {
        r.counterfactual = r.baseline;
        return r;
    }
    try {
        r.counterfactual = u.inverse(r.deltaPV / population0 + u.u(r.baseline));
    } catch (const DomainError&) {
        r.unbounded = true;
        r.counterfactual = r.deltaPV < 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.deltaX = r.deltaPV < 0.0 ? -std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::infinity();
        return r;
    }
    r.deltaX = population0 * (r.counterfactual - r.baseline);
    return r;
}

/// Present value at the pulse period of each region's consumption loss from
/// an extra `pulseSize` of emissions in `pulsePeriod`, per unit of pulse.
/// Each region discounts with its own beta^dt u'(x_t)/u'(x_pulse).
inline Vec marginal_damage_pulse(const IamScenario& s, const PolicyPath& policy, std::size_t pulsePeriod,
                                 double pulseSize) {
    s.validate();
    if (pulsePeriod >= s.periods()) throw DomainError("pulse period outside the horizon");
    if (!(pulseSize > 0.0)) throw DomainError("pulse size must be > 0");
    const auto base = simulate(s, policy);
    const auto hit = simulate(s, policy, pulsePeriod, pulseSize);
    if (hit.floorHit && !base.floorHit) throw InfeasibleAllocation("pulse", 0.0);
    Vec pv(s.region_count(), 0.0);
    const auto& u = s.utility;
    for (std::size_t i = 0; i < s.region_count(); ++i) {
        const double up0 = u.marginal(base.perCapita[base.at(i, pulsePeriod)]);
        for (std::size_t t = pulsePeriod; t < s.periods(); ++t) {
            const std::size_t k = base.at(i, t);
            const double factor = std::pow(1.0 + s.rho, -s.step * static_cast<double>(t - pulsePeriod)) *
                                  u.marginal(base.perCapita[k]) / up0;
            pv[i] += s.step * factor * (base.consumption[k] - hit.consumption[k]) / pulseSize;
        }
    }
    return pv;
}

}  // namespace cw
