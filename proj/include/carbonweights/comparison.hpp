#pragma once

// Runs the IAM welfare regimes side by side and derives the comparison
// quantities: welfare under both SWFs, WECC against Negishi, pulse damages,
// and regions' preferred uniform prices.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carbonweights/iam.hpp"

namespace cw {

inline const std::vector<std::string>& iam_regime_names() {
    static const std::vector<std::string> names{"negishi", "utilitarian-uniform", "utilitarian-differentiated"};
    return names;
}

/// Period closest to 2025, the year the price comparisons are read off.
inline std::size_t reference_period(const IamScenario& s) {
    const double t = std::round((2025.0 - s.startYear) / s.step);
    if (t < 0.0) return 0;
    return std::min(static_cast<std::size_t>(t), s.periods() - 1);
}

/// Uniform price per period; for differentiated runs, the per-region prices
/// are kept in the trajectory instead.
inline Vec uniform_prices(const Trajectory& tr) {
    Vec p(tr.periods, 0.0);
    for (std::size_t t = 0; t < tr.periods; ++t)
        for (std::size_t i = 0; i < tr.regions; ++i) p[t] = std::max(p[t], tr.price[tr.at(i, t)]);
    return p;
}

struct RegimeRun {
    std::string regime;
    std::optional<PolicyOutcome> outcome;
    std::string error;
    double welfareUtilitarian = 0.0;
    double welfareNegishi = 0.0;  // under the converged Negishi weights
};

struct Comparison {
    std::vector<RegimeRun> runs;
    std::optional<NegishiOutcome> negishi;
    int negishiIterations = 0;

    const RegimeRun* find(const std::string& regime) const {
        for (const auto& r : runs)
            if (r.regime == regime && r.outcome) return &r;
        return nullptr;
    }
};

/// Negishi runs first (its policy warm-starts the utilitarian uniform search,
/// whose optimum warm-starts the differentiated search). The Negishi regime
/// is optimised over uniform prices.
inline Comparison compare_regimes(const IamScenario& s, const std::vector<std::string>& regimes,
                                  const OptimizerConfig& cfg = {}) {
    s.validate();
    for (const auto& r : regimes) {
        bool known = false;
        for (const auto& n : iam_regime_names()) known = known || n == r;
        if (!known) throw ParseError("unknown IAM regime '" + r + "'");
    }
    const auto wants = [&](const std::string& r) {
        for (const auto& x : regimes)
            if (x == r) return true;
        return false;
    };

    Comparison cmp;
    std::optional<PolicyPath> warm;
    std::string negishiError;
    try {
        cmp.negishi = negishi_weights(s, PolicyMode::Uniform, cfg);
        cmp.negishiIterations = cmp.negishi->iterations;
        warm = cmp.negishi->outcome.policy;
    } catch (const Error& e) {
        negishiError = e.what();
    }

    for (const auto& name : iam_regime_names()) {
        if (!wants(name)) continue;
        RegimeRun run;
        run.regime = name;
        try {
            if (name == "negishi") {
                if (!cmp.negishi) throw ConvergenceError(negishiError, {});
                run.outcome = cmp.negishi->outcome;
            } else if (name == "utilitarian-uniform") {
                run.outcome = optimize_policy(s, Swf::utilitarian(), PolicyMode::Uniform, cfg, warm);
                warm = run.outcome->policy;
            } else {
                // the uniform optimum is the natural start; compute it if it was not requested
                if (!wants("utilitarian-uniform"))
                    warm = optimize_policy(s, Swf::utilitarian(), PolicyMode::Uniform, cfg, warm).policy;
                run.outcome = optimize_policy(s, Swf::utilitarian(), PolicyMode::Differentiated, cfg, warm);
            }
            run.welfareUtilitarian = evaluate_swf(run.outcome->trajectory, s, Swf::utilitarian());
            if (cmp.negishi)
                run.welfareNegishi = evaluate_swf(run.outcome->trajectory, s, Swf::negishi(cmp.negishi->weights));
        } catch (const Error& e) {
            run.error = e.what();
        }
        cmp.runs.push_back(std::move(run));
    }
    return cmp;
}

struct PreferredPrices {
    std::vector<PolicyOutcome> byRegion;  // uniform optimum of each region's own SWF
};

inline PreferredPrices preferred_uniform_prices(const IamScenario& s, const OptimizerConfig& cfg = {},
                                                const std::optional<PolicyPath>& warm = std::nullopt) {
    PreferredPrices out;
    for (std::size_t i = 0; i < s.region_count(); ++i)
        out.byRegion.push_back(optimize_policy(s, Swf::regional(i), PolicyMode::Uniform, cfg, warm));
    return out;
}

/// Region with the highest (or lowest) per-capita consumption in period t
/// of the given trajectory.
inline std::size_t richest_region(const Trajectory& tr, std::size_t t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < tr.regions; ++i)
        if (tr.perCapita[tr.at(i, t)] > tr.perCapita[tr.at(best, t)]) best = i;
    return best;
}

inline std::size_t poorest_region(const Trajectory& tr, std::size_t t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < tr.regions; ++i)
        if (tr.perCapita[tr.at(i, t)] < tr.perCapita[tr.at(best, t)]) best = i;
    return best;
}

}  // namespace cw
