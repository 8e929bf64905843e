#pragma once

// Exact solvers for the static two-region world: Negishi-weighted,
// utilitarian uniform, utilitarian differentiated, regions' preferred
// uniform prices, and the arbitrary-weight generalisations behind them.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "carbonweights/econ.hpp"
#include "carbonweights/errors.hpp"
#include "carbonweights/roots.hpp"

namespace cw {

enum class Regime {
    NegishiUniform,
    UtilitarianUniform,
    UtilitarianDifferentiated,
    Preferred,
    ArbitraryUniform,
    ArbitraryDifferentiated,
};

inline const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::NegishiUniform: return "negishi";
        case Regime::UtilitarianUniform: return "utilitarian-uniform";
        case Regime::UtilitarianDifferentiated: return "utilitarian-differentiated";
        case Regime::Preferred: return "preferred";
        case Regime::ArbitraryUniform: return "arbitrary-uniform";
        case Regime::ArbitraryDifferentiated: return "arbitrary-differentiated";
    }
    return "?";
}

struct Weights {
    double north = 1.0;
    double south = 1.0;

    double of(Side s) const noexcept { return s == Side::North ? north : south; }
};

struct PriceSolution {
    Regime regime = Regime::NegishiUniform;
    std::optional<Side> preferredBy;  // set for Regime::Preferred
    double tauN = 0.0;
    double tauS = 0.0;
    double abatementN = 0.0;
    double abatementS = 0.0;
    double xN = 0.0;  // per-capita consumption
    double xS = 0.0;
    Weights weights;
    int iterations = 0;
    double residual = 0.0;
    bool multipleSolutions = false;  // restarts / roots disagreed beyond 100 tol
    bool northRicher = true;         // x_N > x_S at the solution

    double tau(Side s) const noexcept { return s == Side::North ? tauN : tauS; }
    double abatement(Side s) const noexcept { return s == Side::North ? abatementN : abatementS; }
    double x(Side s) const noexcept { return s == Side::North ? xN : xS; }
    double global_abatement() const noexcept { return abatementN + abatementS; }
};

struct SolverOptions {
    double tol = 1e-10;       // absolute, price units
    int maxIterations = 200;  // iterative schemes
    int scanPoints = 64;      // sign-change scan used to detect multiple roots
};

/// Abatements and consumption implied by a pair of regional prices.
struct StaticAllocation {
    std::array<double, 2> abatement{};
    std::array<double, 2> aggregate{};  // X_i
    std::array<double, 2> perCapita{};  // x_i

    double global() const noexcept { return abatement[0] + abatement[1]; }
};

inline StaticAllocation allocation_at_abatement(const EconomyStatic& econ, double aN, double aS) {
    StaticAllocation out;
    out.abatement = {aN, aS};
    const double total = aN + aS;
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        const auto c = consumption(econ.region(s), out.abatement[i], total);
        out.aggregate[i] = c.aggregate;
        out.perCapita[i] = c.perCapita;
    }
    return out;
}

inline StaticAllocation allocation_at_prices(const EconomyStatic& econ, double tauN, double tauS) {
    return allocation_at_abatement(econ, econ.north.cost.abatement_at_price(tauN),
                                   econ.south.cost.abatement_at_price(tauS));
}

/// Uniform price at which global abatement reaches baseline emissions. Every
/// defining equation is solved on [0, uniform_price_cap].
inline double uniform_price_cap(const QuadraticCost& cn, const QuadraticCost& cs, double e) {
    const double both = (e + cn.m / (2 * cn.k) + cs.m / (2 * cs.k)) / (1 / (2 * cn.k) + 1 / (2 * cs.k));
    if (both >= std::max(cn.m, cs.m)) return both;
    const auto& lone = cn.m <= cs.m ? cn : cs;
    return lone.m + 2 * lone.k * e;
}

inline double uniform_price_cap(const EconomyStatic& econ) {
    return uniform_price_cap(econ.north.cost, econ.south.cost, econ.ebar());
}

/// Weighted SWF sum_i alpha_i L_i u(x_i) at an allocation.
inline double static_welfare(const EconomyStatic& econ, const Weights& w, const StaticAllocation& a) {
    double total = 0.0;
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        if (w.of(s) == 0.0) continue;
        total += w.of(s) * econ.region(s).population * econ.utility.u(a.perCapita[i]);
    }
    return total;
}

/// Aggregate world consumption; the Negishi price maximises it over uniform prices.
inline double static_total_consumption(const StaticAllocation& a) {
    return a.aggregate[0] + a.aggregate[1];
}

namespace detail {

inline void validate_weights(const Weights& w) {
    if (!(w.north >= 0.0) || !(w.south >= 0.0) || !std::isfinite(w.north) || !std::isfinite(w.south))
        throw DomainError("welfare weights must be finite and >= 0");
    if (w.north == 0.0 && w.south == 0.0) throw DomainError("welfare weights cannot both be zero");
}

inline double root_xtol(double tol) { return tol * 1e-3; }

inline PriceSolution finish(const EconomyStatic& econ, Regime regime, double tauN, double tauS,
                            const Weights& w) {
    PriceSolution sol;
    sol.regime = regime;
    sol.tauN = tauN;
    sol.tauS = tauS;
    sol.weights = w;
    const auto a = allocation_at_prices(econ, tauN, tauS);
    sol.abatementN = a.abatement[0];
    sol.abatementS = a.abatement[1];
    sol.xN = a.perCapita[0];
    sol.xS = a.perCapita[1];
    sol.northRicher = sol.xN > sol.xS;
    return sol;
}

// Picks the root with the largest objective and flags disagreement.
template <class Objective>
inline double select_root(const RootResult& r, double tol, Objective&& objective, bool& multiple) {
    multiple = false;
    double best = r.roots.front();
    double bestValue = -std::numeric_limits<double>::infinity();
    for (double x : r.roots) {
        if (std::abs(x - r.roots.front()) > 100.0 * tol) multiple = true;
        double v;
        try {
            v = objective(x);
        } catch (const InfeasibleAllocation&) {
            continue;
        }
        if (v > bestValue) {
            bestValue = v;
            best = x;
        }
    }
    return best;
}

}  // namespace detail

/// Right-hand side of the weighted uniform-price condition at uniform price tau:
/// -sum_i a_i u'_i D'_i (C''_S + C''_N) / (a_N u'_N C''_S + a_S u'_S C''_N).
inline double weighted_uniform_rhs(const EconomyStatic& econ, const Weights& w, double tau) {
    const auto a = allocation_at_prices(econ, tau, tau);
    const double total = a.global();
    const double cN = econ.north.cost.curvature(), cS = econ.south.cost.curvature();
    double benefit = 0.0;
    std::array<double, 2> wm{0.0, 0.0};  // alpha_i u'(x_i)
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        if (w.of(s) == 0.0) continue;
        wm[i] = w.of(s) * econ.utility.marginal(a.perCapita[i]);
        benefit -= wm[i] * econ.region(s).damage.marginal(total);
    }
    return benefit * (cS + cN) / (wm[0] * cS + wm[1] * cN);
}

inline PriceSolution solve_negishi_static(const EconomyStatic& econ, const SolverOptions& opt = {}) {
    econ.validate();
    const double cap = uniform_price_cap(econ);
    const auto residual = [&](double tau) {
        const double total = econ.north.cost.abatement_at_price(tau) +
                             econ.south.cost.abatement_at_price(tau);
        return tau + econ.north.damage.marginal(total) + econ.south.damage.marginal(total);
    };
    const auto r = find_roots(residual, 0.0, cap, detail::root_xtol(opt.tol), opt.scanPoints,
                              "Negishi price");
    bool multiple = false;
    const double tau = detail::select_root(
        r, opt.tol,
        [&](double t) { return static_total_consumption(allocation_at_prices(econ, t, t)); },
        multiple);
    auto sol = detail::finish(econ, Regime::NegishiUniform, tau, tau, {});
    sol.weights = {1.0 / econ.utility.marginal(sol.xN), 1.0 / econ.utility.marginal(sol.xS)};
    sol.iterations = r.iterations;
    sol.residual = std::abs(residual(tau));
    sol.multipleSolutions = multiple;
    return sol;
}

/// Uniform price maximising sum_i a_i L_i u(x_i). Edge weights give preferred prices.
inline PriceSolution solve_arbitrary_uniform_static(const EconomyStatic& econ, const Weights& w,
                                                    const SolverOptions& opt = {},
                                                    Regime regime = Regime::ArbitraryUniform) {
    econ.validate();
    detail::validate_weights(w);
    const double cap = uniform_price_cap(econ);
    const auto residual = [&](double tau) { return tau - weighted_uniform_rhs(econ, w, tau); };
    const auto r = find_roots(residual, 0.0, cap, detail::root_xtol(opt.tol), opt.scanPoints,
                              "uniform price");
    bool multiple = false;
    const double tau = detail::select_root(
        r, opt.tol,
        [&](double t) { return static_welfare(econ, w, allocation_at_prices(econ, t, t)); },
        multiple);
    auto sol = detail::finish(econ, regime, tau, tau, w);
    sol.iterations = r.iterations;
    sol.residual = std::abs(residual(tau));
    sol.multipleSolutions = multiple;
    return sol;
}

inline PriceSolution solve_utilitarian_uniform_static(const EconomyStatic& econ,
                                                      const SolverOptions& opt = {}) {
    return solve_arbitrary_uniform_static(econ, {1.0, 1.0}, opt, Regime::UtilitarianUniform);
}

inline PriceSolution solve_preferred_static(const EconomyStatic& econ, Side region,
                                            const SolverOptions& opt = {}) {
    const Weights edge = region == Side::North ? Weights{1.0, 0.0} : Weights{0.0, 1.0};
    auto sol = solve_arbitrary_uniform_static(econ, edge, opt, Regime::Preferred);
    sol.preferredBy = region;
    return sol;
}

namespace detail {

// Gradient of sum_i a_i L_i u(x_i) with respect to (A_N, A_S), plus the
// residual of the differentiated price condition expressed in price units.
struct DiffState {
    StaticAllocation alloc;
    std::array<double, 2> grad{};
    std::array<std::array<double, 2>, 2> hess{};
    std::array<double, 2> priceResidual{};
    double welfare = 0.0;
};

inline DiffState differentiated_state(const EconomyStatic& econ, const Weights& w, double aN, double aS) {
    DiffState st;
    st.alloc = allocation_at_abatement(econ, aN, aS);
    const double total = st.alloc.global();
    std::array<double, 2> up{}, upp{}, dprime{}, cprime{};
    std::array<double, 2> dcurv{};
    for (Side s : {Side::North, Side::South}) {
        const auto i = static_cast<std::size_t>(s);
        const auto& r = econ.region(s);
        up[i] = econ.utility.marginal(st.alloc.perCapita[i]);
        upp[i] = econ.utility.curvature(st.alloc.perCapita[i]) / r.population;
        dprime[i] = r.damage.marginal(total);
        dcurv[i] = r.damage.curvature();
        cprime[i] = r.cost.marginal(st.alloc.abatement[i]);
    }
    st.welfare = static_welfare(econ, w, st.alloc);
    const std::array<double, 2> alpha{w.north, w.south};
    double benefit = 0.0;  // -sum_j a_j u'_j D'_j
    for (std::size_t j = 0; j < 2; ++j) benefit -= alpha[j] * up[j] * dprime[j];
    for (std::size_t i = 0; i < 2; ++i) {
        st.grad[i] = -alpha[i] * up[i] * cprime[i] + benefit;
        st.priceResidual[i] = std::abs(st.grad[i]) / (alpha[i] * up[i]);
    }
    // dX_j/dA_i = -delta_ij C'_j - D'_j
    const auto dx = [&](std::size_t j, std::size_t i) { return -(i == j ? cprime[j] : 0.0) - dprime[j]; };
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            double h = 0.0;
            for (std::size_t j = 0; j < 2; ++j) {
                const double second =
                    -((i == j && k == j) ? econ.region(static_cast<Side>(j)).cost.curvature() : 0.0) -
                    dcurv[j];
                h += alpha[j] * (upp[j] * dx(j, i) * dx(j, k) + up[j] * second);
            }
            st.hess[i][k] = h;
        }
    }
    return st;
}

struct NewtonOutcome {
    double aN, aS;
    double residual;
    double welfare;
    int iterations;
    bool converged;
};

// Newton ascent on the strictly concave differentiated objective, projected on
// A_i >= 0 and A_N + A_S <= Ebar, with backtracking.
inline NewtonOutcome differentiated_newton(const EconomyStatic& econ, const Weights& w, double aN,
                                           double aS, const SolverOptions& opt,
                                           std::vector<double>& trace) {
    const double e = econ.ebar();
    auto st = differentiated_state(econ, w, aN, aS);
    const auto residual_of = [&](const DiffState& s) {
        double r = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            // at the A_i = 0 bound a non-positive gradient is optimal
            if (s.alloc.abatement[i] <= 0.0 && s.grad[i] <= 0.0) continue;
            r = std::max(r, s.priceResidual[i]);
        }
        return r;
    };
    double res = residual_of(st);
    int it = 0;
    for (; it < opt.maxIterations && res > opt.tol; ++it) {
        trace.push_back(res);
        const auto& h = st.hess;
        const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        std::array<double, 2> step{};
        if (det > 0.0 && h[0][0] < 0.0) {
            step[0] = -(h[1][1] * st.grad[0] - h[0][1] * st.grad[1]) / det;
            step[1] = -(-h[1][0] * st.grad[0] + h[0][0] * st.grad[1]) / det;
        } else {
            // fall back to a scaled gradient step
            const double scale = 1.0 / std::max(std::abs(h[0][0]) + std::abs(h[1][1]), 1e-300);
            step = {st.grad[0] * scale, st.grad[1] * scale};
        }
        bool accepted = false;
        for (double t = 1.0; t > 1e-12; t *= 0.5) {
            double nN = std::max(0.0, st.alloc.abatement[0] + t * step[0]);
            double nS = std::max(0.0, st.alloc.abatement[1] + t * step[1]);
            if (nN + nS > e) {
                const double shrink = e / (nN + nS);
                nN *= shrink;
                nS *= shrink;
            }
            try {
                auto cand = differentiated_state(econ, w, nN, nS);
                const double cres = residual_of(cand);
                if (cand.welfare >= st.welfare - 1e-15 * std::abs(st.welfare) || cres < res) {
                    st = std::move(cand);
                    res = cres;
                    accepted = true;
                    break;
                }
            } catch (const InfeasibleAllocation&) {
            } catch (const DomainError&) {
            }
        }
        if (!accepted) break;
    }
    return {st.alloc.abatement[0], st.alloc.abatement[1], res, st.welfare, it, res <= opt.tol};
}

}  // namespace detail

/// Differentiated prices maximising sum_i a_i L_i u(x_i). Both weights must be
/// positive: a zero weight sends that region's price formula to infinity.
inline PriceSolution solve_arbitrary_differentiated_static(
    const EconomyStatic& econ, const Weights& w, const SolverOptions& opt = {},
    Regime regime = Regime::ArbitraryDifferentiated) {
    econ.validate();
    detail::validate_weights(w);
    if (w.north == 0.0 || w.south == 0.0)
        throw DomainError("differentiated prices require strictly positive weights for both regions");

    // Three starts: the Negishi allocation, half of it, and a point towards the cap.
    std::vector<std::array<double, 2>> starts;
    try {
        const auto neg = solve_negishi_static(econ, opt);
        starts.push_back({neg.abatementN, neg.abatementS});
        starts.push_back({0.5 * neg.abatementN, 0.5 * neg.abatementS});
        const double cap = uniform_price_cap(econ);
        const double mid = 0.5 * (neg.tauN + cap);
        starts.push_back({econ.north.cost.abatement_at_price(mid), econ.south.cost.abatement_at_price(mid)});
    } catch (const NoInteriorOptimum&) {
        starts.push_back({0.0, 0.0});
        starts.push_back({0.25 * econ.ebar(), 0.25 * econ.ebar()});
        starts.push_back({0.1 * econ.ebar(), 0.4 * econ.ebar()});
    }

    std::vector<double> trace;
    std::optional<detail::NewtonOutcome> best;
    std::vector<detail::NewtonOutcome> outcomes;
    bool hitCeiling = false;
    for (const auto& s : starts) {
        try {
            auto o = detail::differentiated_newton(econ, w, s[0], s[1], opt, trace);
            outcomes.push_back(o);
            if (o.converged && (!best || o.welfare > best->welfare)) best = o;
            if (!o.converged && o.aN + o.aS >= econ.ebar() * (1.0 - 1e-9)) hitCeiling = true;
        } catch (const InfeasibleAllocation&) {
        }
    }
    if (!best && hitCeiling)
        throw NoInteriorOptimum("differentiated optimum abates all baseline emissions");
    if (!best)
        throw ConvergenceError("differentiated price system did not converge from any start", trace);

    auto sol = detail::finish(econ, regime, econ.north.cost.marginal(best->aN),
                              econ.south.cost.marginal(best->aS), w);
    const auto st = detail::differentiated_state(econ, w, sol.abatementN, sol.abatementS);
    sol.residual = std::max(sol.abatementN > 0.0 || st.grad[0] > 0.0 ? st.priceResidual[0] : 0.0,
                            sol.abatementS > 0.0 || st.grad[1] > 0.0 ? st.priceResidual[1] : 0.0);
    sol.iterations = best->iterations;
    for (const auto& o : outcomes) {
        if (!o.converged) continue;
        const double dN = std::abs(econ.north.cost.marginal(o.aN) - sol.tauN);
        const double dS = std::abs(econ.south.cost.marginal(o.aS) - sol.tauS);
        if (std::max(dN, dS) > 100.0 * opt.tol) sol.multipleSolutions = true;
    }
    return sol;
}

inline PriceSolution solve_utilitarian_differentiated_static(const EconomyStatic& econ,
                                                             const SolverOptions& opt = {}) {
    return solve_arbitrary_differentiated_static(econ, {1.0, 1.0}, opt,
                                                 Regime::UtilitarianDifferentiated);
}

inline PriceSolution solve_arbitrary_weights_static(const EconomyStatic& econ, const Weights& w,
                                                    bool uniform, const SolverOptions& opt = {}) {
    return uniform ? solve_arbitrary_uniform_static(econ, w, opt)
                   : solve_arbitrary_differentiated_static(econ, w, opt);
}

/// Negishi weights reached by iterating alpha_i <- 1/u'(x_i) around the
/// differentiated solver, starting from utilitarian weights.
struct NegishiIteration {
    Weights weights;
    PriceSolution solution;
    int iterations = 0;
};

inline NegishiIteration iterate_negishi_weights_static(const EconomyStatic& econ,
                                                       const SolverOptions& opt = {},
                                                       double weightTol = 1e-13) {
    Weights w{1.0, 1.0};
    std::vector<double> trace;
    for (int it = 1; it <= opt.maxIterations; ++it) {
        const auto sol = solve_arbitrary_differentiated_static(econ, w, opt);
        Weights next{1.0 / econ.utility.marginal(sol.xN), 1.0 / econ.utility.marginal(sol.xS)};
        // weights are scale-free; normalise North to 1
        next.south /= next.north;
        next.north = 1.0;
        const double change = std::abs(next.south - w.south) / w.south;
        trace.push_back(change);
        w = next;
        if (change <= weightTol) return {w, solve_arbitrary_differentiated_static(econ, w, opt), it};
    }
    throw ConvergenceError("Negishi weight iteration did not converge", trace);
}

/// d/d(eps) of the Negishi-weighted SWF when eps of aggregate consumption moves
/// from North to South. Zero at the Negishi solution.
inline double negishi_transfer_derivative(const EconomyStatic& econ, const PriceSolution& negishi) {
    return negishi.weights.south * econ.utility.marginal(negishi.xS) -
           negishi.weights.north * econ.utility.marginal(negishi.xN);
}

/// Approximate utilitarian-to-Negishi uniform price ratio built from
/// South/North ratios of population, endowment per capita, per-endowment
/// marginal damage, and North/South per-endowment cost curvature.
inline double ratio_approx_static(double populationRatioSN, double endowmentRatioSN,
                                  double damageRatioSN, double curvatureRatioNS, double eta) {
    if (!(populationRatioSN > 0.0) || !(endowmentRatioSN > 0.0) || !(damageRatioSN > 0.0) ||
        !(curvatureRatioNS > 0.0))
        throw DomainError("ratio arguments must be > 0");
    const double lw = populationRatioSN * endowmentRatioSN;
    const double lwEta = populationRatioSN * std::pow(endowmentRatioSN, 1.0 - eta);
    return (lwEta * damageRatioSN + 1.0) / (lw * damageRatioSN + 1.0) *
           (lw * curvatureRatioNS + 1.0) / (lwEta * curvatureRatioNS + 1.0);
}

}  // namespace cw
