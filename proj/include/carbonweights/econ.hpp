#pragma once

// Elementary economics shared by every solver: isoelastic utility, quadratic
// abatement cost and damage families, budget identities of the two-region
// world. Everything here is an immutable value with pure member functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "carbonweights/errors.hpp"

namespace cw {

enum class Side { North = 0, South = 1 };

constexpr Side other(Side s) noexcept {
    return s == Side::North ? Side::South : Side::North;
}

inline const char* to_string(Side s) noexcept {
    return s == Side::North ? "N" : "S";
}

/// Isoelastic utility with elasticity of marginal utility `eta`.
/// eta == 1 uses the logarithmic branch explicitly.
struct UtilityParams {
    double eta = 1.0;

    bool is_log() const noexcept { return eta == 1.0; }

    double u(double x) const {
        if (!(x > 0.0)) throw DomainError("utility evaluated at nonpositive consumption");
        if (is_log()) return std::log(x);
        return std::pow(x, 1.0 - eta) / (1.0 - eta);
    }

    double marginal(double x) const {
        if (!(x > 0.0)) throw DomainError("marginal utility evaluated at nonpositive consumption");
        if (eta == 0.0) return 1.0;
        return std::pow(x, -eta);
    }

    double curvature(double x) const {
        if (!(x > 0.0)) throw DomainError("utility curvature evaluated at nonpositive consumption");
        return -eta * std::pow(x, -eta - 1.0);
    }

    /// Inverse of u. Throws DomainError when `level` is outside the range of u
    /// (for eta > 1 utility is bounded above by 0, for eta < 1 below by 0).
    double inverse(double level) const {
        if (is_log()) return std::exp(level);
        const double base = (1.0 - eta) * level;
        if (!(base > 0.0)) throw DomainError("utility level outside the range of u");
        return std::pow(base, 1.0 / (1.0 - eta));
    }

    void validate() const {
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("eta must be finite and >= 0");
    }
};

/// C(A) = k A^2 + m A + n. Third derivative is zero everywhere.
struct QuadraticCost {
    double k = 1.0;
    double m = 0.0;
    double n = 0.0;

    double value(double a) const noexcept { return (k * a + m) * a + n; }
    double marginal(double a) const noexcept { return 2.0 * k * a + m; }
    double curvature() const noexcept { return 2.0 * k; }

    /// Inverse marginal abatement cost; zero for prices at or below `m`.
    double abatement_at_price(double tau) const noexcept {
        return tau > m ? (tau - m) / (2.0 * k) : 0.0;
    }

    void validate() const {
        if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("cost curvature k must be > 0");
        if (!(m >= 0.0) || !(n >= 0.0)) throw DomainError("cost coefficients m, n must be >= 0");
    }
};

inline double marginal_abatement_cost(const QuadraticCost& c, double a) noexcept {
    return c.marginal(a);
}

inline double abatement_at_price(const QuadraticCost& c, double tau) noexcept {
    return c.abatement_at_price(tau);
}

/// D(A) = d0 + d1 (Ebar - A) + d2 (Ebar - A)^2 on 0 <= A <= Ebar.
struct QuadraticDamage {
    double d0 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double ebar = 1.0;

    double remaining(double a) const noexcept { return ebar - a; }
    double value(double a) const noexcept {
        const double e = remaining(a);
        return d0 + (d1 + d2 * e) * e;
    }
    double marginal(double a) const noexcept { return -d1 - 2.0 * d2 * remaining(a); }
    double curvature() const noexcept { return 2.0 * d2; }

    QuadraticDamage scaled(double factor) const noexcept {
        return {d0 * factor, d1 * factor, d2 * factor, ebar};
    }

    void validate() const {
        if (!(ebar > 0.0) || !std::isfinite(ebar)) throw DomainError("baseline emissions must be > 0");
        if (!(d0 >= 0.0) || !(d1 >= 0.0) || !(d2 >= 0.0))
            throw DomainError("damage coefficients must be >= 0");
    }
};

/// Aggregate damage from a per-endowment quadratic: D(A) = L w d(A).
inline QuadraticDamage simplified_rice_damage(double population, double endowmentPerCapita,
                                              const QuadraticDamage& perEndowment) {
    if (!(population > 0.0) || !(endowmentPerCapita > 0.0))
        throw DomainError("population and endowment must be > 0");
    perEndowment.validate();
    if (perEndowment.d1 == 0.0 && perEndowment.d2 == 0.0 && perEndowment.d0 == 0.0)
        return perEndowment;
    if (perEndowment.d2 <= 0.0 && perEndowment.d1 <= 0.0)
        throw DomainError("per-endowment damage must be strictly decreasing in abatement");
    return perEndowment.scaled(population * endowmentPerCapita);
}

/// Callable overload: samples d on [0, ebar], recovers the quadratic through
/// three nodes and rejects functions that are not decreasing, not convex, or
/// not members of the quadratic family.
inline QuadraticDamage simplified_rice_damage(double population, double endowmentPerCapita,
                                              const std::function<double(double)>& d,
                                              double ebar) {
    if (!(ebar > 0.0)) throw DomainError("baseline emissions must be > 0");
    constexpr int kSamples = 33;
    std::array<double, kSamples> vals{};
    for (int i = 0; i < kSamples; ++i) vals[i] = d(ebar * i / (kSamples - 1));
    const double scale = std::max({std::abs(vals.front()), std::abs(vals.back()), 1.0});
    for (int i = 1; i < kSamples; ++i)
        if (vals[i] >= vals[i - 1])
            throw DomainError("per-endowment damage must be strictly decreasing in abatement");
    for (int i = 1; i + 1 < kSamples; ++i)
        if (vals[i + 1] - 2.0 * vals[i] + vals[i - 1] < -1e-12 * scale)
            throw DomainError("per-endowment damage must be convex in abatement");

    // In remaining-emissions coordinates e = ebar - A: d = c0 + c1 e + c2 e^2.
    const double f0 = d(ebar), fh = d(ebar / 2.0), f1 = d(0.0);
    const double e = ebar;
    const double c0 = f0;
    const double c2 = (f1 - 2.0 * fh + f0) / (e * e / 2.0);
    const double c1 = (f1 - f0 - c2 * e * e) / e;
    QuadraticDamage q{c0, c1, c2, ebar};
    for (int i = 0; i < kSamples; ++i) {
        const double a = ebar * i / (kSamples - 1);
        if (std::abs(q.value(a) - vals[i]) > 1e-9 * scale)
            throw DomainError("per-endowment damage is not in the quadratic family");
    }
    if (q.d0 < 0.0) q.d0 = 0.0;  // rounding from the fit
    return simplified_rice_damage(population, endowmentPerCapita, q);
}

struct Consumption {
    double aggregate;
    double perCapita;
};

struct RegionStatic {
    std::string name;
    double population = 1.0;          // L
    double endowmentPerCapita = 1.0;  // w
    QuadraticCost cost;
    QuadraticDamage damage;

    double endowment() const noexcept { return population * endowmentPerCapita; }

    void validate() const {
        if (!(population > 0.0) || !(endowmentPerCapita > 0.0))
            throw DomainError("region '" + name + "': L and w must be > 0");
        cost.validate();
        damage.validate();
    }
};

/// X = W - C(A_i) - D(A). Throws InfeasibleAllocation on nonpositive consumption.
inline Consumption consumption(const RegionStatic& r, double ownAbatement, double globalAbatement) {
    const double slack = 1e-12 * std::max(1.0, r.damage.ebar);
    if (ownAbatement < 0.0 || ownAbatement > globalAbatement + slack ||
        globalAbatement > r.damage.ebar + slack)
        throw DomainError("abatement outside 0 <= A_i <= A <= Ebar");
    const double x = r.endowment() - r.cost.value(ownAbatement) - r.damage.value(globalAbatement);
    if (!(x > 0.0)) throw InfeasibleAllocation(r.name, x);
    return {x, x / r.population};
}

struct EconomyStatic {
    RegionStatic north;
    RegionStatic south;
    UtilityParams utility;

    const RegionStatic& region(Side s) const noexcept {
        return s == Side::North ? north : south;
    }

    double ebar() const noexcept { return north.damage.ebar; }

    void validate() const {
        north.validate();
        south.validate();
        utility.validate();
        // Equality is admitted as the symmetric limiting case.
        if (north.endowmentPerCapita < south.endowmentPerCapita)
            throw DomainError("North must be at least as rich per capita as South (w_N >= w_S)");
        if (std::abs(north.damage.ebar - south.damage.ebar) >
            1e-12 * std::max(1.0, north.damage.ebar))
            throw DomainError("both regions' damages must share baseline emissions");
    }
};

}  // namespace cw
