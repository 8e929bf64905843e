#pragma once

// Bracketed scalar root finding. A coarse scan locates every sign change on
// the bracket, each sub-bracket is polished with TOMS 748.

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "carbonweights/errors.hpp"

namespace cw {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> roots;  // every root found on the bracket, ascending
};

template <class F>
RootResult find_roots(F&& f, double lo, double hi, double tol, int scanPoints = 64,
                      const std::string& what = "equation") {
    if (!(hi >= lo)) throw DomainError("root bracket is empty");
    RootResult out;
    if (hi == lo) {
        const double f0 = f(lo);
        if (f0 != 0.0) throw NoInteriorOptimum(what + ": degenerate bracket without a root");
        out.x = lo;
        out.roots = {lo};
        return out;
    }

    std::vector<double> grid(scanPoints + 1), vals(scanPoints + 1);
    for (int i = 0; i <= scanPoints; ++i) {
        grid[i] = (i == scanPoints) ? hi : lo + (hi - lo) * i / scanPoints;
        vals[i] = f(grid[i]);
    }

    const auto tolerance = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    for (int i = 0; i <= scanPoints; ++i) {
        if (vals[i] == 0.0) {
            out.roots.push_back(grid[i]);
            continue;
        }
        if (i == scanPoints || vals[i + 1] == 0.0) continue;
        if ((vals[i] < 0.0) == (vals[i + 1] < 0.0)) continue;

        std::uintmax_t iters = 200;
        auto [a, b] = boost::math::tools::toms748_solve(f, grid[i], grid[i + 1], vals[i],
                                                        vals[i + 1], tolerance, iters);
        const double fa = f(a), fb = f(b);
        const double root = std::abs(fa) <= std::abs(fb) ? a : b;
        out.roots.push_back(root);
        out.iterations += static_cast<int>(iters);
    }
    if (out.roots.empty())
        throw NoInteriorOptimum(what + ": no sign change on [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    out.x = out.roots.front();
    out.residual = std::abs(f(out.x));
    return out;
}

}  // namespace cw
