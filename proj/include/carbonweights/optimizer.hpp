#pragma once

// Derivative-free maximisation on a box: Subplex (Nelder-Mead on a sequence
// of low-dimensional coordinate subspaces), multistart, an augmented
// Lagrangian wrapper for equality constraints, and a grid oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

#include "carbonweights/errors.hpp"
#include "carbonweights/random.hpp"

namespace cw {

using Vec = std::vector<double>;
using Objective = std::function<double(const Vec&)>;
using Constraints = std::function<Vec(const Vec&)>;

struct OptimizerConfig {
    long maxEvals = 200000;  // per restart
    double xtol = 1e-8;      // relative to the box width
    double ftol = 1e-9;      // relative
    int subspaceDim = 5;     // largest subspace
    int restarts = 3;
    std::uint64_t seed = 1;
    double penaltyInit = 10.0;
    double penaltyGrowth = 10.0;
    double ctol = 1e-6;  // equality residual, infinity norm
    int maxOuter = 50;
    bool parallelRestarts = true;
    bool trace = false;

    void validate() const {
        if (!(xtol > 0.0) || !(ftol > 0.0) || !(ctol > 0.0)) throw DomainError("tolerances must be > 0");
        if (subspaceDim < 2) throw DomainError("subspaceDim must be >= 2");
        if (!(penaltyGrowth > 1.0)) throw DomainError("penaltyGrowth must be > 1");
        if (!(penaltyInit > 0.0)) throw DomainError("penaltyInit must be > 0");
        if (restarts < 1 || maxEvals < 1) throw DomainError("restarts and maxEvals must be >= 1");
    }
};

struct TraceEntry {
    long index = 0;
    Vec x;
    double f = 0.0;
    double violation = 0.0;
};

struct OptResult {
    Vec x;
    double f = -std::numeric_limits<double>::infinity();
    long evals = 0;
    bool converged = false;
    double constraintViolation = 0.0;
    double dispersion = 0.0;  // spread of restart optima, |f_best - f_worst|
    int outerIterations = 0;
    std::vector<TraceEntry> trace;
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace) {
    std::size_t dim = trace.empty() ? 0 : trace.front().x.size();
    os << "eval";
    for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
    os << ",f,violation\n";
    os.precision(17);
    for (const auto& e : trace) {
        os << e.index;
        for (double v : e.x) os << ',' << v;
        os << ',' << e.f << ',' << e.violation << '\n';
    }
}

namespace detail {

inline void check_box(const Vec& lower, const Vec& upper) {
    if (lower.size() != upper.size() || lower.empty()) throw DomainError("box bounds must be non-empty and equal length");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i])) throw DomainError("box requires lower < upper componentwise");
}

// Counts evaluations, clamps into the box, maps throwing or non-finite
// objectives to -inf so the simplex simply moves away.
class Evaluator {
public:
    Evaluator(const Objective& f, const Vec& lo, const Vec& hi, long budget, bool trace)
        : f_(f), lo_(lo), hi_(hi), budget_(budget), traceOn_(trace) {}

    double operator()(Vec& x) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
        ++evals_;
        double v;
        try {
            v = f_(x);
        } catch (const Error&) {
            v = -std::numeric_limits<double>::infinity();
        }
        if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
        if (traceOn_) trace_.push_back({evals_, x, v, 0.0});
        if (v > best_) {
            best_ = v;
            bestX_ = x;
        }
        return v;
    }

    bool exhausted() const { return evals_ >= budget_; }
    long evals() const { return evals_; }
    double best() const { return best_; }
    const Vec& best_x() const { return bestX_; }
    std::vector<TraceEntry>& trace() { return trace_; }

private:
    const Objective& f_;
    const Vec& lo_;
    const Vec& hi_;
    long budget_;
    bool traceOn_;
    long evals_ = 0;
    double best_ = -std::numeric_limits<double>::infinity();
    Vec bestX_;
    std::vector<TraceEntry> trace_;
};

// Nelder-Mead on the coordinates `idx`, maximising. Stops once the simplex
// has shrunk to `shrinkTo` of its starting size or the budget runs out.
inline void nelder_mead_subspace(Evaluator& eval, Vec& x, double& fx, const std::vector<std::size_t>& idx,
                                 const Vec& step, double shrinkTo) {
    const std::size_t k = idx.size();
    std::vector<Vec> pts(k + 1, Vec(k));
    Vec fv(k + 1);
    for (std::size_t j = 0; j < k; ++j) pts[0][j] = x[idx[j]];
    fv[0] = fx;
    Vec full = x;
    const auto eval_sub = [&](Vec& p) {
        for (std::size_t j = 0; j < k; ++j) full[idx[j]] = p[j];
        const double v = eval(full);
        for (std::size_t j = 0; j < k; ++j) p[j] = full[idx[j]];  // clamped
        return v;
    };
    for (std::size_t j = 0; j < k; ++j) {
        pts[j + 1] = pts[0];
        pts[j + 1][j] += step[idx[j]];
        fv[j + 1] = eval_sub(pts[j + 1]);
    }
    const auto size_of = [&]() {
        double s = 0.0;
        for (std::size_t v = 1; v <= k; ++v) {
            double d = 0.0;
            for (std::size_t j = 0; j < k; ++j) d += std::abs(pts[v][j] - pts[0][j]);
            s = std::max(s, d);
        }
        return s;
    };
    double initial = 0.0;
    for (std::size_t j = 0; j < k; ++j) initial += std::abs(step[idx[j]]);
    std::vector<std::size_t> order(k + 1);
    Vec centroid(k), xr(k), xe(k), xc(k);

    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
        {
            std::vector<Vec> p2(k + 1);
            Vec f2(k + 1);
            for (std::size_t v = 0; v <= k; ++v) {
                p2[v] = pts[order[v]];
                f2[v] = fv[order[v]];
            }
            pts.swap(p2);
            fv.swap(f2);
        }
        if (size_of() <= shrinkTo * initial) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < k; ++v)
            for (std::size_t j = 0; j < k; ++j) centroid[j] += pts[v][j] / static_cast<double>(k);
        const Vec& worst = pts[k];
        for (std::size_t j = 0; j < k; ++j) xr[j] = centroid[j] + (centroid[j] - worst[j]);
        const double fr = eval_sub(xr);
        if (fr > fv[0]) {
            for (std::size_t j = 0; j < k; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - worst[j]);
            const double fe = eval_sub(xe);
            if (fe > fr) {
                pts[k] = xe;
                fv[k] = fe;
            } else {
                pts[k] = xr;
                fv[k] = fr;
            }
            continue;
        }
        if (fr > fv[k - 1]) {
            pts[k] = xr;
            fv[k] = fr;
            continue;
        }
        const bool outside = fr > fv[k];
        for (std::size_t j = 0; j < k; ++j)
            xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j]) : centroid[j] + 0.5 * (worst[j] - centroid[j]);
        const double fc = eval_sub(xc);
        if (fc > std::max(fr, fv[k])) {
            pts[k] = xc;
            fv[k] = fc;
            continue;
        }
        for (std::size_t v = 1; v <= k; ++v) {
            for (std::size_t j = 0; j < k; ++j) pts[v][j] = pts[0][j] + 0.5 * (pts[v][j] - pts[0][j]);
            fv[v] = eval_sub(pts[v]);
        }
    }
    std::size_t bestV = 0;
    for (std::size_t v = 1; v <= k; ++v)
        if (fv[v] > fv[bestV]) bestV = v;
    if (fv[bestV] > fx) {
        for (std::size_t j = 0; j < k; ++j) x[idx[j]] = pts[bestV][j];
        fx = fv[bestV];
    }
}

// Splits coordinates, sorted by |dx| descending, into subspaces of size
// [2, nsmax] greedily maximising the gap between the mean |dx| inside the
// next subspace and the mean over what remains.
inline std::vector<std::vector<std::size_t>> partition(const Vec& dx, int nsmax) {
    const std::size_t n = dx.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(dx[a]) > std::abs(dx[b]); });
    std::vector<std::vector<std::size_t>> parts;
    if (n == 1) return {{0}};
    const std::size_t nsmin = std::min<std::size_t>(2, n);
    std::size_t start = 0;
    while (start < n) {
        const std::size_t left = n - start;
        if (left <= static_cast<std::size_t>(nsmax) && left >= nsmin) {
            parts.emplace_back(order.begin() + static_cast<long>(start), order.end());
            break;
        }
        std::size_t bestK = nsmin;
        double bestGap = -std::numeric_limits<double>::infinity();
        for (std::size_t k = nsmin; k <= std::min<std::size_t>(nsmax, left); ++k) {
            const std::size_t rest = left - k;
            if (rest != 0 && rest < nsmin) continue;
            double in = 0.0, out = 0.0;
            for (std::size_t j = 0; j < k; ++j) in += std::abs(dx[order[start + j]]);
            for (std::size_t j = k; j < left; ++j) out += std::abs(dx[order[start + j]]);
            const double gap = in / k - (rest ? out / rest : 0.0);
            if (gap > bestGap + 1e-300) {
                bestGap = gap;
                bestK = k;
            }
        }
        parts.emplace_back(order.begin() + static_cast<long>(start),
                           order.begin() + static_cast<long>(start + bestK));
        start += bestK;
    }
    return parts;
}

struct SubplexRun {
    Vec x;
    double f;
    long evals;
    bool converged;
    std::vector<TraceEntry> trace;
};

inline SubplexRun subplex(const Objective& f, const Vec& lower, const Vec& upper, Vec x0, Vec step,
                          const OptimizerConfig& cfg) {
    constexpr double omega = 0.1, psi = 0.25;
    const std::size_t n = x0.size();
    Evaluator eval(f, lower, upper, cfg.maxEvals, cfg.trace);
    double fx = eval(x0);
    Vec x = x0;
    bool converged = false;
    int flatCycles = 0;
    Vec dx(n, 1.0);  // first partition follows coordinate order
    while (!eval.exhausted()) {
        const Vec xOld = x;
        const double fOld = fx;
        const auto parts = partition(dx, cfg.subspaceDim);
        for (const auto& p : parts) {
            if (eval.exhausted()) break;
            nelder_mead_subspace(eval, x, fx, p, step, psi);
        }
        for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] - xOld[i];

        // rescale steps by the progress made this cycle
        double dxNorm = 0.0, stepNorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dxNorm += std::abs(dx[i]);
            stepNorm += std::abs(step[i]);
        }
        double scale = parts.size() > 1 ? std::clamp(dxNorm / stepNorm, omega, 1.0 / omega) : psi;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(step[i]) * scale;
            step[i] = dx[i] != 0.0 ? std::copysign(mag, dx[i]) : -std::copysign(mag, step[i]);
        }

        bool small = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double width = upper[i] - lower[i];
            if (std::max(std::abs(dx[i]), std::abs(step[i]) * psi) > cfg.xtol * width) small = false;
        }
        // three flat cycles in a row also count as converged
        flatCycles = std::abs(fx - fOld) <= cfg.ftol * (std::abs(fx) + cfg.ftol) ? flatCycles + 1 : 0;
        if (small || flatCycles >= 3) {
            converged = true;
            break;
        }
    }
    if (eval.best() > fx) {
        x = eval.best_x();
        fx = eval.best();
    }
    return {x, fx, eval.evals(), converged, std::move(eval.trace())};
}

}  // namespace detail

/// Maximise `objective` over the box [lower, upper] from `start` (box centre
/// when empty). Restart r > 0 starts from a seeded jitter of `start` with
/// jittered initial steps.
inline OptResult maximize_bounded(const Objective& objective, const Vec& lower, const Vec& upper,
                                  const OptimizerConfig& cfg = {}, Vec start = {}) {
    cfg.validate();
    detail::check_box(lower, upper);
    const std::size_t n = lower.size();
    if (start.empty()) {
        start.resize(n);
        for (std::size_t i = 0; i < n; ++i) start[i] = 0.5 * (lower[i] + upper[i]);
    }
    if (start.size() != n) throw DomainError("start point dimension does not match the box");

    std::vector<Vec> starts(static_cast<std::size_t>(cfg.restarts));
    std::vector<Vec> steps(starts.size());
    for (std::size_t r = 0; r < starts.size(); ++r) {
        Rng rng(derive_seed(cfg.seed, r));
        starts[r] = start;
        steps[r].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double width = upper[i] - lower[i];
            double s = 0.1 * width;
            if (r > 0) {
                starts[r][i] = std::clamp(start[i] + uniform(rng, -0.25, 0.25) * width, lower[i], upper[i]);
                s *= uniform(rng, 0.5, 1.5);
            }
            // step inward if the start sits on the upper face
            steps[r][i] = starts[r][i] + s > upper[i] ? -s : s;
        }
    }

    std::vector<detail::SubplexRun> runs(starts.size());
    if (cfg.parallelRestarts && starts.size() > 1) {
        std::vector<std::future<detail::SubplexRun>> futs;
        for (std::size_t r = 0; r < starts.size(); ++r)
            futs.push_back(std::async(std::launch::async, [&, r] {
                return detail::subplex(objective, lower, upper, starts[r], steps[r], cfg);
            }));
        for (std::size_t r = 0; r < starts.size(); ++r) runs[r] = futs[r].get();
    } else {
        for (std::size_t r = 0; r < starts.size(); ++r)
            runs[r] = detail::subplex(objective, lower, upper, starts[r], steps[r], cfg);
    }

    OptResult out;
    double worst = std::numeric_limits<double>::infinity();
    for (auto& run : runs) {
        out.evals += run.evals;
        worst = std::min(worst, run.f);
        if (run.f > out.f) {
            out.f = run.f;
            out.x = run.x;
            out.converged = run.converged;
        }
        if (cfg.trace) {
            const long offset = out.trace.empty() ? 0 : out.trace.back().index;
            for (auto& e : run.trace) {
                e.index += offset;
                out.trace.push_back(std::move(e));
            }
        }
    }
    out.dispersion = std::isfinite(worst) ? out.f - worst : std::numeric_limits<double>::infinity();
    return out;
}

/// Maximise `objective` subject to equalities(x) = 0 on the box. Each outer
/// iteration maximises -(-f + lambda.h + rho/2 |h|^2), then updates lambda
/// and grows rho when the violation did not shrink by a factor 4.
inline OptResult maximize_eq_constrained(const Objective& objective, const Constraints& equalities,
                                         const Vec& lower, const Vec& upper, const OptimizerConfig& cfg = {},
                                         Vec start = {}) {
    cfg.validate();
    detail::check_box(lower, upper);
    const auto norm_inf = [](const Vec& h) {
        double m = 0.0;
        for (double v : h) m = std::max(m, std::abs(v));
        return m;
    };
    Vec lambda;
    double rho = cfg.penaltyInit;
    double prevViolation = std::numeric_limits<double>::infinity();
    double bestViolation = std::numeric_limits<double>::infinity();
    int stalls = 0;
    OptResult out;
    std::vector<double> violations;
    OptimizerConfig inner = cfg;
    for (int outer = 1; outer <= cfg.maxOuter; ++outer) {
        const Objective lagrangian = [&](const Vec& x) {
            const Vec h = equalities(x);
            double pen = 0.0;
            for (std::size_t j = 0; j < h.size(); ++j) {
                const double l = j < lambda.size() ? lambda[j] : 0.0;
                pen += l * h[j] + 0.5 * rho * h[j] * h[j];
            }
            return objective(x) - pen;
        };
        auto res = maximize_bounded(lagrangian, lower, upper, inner, start);
        const Vec h = equalities(res.x);
        if (lambda.size() != h.size()) lambda.assign(h.size(), 0.0);
        const double viol = norm_inf(h);
        violations.push_back(viol);

        out.x = res.x;
        out.f = objective(res.x);
        out.evals += res.evals;
        out.constraintViolation = viol;
        out.outerIterations = outer;
        out.dispersion = res.dispersion;
        if (cfg.trace)
            for (auto& e : res.trace) {
                e.index += out.trace.empty() ? 0 : out.trace.back().index;
                e.violation = viol;
                out.trace.push_back(std::move(e));
            }

        if (viol <= cfg.ctol && res.converged) {
            out.converged = true;
            return out;
        }
        if (viol < bestViolation * (1.0 - 1e-6)) {
            bestViolation = viol;
            stalls = 0;
        } else if (++stalls >= 3) {
            throw ConvergenceError("augmented Lagrangian: constraint violation stopped decreasing", violations);
        }
        for (std::size_t j = 0; j < h.size(); ++j) lambda[j] += rho * h[j];
        if (viol > 0.25 * prevViolation) rho *= cfg.penaltyGrowth;
        prevViolation = viol;
        start = res.x;
    }
    out.converged = false;
    return out;
}

/// Exhaustive grid over a box of dimension <= 3 followed by `refinements`
/// zoom passes, each re-gridding the two cells around the incumbent.
inline OptResult grid_oracle(const Objective& objective, const Vec& lower, const Vec& upper, int pointsPerDim,
                             int refinements = 1) {
    detail::check_box(lower, upper);
    const std::size_t n = lower.size();
    if (n > 3) throw DomainError("grid oracle is limited to three dimensions");
    if (pointsPerDim < 2) throw DomainError("grid oracle needs at least 2 points per dimension");
    OptResult out;
    Vec lo = lower, hi = upper;
    for (int pass = 0; pass <= refinements; ++pass) {
        std::vector<int> counter(n, 0);
        Vec x(n);
        Vec cell(n);
        for (std::size_t i = 0; i < n; ++i) cell[i] = (hi[i] - lo[i]) / (pointsPerDim - 1);
        while (true) {
            for (std::size_t i = 0; i < n; ++i)
                x[i] = counter[i] == pointsPerDim - 1 ? hi[i] : lo[i] + cell[i] * counter[i];
            double v;
            try {
                v = objective(x);
            } catch (const Error&) {
                v = -std::numeric_limits<double>::infinity();
            }
            ++out.evals;
            if (v > out.f) {
                out.f = v;
                out.x = x;
            }
            std::size_t d = 0;
            while (d < n && ++counter[d] == pointsPerDim) counter[d++] = 0;
            if (d == n) break;
        }
        if (out.x.empty()) throw NoInteriorOptimum("grid oracle found no finite objective value");
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::max(lower[i], out.x[i] - cell[i]);
            hi[i] = std::min(upper[i], out.x[i] + cell[i]);
            if (!(hi[i] > lo[i])) hi[i] = lo[i] + 1e-300;
        }
    }
    out.converged = true;
    return out;
}

}  // namespace cw
