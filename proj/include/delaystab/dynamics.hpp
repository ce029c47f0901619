#pragma once

// Nonlinear delay maps and their expanded iterates.
//
// A DelayMap is an update rule x_{n+1} = F(x_n, ..., x_{n-k+1}) taking its k
// arguments newest first.  The m-step expanded map substitutes the rule into
// itself m times; it acts on a window of k+m values whose leading m slots are
// free arguments that never influence the value.  Fixed points carry over
// between all expansion stages, and the gradient of the expanded map at a
// fixed point is the expanded coefficient vector of the linearization, which
// is what classify_local feeds to the Schur classifier.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "expand.hpp"

namespace delaystab {

/// Update rule of a scalar delay recurrence; arguments newest first.
struct DelayMap {
    int k = 1;
    std::function<double(std::span<const double>)> eval_fn;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    double eval(std::span<const double> args) const {
        if (static_cast<int>(args.size()) != k)
            throw std::invalid_argument("dynamics: argument count mismatch");
        return eval_fn(args);
    }
};

/// One-dimensional map with domain and optional derivative.
struct ScalarMap1D {
    std::function<double(double)> eval;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    std::function<double(double)> deriv;  // optional
};

/// Simulated trajectory.  values holds the initial history followed by the
/// computed iterates, oldest first.  converged is set when the trailing
/// window's spread fell below conv_tol before the step budget ran out; a
/// non-finite iterate stops the run with converged = false.
struct OrbitRecord {
    std::vector<double> values;
    bool converged = false;
    double limit = std::numeric_limits<double>::quiet_NaN();
    int iterations_used = 0;
};

// Maximum supported expansion order for composed evaluation; each extra order
// costs one inner evaluation per call, so a runaway order is a usage bug.
inline constexpr int kMaxExpandOrder = 64;

/// Value of the m-step expanded map on a window of k+m arguments (newest
/// first).  The leading m entries are the free slots and are ignored; the
/// value is obtained by feeding the trailing k entries through the base rule
/// m+1 times, shifting the window as it goes.  Cost: m+1 evaluations.
inline double eval_expanded(const DelayMap& f, int m, std::span<const double> args) {
    if (m < 0 || m > kMaxExpandOrder)
        throw std::invalid_argument("dynamics: expansion order out of range");
    if (static_cast<int>(args.size()) != f.k + m)
        throw std::invalid_argument("dynamics: window size mismatch");
    const int k = f.k;
    std::vector<double> t(args.end() - k, args.end());
    for (int i = 0; i < m; ++i) {
        const double v = f.eval(t);
        for (int j = k - 1; j > 0; --j) t[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(j) - 1];
        t[0] = v;
    }
    return f.eval(t);
}

namespace detail {

template <typename Step>
OrbitRecord run_orbit(std::vector<double> values, int history, int n_steps,
                      double conv_tol, int window, Step step) {
    OrbitRecord rec;
    rec.values = std::move(values);
    for (int n = 0; n < n_steps; ++n) {
        const double x = step(rec.values);
        rec.iterations_used = n + 1;
        if (!std::isfinite(x)) {
            rec.converged = false;
            return rec;
        }
        rec.values.push_back(x);
        const int produced = static_cast<int>(rec.values.size()) - history;
        if (conv_tol > 0.0 && produced >= window) {
            double lo = x, hi = x;
            for (int i = 0; i < window; ++i) {
                const double v = rec.values[rec.values.size() - 1 - static_cast<std::size_t>(i)];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo < conv_tol) {
                rec.converged = true;
                rec.limit = x;
                return rec;
            }
        }
    }
    return rec;
}

}  // namespace detail

/// Iterate the base rule.  init supplies the k-value history, oldest first.
inline OrbitRecord orbit(const DelayMap& f, const std::vector<double>& init, int n_steps,
                         double conv_tol = 0.0, int window = 32) {
    if (static_cast<int>(init.size()) != f.k)
        throw std::invalid_argument("dynamics: history must have k values");
    const int k = f.k;
    return detail::run_orbit(init, k, n_steps, conv_tol, window,
                             [&f, k](const std::vector<double>& vals) {
                                 std::vector<double> w(static_cast<std::size_t>(k));
                                 for (int j = 0; j < k; ++j)
                                     w[static_cast<std::size_t>(j)] =
                                         vals[vals.size() - 1 - static_cast<std::size_t>(j)];
                                 return f.eval(w);
                             });
}

/// Iterate the m-step expanded system; init supplies k+m values, oldest
/// first.
inline OrbitRecord orbit_expanded(const DelayMap& f, int m, const std::vector<double>& init,
                                  int n_steps, double conv_tol = 0.0, int window = 32) {
    if (static_cast<int>(init.size()) != f.k + m)
        throw std::invalid_argument("dynamics: history must have k+m values");
    const int d = f.k + m;
    return detail::run_orbit(init, d, n_steps, conv_tol, window,
                             [&f, m, d](const std::vector<double>& vals) {
                                 std::vector<double> w(static_cast<std::size_t>(d));
                                 for (int j = 0; j < d; ++j)
                                     w[static_cast<std::size_t>(j)] =
                                         vals[vals.size() - 1 - static_cast<std::size_t>(j)];
                                 return eval_expanded(f, m, w);
                             });
}

/// History that makes the m-step expanded orbit reproduce the base orbit
/// shifted by m steps (z_n = x_{n+m} for n >= 1): run the base rule m steps
/// forward from x0 and hand back all k+m values, oldest first.
inline std::vector<double> calibrate_initial(const DelayMap& f, const std::vector<double>& x0,
                                             int m) {
    if (m < 0 || m > kMaxExpandOrder)
        throw std::invalid_argument("dynamics: expansion order out of range");
    OrbitRecord rec = orbit(f, x0, m);
    if (static_cast<int>(rec.values.size()) != f.k + m)
        throw std::runtime_error("calibration-overflow");
    return rec.values;
}

/// Partial derivatives of the base rule at the constant state (xbar..xbar),
/// by central differences; entry j differentiates in the x_{n-j} slot.
inline CoeffVector linearize_at(const DelayMap& f, double xbar, double fd_step = 0.0) {
    const double h = fd_step > 0.0 ? fd_step : 1e-6 * (1.0 + std::abs(xbar));
    std::vector<double> grad(static_cast<std::size_t>(f.k));
    std::vector<double> w(static_cast<std::size_t>(f.k), xbar);
    for (int j = 0; j < f.k; ++j) {
        w[static_cast<std::size_t>(j)] = xbar + h;
        const double up = f.eval(w);
        w[static_cast<std::size_t>(j)] = xbar - h;
        const double dn = f.eval(w);
        w[static_cast<std::size_t>(j)] = xbar;
        grad[static_cast<std::size_t>(j)] = (up - dn) / (2.0 * h);
    }
    return CoeffVector(std::move(grad), 0);
}

/// Gradient of the m-step expanded map at the fixed point xbar: linearize the
/// base rule there and push the coefficient vector through m expansion steps.
/// (As a k+m-argument map the expanded rule has zero derivative in its m free
/// slots; the returned k entries are the trailing, active ones.)
inline CoeffVector gradient_expanded(const DelayMap& f, double xbar, int m,
                                     double fd_step = 0.0) {
    return expand_m(linearize_at(f, xbar, fd_step), m);
}

/// Local stability of a fixed point: finite-difference linearization followed
/// by the Schur classifier on the expanded coefficient vectors.
inline Verdict classify_local(const DelayMap& f, double xbar, int m_max = 200,
                              double tol = 1e-9, double fd_step = 0.0) {
    std::vector<double> w(static_cast<std::size_t>(f.k), xbar);
    const double residual = std::abs(f.eval(w) - xbar);
    if (!(residual <= tol * (1.0 + std::abs(xbar)) * 1e3))
        throw std::invalid_argument("not-a-fixed-point");
    ClassifyOptions opt;
    opt.m_max = m_max;
    opt.tol = tol;
    return classify_schur(linearize_at(f, xbar, fd_step), opt);
}

/// Roots of g(x) = x on [lo, hi] by uniform sign scan plus bisection.
/// Near-duplicate roots are merged.  If nearly all samples already sit on the
/// diagonal the map is (numerically) the identity and no discrete root list
/// exists; that degenerate case throws "identity-map".
inline std::vector<double> find_fixed_points_1d(const std::function<double(double)>& g,
                                                double lo, double hi, int n_scan = 2048,
                                                double tol = 1e-9) {
    if (!(lo < hi)) throw std::invalid_argument("dynamics: empty scan interval");
    if (n_scan < 2) throw std::invalid_argument("dynamics: n_scan too small");

    auto diff = [&g](double x) { return g(x) - x; };
    std::vector<double> xs(static_cast<std::size_t>(n_scan) + 1);
    std::vector<double> ds(xs.size());
    int on_diagonal = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / n_scan;
        ds[i] = diff(xs[i]);
        if (std::isfinite(ds[i]) && std::abs(ds[i]) <= tol * (1.0 + std::abs(xs[i])))
            ++on_diagonal;
    }
    if (on_diagonal >= static_cast<int>(0.9 * xs.size()))
        throw std::runtime_error("identity-map");

    std::vector<double> out;
    auto push_root = [&out, tol](double r) {
        for (double v : out)
            if (std::abs(v - r) <= 1e3 * tol * (1.0 + std::abs(r))) return;
        out.push_back(r);
    };
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!std::isfinite(ds[i]) || !std::isfinite(ds[i + 1])) continue;
        if (ds[i] == 0.0) {
            push_root(xs[i]);
            continue;
        }
        if (ds[i] * ds[i + 1] < 0.0) {
            double a = xs[i], b = xs[i + 1], fa = ds[i];
            while (b - a > tol * (1.0 + std::abs(a))) {
                const double mid = 0.5 * (a + b);
                const double fm = diff(mid);
                if (!std::isfinite(fm)) break;
                if (fa * fm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            push_root(0.5 * (a + b));
        }
    }
    if (!ds.empty() && std::isfinite(ds.back()) && ds.back() == 0.0) push_root(xs.back());
    return out;
}

/// Result of the period-two search.
struct TwoCycleReport {
    bool found = false;
    double x = 0.0;
    double y = 0.0;
};

/// Look for a genuine 2-cycle of g on [lo, hi]: scan the second iterate for
/// fixed points and keep one that is not a fixed point of g itself.  The scan
/// only sees sign changes, so tangential cycles can escape it; treat a
/// negative answer as "none found at this resolution".
inline TwoCycleReport has_two_cycle(const std::function<double(double)>& g, double lo,
                                    double hi, int n_scan = 4096, double tol = 1e-9) {
    auto g2 = [&g](double x) { return g(g(x)); };
    std::vector<double> candidates;
    try {
        candidates = find_fixed_points_1d(g2, lo, hi, n_scan, tol);
    } catch (const std::runtime_error&) {
        // Second iterate numerically equal to the identity: every point lies
        // on a 2-cycle; report the first off-diagonal sample.
        for (int i = 0; i <= n_scan; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / n_scan;
            const double y = g(x);
            if (std::isfinite(y) && std::abs(y - x) > 1e3 * tol * (1.0 + std::abs(x)))
                return {true, x, y};
        }
        return {};
    }
    for (double x : candidates) {
        const double y = g(x);
        if (!std::isfinite(y)) continue;
        if (std::abs(y - x) > 1e3 * tol * (1.0 + std::abs(x))) return {true, x, y};
    }
    return {};
}

inline TwoCycleReport has_two_cycle(const ScalarMap1D& g, int n_scan = 4096,
                                    double tol = 1e-9) {
    return has_two_cycle(g.eval, g.lo, g.hi, n_scan, tol);
}

}  // namespace delaystab
