#pragma once

// Monic real polynomials and the small set of operations the stability
// machinery needs: l1 norms, evaluation, unit-disk necessary conditions,
// a simultaneous-iteration root solver, disk rescaling and multiplication.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace delaystab {

using Complex = std::complex<double>;

/// Monic polynomial x^n + c_0 x^{n-1} + ... + c_{n-1}.
/// Coefficients are stored highest power first, leading 1 implicit.
struct MonicPoly {
    std::vector<double> coeffs;

    MonicPoly() = default;
    explicit MonicPoly(std::vector<double> c) : coeffs(std::move(c)) {
        for (double v : coeffs)
            if (!std::isfinite(v))
                throw std::invalid_argument("poly: non-finite coefficient");
    }

    int degree() const { return static_cast<int>(coeffs.size()); }
};

/// ||p||_1 = 1 + sum |c_i|.  Always >= 1 for a monic polynomial.
inline double l1_norm(const MonicPoly& p) {
    double s = 1.0;
    for (double c : p.coeffs) s += std::abs(c);
    return s;
}

/// Horner evaluation at a real point.
inline double eval(const MonicPoly& p, double x) {
    double acc = 1.0;
    for (double c : p.coeffs) acc = acc * x + c;
    return acc;
}

/// Horner evaluation at a complex point.
inline Complex eval(const MonicPoly& p, Complex z) {
    Complex acc = 1.0;
    for (double c : p.coeffs) acc = acc * z + c;
    return acc;
}

/// p and p' at z in one pass.
inline std::pair<Complex, Complex> eval_with_derivative(const MonicPoly& p, Complex z) {
    Complex acc = 1.0, d = 0.0;
    for (double c : p.coeffs) {
        d = d * z + acc;
        acc = acc * z + c;
    }
    return {acc, d};
}

/// Outcome of one necessary-condition check.
enum class CheckStatus { Pass, Fail, Marginal };

/// Zero-exclusion checks every Schur-stable monic polynomial must satisfy:
/// |p(0)| < 1, p(1) > 0 and (-1)^n p(-1) > 0.  Values are reported so callers
/// can show how close each condition is to its boundary.
struct NecessaryReport {
    double det_value = 0.0;       // |p(0)|, must be < 1
    double at_one = 0.0;          // p(1), must be > 0
    double at_minus_one = 0.0;    // (-1)^n p(-1), must be > 0
    CheckStatus det = CheckStatus::Pass;
    CheckStatus one = CheckStatus::Pass;
    CheckStatus minus_one = CheckStatus::Pass;

    CheckStatus overall() const {
        if (det == CheckStatus::Fail || one == CheckStatus::Fail ||
            minus_one == CheckStatus::Fail)
            return CheckStatus::Fail;
        if (det == CheckStatus::Marginal || one == CheckStatus::Marginal ||
            minus_one == CheckStatus::Marginal)
            return CheckStatus::Marginal;
        return CheckStatus::Pass;
    }
};

/// Evaluate the three necessary conditions.  A value within tol of its
/// boundary is flagged Marginal rather than decided either way.
inline NecessaryReport necessary_conditions(const MonicPoly& p, double tol = 1e-9) {
    if (p.degree() < 1) throw std::invalid_argument("poly: degree must be >= 1");
    NecessaryReport r;
    r.det_value = std::abs(p.coeffs.back());
    r.at_one = eval(p, 1.0);
    const double pm1 = eval(p, -1.0);
    r.at_minus_one = (p.degree() % 2 == 0) ? pm1 : -pm1;

    auto judge_positive = [tol](double v) {
        if (v > tol) return CheckStatus::Pass;
        if (v < -tol) return CheckStatus::Fail;
        return CheckStatus::Marginal;
    };
    r.det = judge_positive(1.0 - r.det_value);
    r.one = judge_positive(r.at_one);
    r.minus_one = judge_positive(r.at_minus_one);
    return r;
}

/// q(x) = R^{-n} p(R x): maps the disk of radius R onto the unit disk, so q is
/// Schur stable exactly when all roots of p lie inside |z| < R.
inline MonicPoly scale_to_disk(const MonicPoly& p, double R) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("poly: scale radius must be positive");
    std::vector<double> c(p.coeffs);
    double f = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        f /= R;
        c[i] *= f;
    }
    return MonicPoly(std::move(c));
}

/// Product of two monic polynomials (plain coefficient convolution).
inline MonicPoly mul(const MonicPoly& p, const MonicPoly& q) {
    const int n = p.degree(), m = q.degree();
    // Full coefficient arrays including the leading ones.
    std::vector<double> a(n + 1), b(m + 1);
    a[0] = 1.0;
    std::copy(p.coeffs.begin(), p.coeffs.end(), a.begin() + 1);
    b[0] = 1.0;
    std::copy(q.coeffs.begin(), q.coeffs.end(), b.begin() + 1);
    std::vector<double> out(static_cast<std::size_t>(n + m) + 1, 0.0);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= m; ++j) out[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    return MonicPoly(std::vector<double>(out.begin() + 1, out.end()));
}

namespace detail {

// Pair complex conjugates and enforce exact symmetry on the result; roots of a
// real polynomial whose imaginary part cannot be paired and is negligible are
// snapped to the real axis.
inline void symmetrize_conjugates(std::vector<Complex>& z) {
    const double pair_tol = 1e-7;
    const double snap_tol = 1e-11;
    std::vector<bool> used(z.size(), false);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (used[i] || z[i].imag() <= 0.0) continue;
        std::size_t best = z.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (used[j] || j == i || z[j].imag() >= 0.0) continue;
            const double d = std::abs(z[i] - std::conj(z[j]));
            if (d < best_d) { best_d = d; best = j; }
        }
        if (best < z.size() && best_d <= pair_tol * (1.0 + std::abs(z[i]))) {
            const Complex mean = 0.5 * (z[i] + std::conj(z[best]));
            z[i] = mean;
            z[best] = std::conj(mean);
            used[i] = used[best] = true;
        }
    }
    for (std::size_t i = 0; i < z.size(); ++i)
        if (!used[i] && std::abs(z[i].imag()) <= snap_tol * (1.0 + std::abs(z[i])))
            z[i] = Complex(z[i].real(), 0.0);
}

}  // namespace detail

/// All n roots of p, found by Aberth-Ehrlich simultaneous iteration.
///
/// Start points sit on the circle of radius 1 + max|c_i| with an angular
/// offset that avoids symmetric stalls.  Iteration stops when every update is
/// below 1e-13 relative, or at 500 sweeps; in the latter case the roots are
/// still accepted if each satisfies the residual bound
/// |p(z)| < tol * (1 + ||p||_1) (tight clusters stall the step criterion long
/// after the values are as good as they get).  Otherwise throws.
/// Results are conjugate-symmetrized and sorted by (Re, Im).
inline std::vector<Complex> roots(const MonicPoly& p, double tol = 1e-9) {
    const int n = p.degree();
    if (n < 1) throw std::invalid_argument("poly: degree must be >= 1 for roots");

    std::vector<Complex> z(static_cast<std::size_t>(n));
    if (n == 1) {
        z[0] = -p.coeffs[0];
        return z;
    }
    if (n == 2) {
        // Numerically stable quadratic formula.
        const double b = p.coeffs[0], c = p.coeffs[1];
        const double disc = b * b - 4.0 * c;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
            const double r0 = q;
            const double r1 = (q != 0.0) ? c / q : -b - q;
            z[0] = r0;
            z[1] = r1;
        } else {
            const double re = -0.5 * b, im = 0.5 * std::sqrt(-disc);
            z[0] = Complex(re, im);
            z[1] = Complex(re, -im);
        }
        std::sort(z.begin(), z.end(), [](Complex a, Complex b2) {
            return a.real() != b2.real() ? a.real() < b2.real() : a.imag() < b2.imag();
        });
        return z;
    }

    double radius = 0.0;
    for (double c : p.coeffs) radius = std::max(radius, std::abs(c));
    radius += 1.0;
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] =
            radius * std::polar(1.0, two_pi * (i + 0.25) / n + 0.4);

    const int max_sweeps = 500;
    const double step_tol = 1e-13;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex& zi = z[static_cast<std::size_t>(i)];
            auto [pv, dv] = eval_with_derivative(p, zi);
            if (pv == Complex(0.0, 0.0)) continue;
            if (dv == Complex(0.0, 0.0)) {
                // Derivative vanished away from a root; nudge off the point.
                zi += 1e-8 * (1.0 + std::abs(zi));
                worst = 1.0;
                continue;
            }
            const Complex newton = pv / dv;
            Complex s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
            const Complex den = 1.0 - newton * s;
            const Complex step = (den == Complex(0.0, 0.0)) ? newton : newton / den;
            zi -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(zi)));
        }
        converged = worst < step_tol;
    }

    detail::symmetrize_conjugates(z);
    const double residual_bound = tol * (1.0 + l1_norm(p));
    for (const Complex& r : z)
        if (!(std::abs(eval(p, r)) < residual_bound))
            throw std::runtime_error("roots-no-convergence");

    std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return z;
}

/// Largest root modulus.
inline double spectral_radius(const MonicPoly& p, double tol = 1e-9) {
    double r = 0.0;
    for (const Complex& z : roots(p, tol)) r = std::max(r, std::abs(z));
    return r;
}

/// True when |z| is within marginal_tol of the unit circle.
inline bool is_marginal_root(Complex z, double marginal_tol = 1e-9) {
    return std::abs(std::abs(z) - 1.0) < marginal_tol;
}

}  // namespace delaystab
