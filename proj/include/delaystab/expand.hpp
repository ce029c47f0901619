#pragma once

// Delay-expansion engine for linear recurrences x_{n+1} = sum_j a_j x_{n-j}.
//
// The coefficient vector V_m of the m-step expanded system obeys
//   b_{m+1,j} = a_j * b_{m,0} + b_{m,j+1}   (j = 0..k-2)
//   b_{m+1,k-1} = b_{m,0} * a_{k-1}
// starting from V_0 = (a_0..a_{k-1}).  The expanded characteristic polynomial
// p_m(x) = x^{k+m} - sum_j b_{m,j} x^{k-j-1} factors as p_0 * q_m where
// q_m(x) = x^m + sum_{i<m} b_{i,0} x^{m-i-1}, so each expansion step augments
// the spectrum by one root of q while preserving the original spectrum.
// The zero solution is asymptotically stable iff some ||V_m||_1 < 1.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poly.hpp"

namespace delaystab {

/// Coefficient vector of an expanded system: entries (b_{m,0}..b_{m,k-1})
/// at expansion order m.
struct CoeffVector {
    std::vector<double> entries;
    int order = 0;

    CoeffVector() = default;
    explicit CoeffVector(std::vector<double> e, int m = 0)
        : entries(std::move(e)), order(m) {
        if (entries.empty())
            throw std::invalid_argument("expand: coefficient vector must be non-empty");
        for (double v : entries)
            if (!std::isfinite(v))
                throw std::invalid_argument("expand: non-finite coefficient");
    }

    int dim() const { return static_cast<int>(entries.size()); }
};

inline double l1_norm(const CoeffVector& v) {
    double s = 0.0;
    for (double x : v.entries) s += std::abs(x);
    return s;
}

/// One expansion step.  The recurrence always multiplies by the order-0
/// coefficients, so the caller passes the original vector alongside the
/// current one.  Throws "expansion-diverged" if an entry leaves the finite
/// range.
inline CoeffVector expand_once(const CoeffVector& original, const CoeffVector& current) {
    const int k = original.dim();
    if (current.dim() != k)
        throw std::invalid_argument("expand: dimension mismatch");
    std::vector<double> next(static_cast<std::size_t>(k));
    const double head = current.entries[0];
    for (int j = 0; j + 1 < k; ++j)
        next[static_cast<std::size_t>(j)] =
            original.entries[static_cast<std::size_t>(j)] * head +
            current.entries[static_cast<std::size_t>(j) + 1];
    next[static_cast<std::size_t>(k) - 1] = head * original.entries.back();
    for (double v : next)
        if (!std::isfinite(v)) throw std::runtime_error("expansion-diverged");
    CoeffVector out;
    out.entries = std::move(next);
    out.order = current.order + 1;
    return out;
}

/// V_m after m steps, computed iteratively in O(m*k).
inline CoeffVector expand_m(const CoeffVector& v0, int m) {
    if (m < 0) throw std::invalid_argument("expand: order must be >= 0");
    CoeffVector v = v0;
    v.order = 0;
    for (int i = 0; i < m; ++i) v = expand_once(v0, v);
    return v;
}

/// Characteristic polynomial of the expanded system:
/// x^{k+m} - sum_j b_{m,j} x^{k-j-1} (the leading m lower-degree slots are 0).
inline MonicPoly from_coeff_vector(const CoeffVector& v) {
    std::vector<double> c(static_cast<std::size_t>(v.dim() + v.order), 0.0);
    for (int j = 0; j < v.dim(); ++j)
        c[static_cast<std::size_t>(v.order + j)] = -v.entries[static_cast<std::size_t>(j)];
    return MonicPoly(std::move(c));
}

/// Cofactor polynomial q_m(x) = x^m + sum_{i=0}^{m-1} b_{i,0} x^{m-i-1};
/// satisfies p_m = p_0 * q_m.  q_0 = 1.
inline MonicPoly q_polynomial(const CoeffVector& v0, int m) {
    if (m < 0) throw std::invalid_argument("expand: order must be >= 0");
    std::vector<double> c(static_cast<std::size_t>(m));
    CoeffVector v = v0;
    v.order = 0;
    for (int i = 0; i < m; ++i) {
        c[static_cast<std::size_t>(i)] = v.entries[0];
        v = expand_once(v0, v);
    }
    return MonicPoly(std::move(c));
}

/// Stability verdict.  witness_m is present exactly when kind == Stable and
/// is the first order whose expanded norm drops below 1.  norms records every
/// ||V_m||_1 computed along the way (possibly just ||V_0||_1 when the
/// necessary conditions already decide).
struct Verdict {
    enum class Kind { Stable, Unstable, MarginalSuspected, Inconclusive };

    Kind kind = Kind::Inconclusive;
    std::optional<int> witness_m;
    std::string reason;
    std::vector<double> norms;
};

inline const char* to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::Stable: return "Stable";
        case Verdict::Kind::Unstable: return "Unstable";
        case Verdict::Kind::MarginalSuspected: return "MarginalSuspected";
        case Verdict::Kind::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

struct ClassifyOptions {
    int m_max = 200;
    double tol = 1e-9;
    bool use_oracle = true;
    double divergence_bound = 1e12;
};

/// Decide Schur stability of the system with coefficient vector v0.
///
/// Order of business:
///  1. necessary conditions on the characteristic polynomial; a strict
///     failure is Unstable, a boundary hit is MarginalSuspected;
///  2. iterate the expansion and return Stable at the first
///     ||V_m||_1 < 1 - tol;
///  3. if the norms blow past divergence_bound, ask the root oracle: a root
///     outside the disk confirms Unstable, a root on the circle is
///     MarginalSuspected, all roots inside means the growth was transient and
///     iteration resumes;
///  4. when the order budget runs out, the oracle (if enabled) classifies by
///     the largest root modulus; spectral radius < 1 guarantees a finite
///     witness, so the iteration is granted an extended budget until it finds
///     one.  Without the oracle the answer is Inconclusive.
inline Verdict classify_schur(const CoeffVector& v0, const ClassifyOptions& opt = {}) {
    Verdict verdict;
    const MonicPoly p0 = from_coeff_vector(v0);
    const NecessaryReport nec = necessary_conditions(p0, opt.tol);

    verdict.norms.push_back(l1_norm(v0));
    if (nec.overall() == CheckStatus::Fail) {
        verdict.kind = Verdict::Kind::Unstable;
        verdict.reason = nec.det == CheckStatus::Fail       ? "necessary-det"
                         : nec.one == CheckStatus::Fail     ? "necessary-at-one"
                                                            : "necessary-at-minus-one";
        return verdict;
    }
    if (nec.overall() == CheckStatus::Marginal) {
        verdict.kind = Verdict::Kind::MarginalSuspected;
        verdict.reason = "necessary-marginal";
        return verdict;
    }

    auto oracle_radius = [&]() -> std::optional<double> {
        if (!opt.use_oracle) return std::nullopt;
        try {
            return spectral_radius(p0, opt.tol);
        } catch (const std::runtime_error&) {
            return std::nullopt;
        }
    };

    CoeffVector v = v0;
    v.order = 0;
    long budget = opt.m_max;
    bool divergence_waived = false;
    for (long m = 0;; ++m) {
        const double norm = (m == 0) ? verdict.norms[0] : l1_norm(v);
        if (m > 0) verdict.norms.push_back(norm);

        if (norm < 1.0 - opt.tol) {
            verdict.kind = Verdict::Kind::Stable;
            verdict.witness_m = static_cast<int>(m);
            verdict.reason = "norm-witness";
            return verdict;
        }

        const bool diverged = !divergence_waived && norm > opt.divergence_bound;
        if (diverged || m >= budget) {
            const std::optional<double> rho = oracle_radius();
            if (!rho) {
                verdict.kind = Verdict::Kind::Inconclusive;
                verdict.reason = diverged ? "norm-divergence" : "mmax-exhausted";
                return verdict;
            }
            if (*rho > 1.0 + opt.tol) {
                verdict.kind = Verdict::Kind::Unstable;
                verdict.reason = diverged ? "norm-divergence" : "oracle-root-outside";
                return verdict;
            }
            if (*rho >= 1.0 - opt.tol) {
                verdict.kind = Verdict::Kind::MarginalSuspected;
                verdict.reason = "oracle-marginal";
                return verdict;
            }
            // Spectral radius strictly inside: a norm witness exists at some
            // finite order, so extend the budget far enough to reach it.
            const long extended = static_cast<long>(
                std::min(1e6, std::ceil(120.0 / -std::log(*rho))));
            budget = std::max({budget * 2, extended, m + 1});
            divergence_waived = true;
            if (m >= budget) {
                verdict.kind = Verdict::Kind::Inconclusive;
                verdict.reason = "mmax-exhausted";
                return verdict;
            }
        }

        try {
            v = expand_once(v0, v);
        } catch (const std::runtime_error&) {
            // Overflowed past the representable range: same handling as the
            // divergence bound, minus the option to resume.
            const std::optional<double> rho = oracle_radius();
            if (rho && *rho > 1.0 + opt.tol) {
                verdict.kind = Verdict::Kind::Unstable;
                verdict.reason = "norm-divergence";
            } else if (rho && *rho >= 1.0 - opt.tol) {
                verdict.kind = Verdict::Kind::MarginalSuspected;
                verdict.reason = "oracle-marginal";
            } else {
                verdict.kind = Verdict::Kind::Inconclusive;
                verdict.reason = "norm-divergence";
            }
            return verdict;
        }
    }
}

inline Verdict classify_schur(const CoeffVector& v0, int m_max, double tol = 1e-9,
                              bool use_oracle = true) {
    ClassifyOptions opt;
    opt.m_max = m_max;
    opt.tol = tol;
    opt.use_oracle = use_oracle;
    return classify_schur(v0, opt);
}

/// Which sets are fixed under the expanded update rule at a given stage.
enum class FixedPointSet : std::uint8_t { TrivialOnly, AllReals };

/// Fixed-point bookkeeping for the family of expanded systems.
///
/// alpha_k = sum_j a_j decides stage 0: the update F_0 fixes every real
/// constant iff alpha_k = 1.  beta[m] = sum_{i<=m} b_{i,0} decides the later
/// stages: F_{m+1} fixes every real constant iff alpha_k = 1 or beta[m] = -1.
struct FixedPointStructure {
    double alpha_k = 0.0;
    std::vector<double> beta;             // beta[m], m = 0..m_max
    std::vector<FixedPointSet> stages;    // stage s = 0..m_max+1
};

inline FixedPointStructure fixed_point_structure(const CoeffVector& v0, int m_max = 200,
                                                 double tol = 1e-9) {
    if (m_max < 0) throw std::invalid_argument("expand: m_max must be >= 0");
    FixedPointStructure out;
    for (double a : v0.entries) out.alpha_k += a;
    const bool all_reals_base = std::abs(out.alpha_k - 1.0) < tol;

    out.beta.reserve(static_cast<std::size_t>(m_max) + 1);
    out.stages.reserve(static_cast<std::size_t>(m_max) + 2);
    out.stages.push_back(all_reals_base ? FixedPointSet::AllReals
                                        : FixedPointSet::TrivialOnly);
    CoeffVector v = v0;
    v.order = 0;
    double running = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        running += v.entries[0];
        out.beta.push_back(running);
        const bool all_reals = all_reals_base || std::abs(running + 1.0) < tol;
        out.stages.push_back(all_reals ? FixedPointSet::AllReals
                                       : FixedPointSet::TrivialOnly);
        if (m < m_max) v = expand_once(v0, v);
    }
    return out;
}

}  // namespace delaystab
