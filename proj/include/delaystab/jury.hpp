#pragma once

// Tabular Schur stability test, independent of root finding and of the
// expansion machinery.  Works on the reflection-coefficient form of the
// classical table: each reduction row
//   next_j = (row_j - kappa * row_{len-1-j}) / (1 - kappa^2),  kappa = row.back()
// keeps the array monic, and the polynomial is Schur stable iff every
// extracted kappa satisfies |kappa| < 1.

#include <cmath>
#include <cstddef>
#include <vector>

#include "expand.hpp"
#include "poly.hpp"

namespace delaystab {

struct JuryTable {
    std::vector<std::vector<double>> rows;   // rows[0] = (1, c_0..c_{n-1})
    std::vector<double> reflections;         // kappa per reduction, inner first
    double at_one = 0.0;                     // p(1)
    double at_minus_one = 0.0;               // (-1)^n p(-1)
};

/// Build the reduction table.  Stops early if a pivot 1 - kappa^2 degenerates.
inline JuryTable jury_table(const MonicPoly& p, double tol = 1e-9) {
    JuryTable t;
    t.at_one = eval(p, 1.0);
    const double pm1 = eval(p, -1.0);
    t.at_minus_one = (p.degree() % 2 == 0) ? pm1 : -pm1;

    std::vector<double> row(static_cast<std::size_t>(p.degree()) + 1);
    row[0] = 1.0;
    std::copy(p.coeffs.begin(), p.coeffs.end(), row.begin() + 1);
    t.rows.push_back(row);
    while (row.size() > 1) {
        const double kappa = row.back();
        t.reflections.push_back(kappa);
        const double pivot = 1.0 - kappa * kappa;
        if (std::abs(pivot) < tol || std::abs(kappa) > 1.0) break;
        std::vector<double> next(row.size() - 1);
        for (std::size_t j = 0; j + 1 < row.size(); ++j)
            next[j] = (row[j] - kappa * row[row.size() - 1 - j]) / pivot;
        next[0] = 1.0;  // exact by construction; avoid rounding residue
        row = std::move(next);
        t.rows.push_back(row);
    }
    return t;
}

/// Verdict by table reduction.  First-row necessary checks (p(1) > 0,
/// (-1)^n p(-1) > 0, |c_{n-1}| < 1) run before any reduction; a pivot within
/// tol of degenerate stops with MarginalSuspected since the remaining rows
/// would be meaningless.
inline Verdict jury_stable(const MonicPoly& p, double tol = 1e-9) {
    Verdict v;
    const NecessaryReport nec = necessary_conditions(p, tol);
    if (nec.overall() == CheckStatus::Fail) {
        v.kind = Verdict::Kind::Unstable;
        v.reason = nec.det == CheckStatus::Fail   ? "first-row-det"
                   : nec.one == CheckStatus::Fail ? "first-row-at-one"
                                                  : "first-row-at-minus-one";
        return v;
    }
    if (nec.overall() == CheckStatus::Marginal) {
        v.kind = Verdict::Kind::MarginalSuspected;
        v.reason = "first-row-marginal";
        return v;
    }

    std::vector<double> row(static_cast<std::size_t>(p.degree()) + 1);
    row[0] = 1.0;
    std::copy(p.coeffs.begin(), p.coeffs.end(), row.begin() + 1);
    for (int step = 0; row.size() > 1; ++step) {
        const double kappa = row.back();
        if (std::abs(std::abs(kappa) - 1.0) < tol) {
            v.kind = Verdict::Kind::MarginalSuspected;
            v.reason = "pivot-degenerate-row-" + std::to_string(step);
            return v;
        }
        if (std::abs(kappa) > 1.0) {
            v.kind = Verdict::Kind::Unstable;
            v.reason = "reduction-row-" + std::to_string(step);
            return v;
        }
        const double pivot = 1.0 - kappa * kappa;
        std::vector<double> next(row.size() - 1);
        for (std::size_t j = 0; j + 1 < row.size(); ++j)
            next[j] = (row[j] - kappa * row[row.size() - 1 - j]) / pivot;
        next[0] = 1.0;
        row = std::move(next);
    }
    v.kind = Verdict::Kind::Stable;
    v.reason = "table-complete";
    return v;
}

}  // namespace delaystab
