#pragma once

// Parameter-plane sweeps.  Each cell of a rectangular grid is classified by a
// list of named conditions; the results pack into one flag word per cell so
// region plots can be drawn straight from the CSV output.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "expand.hpp"
#include "models.hpp"

namespace delaystab {

enum class Plane {
    EigPlane,    // x, y are the two eigenvalues (or Re/Im of a complex pair)
    A0A2Plane,   // x = -a2, y = a0 of the stocked-recruitment linearization
    HBPlane,     // x = h (stocking), y = b (growth), exponential family
    ABetaPlane,  // x = a (survival), y = beta (recruitment slope)
};

inline const char* to_string(Plane p) {
    switch (p) {
        case Plane::EigPlane: return "eig";
        case Plane::A0A2Plane: return "a0a2";
        case Plane::HBPlane: return "hb";
        case Plane::ABetaPlane: return "abeta";
    }
    return "?";
}

struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    int n_cells = 400;
};

/// Conditions default to the plane's full set when left empty:
///   eig:   m0, m1, m2, stable
///   a0a2:  v0, v2, v3, exact
///   hb:    v0, v2, v3, exact, binf
///   abeta: norm_v0, norm_vk, norm_vk1
struct SweepSpec {
    Plane plane = Plane::EigPlane;
    AxisSpec x;
    AxisSpec y;
    std::vector<std::string> conditions;
    int k = 2;                 // delay for the a-beta plane
    bool eig_complex = false;  // eigenvalue plane: treat (x,y) as x +- iy
    double tol = 1e-9;
};

/// Flags are bit-packed in the order of condition_names (bit i set means
/// condition i holds).  Cells where the model could not be evaluated are
/// marked invalid and carry flags 0.
struct RegionGrid {
    int nx = 0;
    int ny = 0;
    std::vector<std::uint32_t> flags;  // row-major, index iy*nx + ix
    std::vector<std::uint8_t> valid;
    std::vector<std::string> condition_names;

    std::uint32_t at(int ix, int iy) const {
        return flags[static_cast<std::size_t>(iy) * nx + ix];
    }
    bool valid_at(int ix, int iy) const {
        return valid[static_cast<std::size_t>(iy) * nx + ix] != 0;
    }
};

namespace detail {

inline double cell_center(const AxisSpec& ax, int i) {
    return ax.lo + (ax.hi - ax.lo) * (i + 0.5) / ax.n_cells;
}

inline std::vector<std::string> default_conditions(Plane plane) {
    switch (plane) {
        case Plane::EigPlane: return {"m0", "m1", "m2", "stable"};
        case Plane::A0A2Plane: return {"v0", "v2", "v3", "exact"};
        case Plane::HBPlane: return {"v0", "v2", "v3", "exact", "binf"};
        case Plane::ABetaPlane: return {"norm_v0", "norm_vk", "norm_vk1"};
    }
    return {};
}

inline std::uint32_t pack_conditions(const ConditionSet& cs,
                                     const std::vector<std::string>& names) {
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (cs.holds(names[i])) w |= (1u << i);
    return w;
}

/// Eigenvalue plane cell: the linear two-term recurrence whose
/// characteristic roots are the requested pair.
inline ConditionSet eig_cell(double x, double y, bool complex_pair) {
    double a0, a1;
    bool exact;
    if (complex_pair) {
        a0 = 2.0 * x;
        a1 = -(x * x + y * y);
        exact = x * x + y * y < 1.0;
    } else {
        a0 = x + y;
        a1 = -x * y;
        exact = std::abs(x) < 1.0 && std::abs(y) < 1.0;
    }
    ConditionSet cs;
    const CoeffVector v0({a0, a1});
    for (int m = 0; m < 3; ++m) {
        const double n = l1_norm(expand_m(v0, m));
        cs.add("m" + std::to_string(m), n < 1.0, n, 1.0);
    }
    cs.add("stable", exact, exact ? 1.0 : 0.0, 1.0);
    return cs;
}

}  // namespace detail

/// Classify every cell center of the requested plane.  Runs sequentially so
/// the output is reproducible bit for bit.
inline RegionGrid run_sweep(const SweepSpec& spec) {
    if (spec.x.n_cells < 2 || spec.y.n_cells < 2)
        throw std::invalid_argument("sweep: need at least 2 cells per axis");
    if (!(spec.x.lo < spec.x.hi) || !(spec.y.lo < spec.y.hi))
        throw std::invalid_argument("sweep: axis range must be increasing");

    RegionGrid grid;
    grid.nx = spec.x.n_cells;
    grid.ny = spec.y.n_cells;
    grid.flags.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0u);
    grid.valid.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 1u);

    const std::vector<std::string> defaults = detail::default_conditions(spec.plane);
    grid.condition_names = spec.conditions.empty() ? defaults : spec.conditions;
    for (const std::string& name : grid.condition_names) {
        bool known = false;
        for (const std::string& d : defaults) known = known || d == name;
        if (!known) throw std::invalid_argument("sweep: unknown condition " + name);
    }

    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y = detail::cell_center(spec.y, iy);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = detail::cell_center(spec.x, ix);
            const std::size_t idx = static_cast<std::size_t>(iy) * grid.nx + ix;
            try {
                ConditionSet cs;
                switch (spec.plane) {
                    case Plane::EigPlane:
                        cs = detail::eig_cell(x, y, spec.eig_complex);
                        break;
                    case Plane::A0A2Plane:
                        cs = ricker_conditions_at(y, -x);
                        break;
                    case Plane::HBPlane: {
                        cs = ricker_conditions(make_exp_ricker(y, x));
                        const double binf = ricker_b_infinity(x);
                        cs.add("binf", y < binf, y, binf);
                        break;
                    }
                    case Plane::ABetaPlane: {
                        if (!(x > 0.0) || !(x < 1.0))
                            throw std::invalid_argument("survival out of range");
                        cs = clark_norms_at(x, spec.k, y);
                        break;
                    }
                }
                grid.flags[idx] = detail::pack_conditions(cs, grid.condition_names);
            } catch (const std::exception&) {
                grid.valid[idx] = 0;
                grid.flags[idx] = 0;
            }
        }
    }
    return grid;
}

/// Plain CSV dump: header "x,y,flags", one row per cell, full double
/// precision on the coordinates.  Invalid cells print flags -1.
inline void write_csv(const RegionGrid& grid, const SweepSpec& spec, std::ostream& os) {
    os << "x,y,flags\n";
    char buf[64];
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            std::snprintf(buf, sizeof buf, "%.17g", detail::cell_center(spec.x, ix));
            os << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", detail::cell_center(spec.y, iy));
            os << buf << ',';
            if (grid.valid_at(ix, iy))
                os << grid.at(ix, iy);
            else
                os << -1;
            os << '\n';
        }
    }
}

}  // namespace delaystab
