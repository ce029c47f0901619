#pragma once

// Command-line front end.  Every subcommand builds a JSON document and then
// renders it as JSON (full precision) or indented text (6 significant
// digits); sweeps can stream CSV instead.  Exit codes: 0 success, 2 invalid
// input, 3 computational failure.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynamics.hpp"
#include "expand.hpp"
#include "expr.hpp"
#include "jury.hpp"
#include "models.hpp"
#include "poly.hpp"
#include "serialize.hpp"
#include "sweep.hpp"

namespace delaystab {

namespace cli_detail {

inline std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(s);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) throw std::invalid_argument("empty entry in list: " + s);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0')
            throw std::invalid_argument("not a number: '" + token + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

inline std::pair<double, double> parse_range(const std::string& s) {
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("range must look like lo:hi, got '" + s + "'");
    const std::vector<double> lo = parse_csv_doubles(s.substr(0, colon));
    const std::vector<double> hi = parse_csv_doubles(s.substr(colon + 1));
    if (lo.size() != 1 || hi.size() != 1)
        throw std::invalid_argument("range must look like lo:hi, got '" + s + "'");
    return {lo[0], hi[0]};
}

inline std::pair<int, int> parse_grid(const std::string& s) {
    const std::size_t x = s.find('x');
    if (x == std::string::npos)
        throw std::invalid_argument("grid must look like NxM, got '" + s + "'");
    try {
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("grid must look like NxM, got '" + s + "'");
    }
}

inline std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(s);
    while (std::getline(ss, token, ','))
        if (!token.empty()) out.push_back(token);
    return out;
}

inline std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline bool all_primitive(const nlohmann::json& arr) {
    for (const auto& e : arr)
        if (e.is_object() || e.is_array()) return false;
    return true;
}

inline void text_dump(const nlohmann::json& j, std::ostream& os, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto& [key, val] : j.items()) {
            if (val.is_object() || (val.is_array() && !all_primitive(val))) {
                os << pad << key << ":\n";
                text_dump(val, os, indent + 2);
            } else {
                os << pad << key << ": ";
                text_dump(val, os, 0);
                os << '\n';
            }
        }
    } else if (j.is_array()) {
        if (all_primitive(j)) {
            if (indent) os << pad;
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                text_dump(j[i], os, 0);
            }
            os << ']';
            if (indent) os << '\n';
        } else {
            for (const auto& e : j) {
                os << pad << "-\n";
                text_dump(e, os, indent + 2);
            }
        }
    } else if (j.is_number_float()) {
        os << fmt6(j.get<double>());
    } else {
        os << j.dump();
    }
}

inline void emit(const nlohmann::json& j, const std::string& format, std::ostream& os) {
    if (format == "text")
        text_dump(j, os);
    else
        os << j.dump(2) << '\n';
}

inline nlohmann::json complex_json(const Complex& z) {
    return {{"re", z.real()}, {"im", z.imag()}};
}

inline nlohmann::json roots_json(const std::vector<Complex>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Complex& z : rs) arr.push_back(complex_json(z));
    return arr;
}

}  // namespace cli_detail

/// Closed parameter interval on which a scalar predicate holds.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline void to_json(nlohmann::json& j, const Interval& iv) {
    j = nlohmann::json::array({iv.lo, iv.hi});
}

/// Locate the maximal sub-intervals of [lo, hi] on which `inside` holds, by
/// an n_scan-point sign scan with bisection refinement of each boundary.
inline std::vector<Interval> find_condition_intervals(
    const std::function<bool(double)>& inside, double lo, double hi, int n_scan = 4096,
    double tol = 1e-9) {
    if (!(lo < hi) || n_scan < 2) throw std::invalid_argument("interval scan: bad range");
    std::vector<Interval> out;
    double open = lo;
    bool prev = inside(lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / n_scan;
        const bool cur = inside(x);
        if (cur == prev) continue;
        double a = lo + (hi - lo) * static_cast<double>(i - 1) / n_scan;
        double b = x;
        for (int it = 0; it < 200 && b - a > tol; ++it) {
            const double mid = 0.5 * (a + b);
            if (inside(mid) == prev)
                a = mid;
            else
                b = mid;
        }
        const double edge = 0.5 * (a + b);
        if (cur)
            open = edge;
        else
            out.push_back({open, edge});
        prev = cur;
    }
    if (prev) out.push_back({open, hi});
    return out;
}

// ---------------------------------------------------------------------------
// Built-in worked examples
// ---------------------------------------------------------------------------

namespace cli_detail {

inline nlohmann::json example_table1() {
    const CoeffVector v0({1.25, -0.375});
    nlohmann::json rows = nlohmann::json::array();
    for (int m = 0; m <= 4; ++m) {
        const CoeffVector vm = expand_m(v0, m);
        rows.push_back({{"m", m},
                        {"entries", vm.entries},
                        {"l1_v", l1_norm(vm)},
                        {"l1_p", 1.0 + l1_norm(vm)}});
    }
    return {{"name", "table1"}, {"rows", rows}};
}

inline nlohmann::json example_table2() {
    const CoeffVector v0({1.25, -0.375});
    nlohmann::json rows = nlohmann::json::array();
    for (int m = 1; m <= 4; ++m) {
        const MonicPoly qm = q_polynomial(v0, m);
        rows.push_back(
            {{"m", m}, {"coeffs", qm.coeffs}, {"zeros", roots_json(roots(qm))}});
    }
    return {{"name", "table2"}, {"rows", rows}};
}

inline nlohmann::json example_easy1() {
    const CoeffVector v0({1.25, -0.375});
    const MonicPoly p0 = from_coeff_vector(v0);
    const MonicPoly p1 = from_coeff_vector(expand_m(v0, 1));
    // The expanded update read as a three-term recurrence in its own right.
    const CoeffVector standalone({0.0, 19.0 / 16.0, -15.0 / 32.0});
    return {{"name", "easy1"},
            {"p0_roots", roots_json(roots(p0))},
            {"p1_roots", roots_json(roots(p1))},
            {"system_verdict", classify_schur(v0, 10)},
            {"standalone_verdict", classify_schur(standalone, 10)}};
}

inline nlohmann::json example_algebraic_c() {
    // Degree-5 characteristic polynomial with the free parameter c entering
    // the constant coefficient only.
    auto v0_of = [](double c) {
        return CoeffVector({7.0 / 5.0, -3509.0 / 3600.0, 2933.0 / 7200.0,
                            -3199.0 / 32400.0, c - 299959.0 / 16200.0});
    };
    auto p_of = [&v0_of](double c) { return from_coeff_vector(v0_of(c)); };
    const double clo = 14.0, chi = 21.0;

    const std::vector<Interval> i0 = find_condition_intervals(
        [&](double c) { return std::abs(eval(p_of(c), 0.0)) < 1.0; }, clo, chi);
    const std::vector<Interval> pos_at_one = find_condition_intervals(
        [&](double c) { return eval(p_of(c), 1.0) > 0.0; }, clo, chi);
    const std::vector<Interval> pos_at_minus_one = find_condition_intervals(
        [&](double c) { return -eval(p_of(c), -1.0) > 0.0; }, clo, chi);
    const std::vector<Interval> i3 = find_condition_intervals(
        [&](double c) { return l1_norm(expand_m(v0_of(c), 3)) < 1.0; }, clo, chi);

    auto rescaled = [&](double c, double R, int m) {
        const MonicPoly ps = scale_to_disk(p_of(c), R);
        std::vector<double> a(ps.coeffs.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = -ps.coeffs[i];
        return l1_norm(expand_m(CoeffVector(a), m)) < 1.0;
    };
    const std::vector<Interval> r15 = find_condition_intervals(
        [&](double c) { return rescaled(c, 1.5, 1); }, clo, chi);
    const std::vector<Interval> r125 = find_condition_intervals(
        [&](double c) { return rescaled(c, 1.25, 3); }, clo, chi);

    if (i0.size() != 1 || pos_at_one.size() != 1 || pos_at_minus_one.size() != 1 ||
        i3.size() != 1)
        throw std::runtime_error("interval discovery found an unexpected region count");

    return {{"name", "algebraic-c"},
            {"scan_range", nlohmann::json::array({clo, chi})},
            {"i0", i0[0]},
            {"at_one_bound", pos_at_one[0].hi},
            {"at_minus_one_bound", pos_at_minus_one[0].lo},
            {"i0_tilde", Interval{i0[0].lo, pos_at_one[0].hi}},
            {"i3", i3[0]},
            {"radius_1_5_v1", r15},
            {"radius_1_25_v3", r125}};
}

inline nlohmann::json example_new_fixed_points() {
    const DelayMap map = parse_delay_map("x1*exp(2-x0)+1", 2);
    auto diag0 = [&map](double x) {
        const std::array<double, 2> a{x, x};
        return map.eval(a);
    };
    auto diag1 = [&map](double x) {
        const std::array<double, 3> a{x, x, x};
        return eval_expanded(map, 1, a);
    };
    const std::vector<double> fp0 = find_fixed_points_1d(diag0, 0.0, 20.0, 4096, 1e-12);
    const std::vector<double> fp1 = find_fixed_points_1d(diag1, 0.0, 20.0, 4096, 1e-12);

    nlohmann::json classified = nlohmann::json::array();
    for (const double x : fp1) {
        const bool base = std::abs(diag0(x) - x) < 1e-6 * (1.0 + std::abs(x));
        nlohmann::json entry = {{"xbar", x}, {"fixed_point_of_base_map", base}};
        if (base) {
            const CoeffVector lin = linearize_at(map, x);
            nlohmann::json moduli = nlohmann::json::array();
            for (const Complex& z : roots(from_coeff_vector(lin)))
                moduli.push_back(std::abs(z));
            entry["coefficients"] = lin.entries;
            entry["verdict"] = classify_local(map, x);
            entry["root_moduli"] = moduli;
        }
        classified.push_back(entry);
    }
    return {{"name", "new-fixed-points"},
            {"map", "x1*exp(2-x0)+1"},
            {"base_diagonal_fixed_points", fp0},
            {"expanded_diagonal_fixed_points", fp1},
            {"classification", classified}};
}

inline nlohmann::json example_clark_final() {
    ScalarMap1D f = parse_scalar_map("2/(1+x0)");
    const ClarkParams p = make_clark(0.7, 3, f);
    const ConditionSet norms = clark_v0_vk_norms(p);
    const ConditionSet global = clark_global_check(p);

    // For f(t) = 2/(1+t) the inverse is explicit, so the numeric composition
    // g4 = f^{-1} o g3 can be checked against 2/g3(x) - 1 on the whole
    // working interval.
    const double gamma2 = global.value("gamma2");
    const double xstar = global.value("xstar");
    const double g3_right = global.value("g3_right");
    auto g3 = [&](double x) { return (gamma2 * x - f.eval(x)) / (gamma2 - 1.0); };
    auto f_inverse = [&](double y) {
        double hi = 1.0;
        int guard = 0;
        while (f.eval(hi) > y && ++guard < 400) hi *= 2.0;
        double lo = 0.0;
        for (int i = 0; i < 300 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            (f.eval(mid) > y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double max_dev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double x = xstar + (g3_right - xstar) * static_cast<double>(i) / 200;
        max_dev = std::max(max_dev, std::abs(f_inverse(g3(x)) - (2.0 / g3(x) - 1.0)));
    }
    return {{"name", "clark-final"},
            {"f", "2/(1+x0)"},
            {"a", 0.7},
            {"k", 3},
            {"norms", norms},
            {"global", global},
            {"g4_closed_form_max_dev", max_dev}};
}

}  // namespace cli_detail

/// Registry of reproducible worked examples.
inline nlohmann::json run_example(const std::string& name) {
    if (name == "table1") return cli_detail::example_table1();
    if (name == "table2") return cli_detail::example_table2();
    if (name == "easy1") return cli_detail::example_easy1();
    if (name == "algebraic-c") return cli_detail::example_algebraic_c();
    if (name == "new-fixed-points") return cli_detail::example_new_fixed_points();
    if (name == "clark-final") return cli_detail::example_clark_final();
    throw std::invalid_argument(
        "unknown example '" + name +
        "' (available: table1, table2, easy1, algebraic-c, new-fixed-points, clark-final)");
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Stability analysis for scalar delay difference equations"};
    app.require_subcommand(1);
    // Long-only help so single-letter model flags (--h and friends) stay free.
    app.set_help_flag("--help", "Print help");
    std::ostream& os = std::cout;

    // check-poly -------------------------------------------------------------
    auto* cp = app.add_subcommand(
        "check-poly", "Classify a monic polynomial by iterated coefficient expansion");
    cp->set_help_flag("--help", "Print help");
    std::string cp_coeffs, cp_oracle = "on", cp_format = "json";
    int cp_mmax = 200;
    double cp_tol = 1e-9;
    cp->add_option("--coeffs", cp_coeffs,
                   "Comma-separated c_0..c_{n-1} of x^n + c_0 x^{n-1} + ... + c_{n-1} "
                   "(signs as written in the polynomial, i.e. negated recurrence weights)")
        ->required();
    cp->add_option("--m-max", cp_mmax, "Expansion budget");
    cp->add_option("--tol", cp_tol, "Decision tolerance");
    cp->add_option("--oracle", cp_oracle, "Root oracle fallback")
        ->check(CLI::IsMember({"on", "off"}));
    cp->add_option("--format", cp_format)->check(CLI::IsMember({"json", "text"}));
    cp->callback([&] {
        const MonicPoly p(cli_detail::parse_csv_doubles(cp_coeffs));
        std::vector<double> a(p.coeffs.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = -p.coeffs[i];
        const Verdict v =
            classify_schur(CoeffVector(a), cp_mmax, cp_tol, cp_oracle == "on");
        cli_detail::emit({{"polynomial", p},
                          {"necessary", necessary_conditions(p, cp_tol)},
                          {"verdict", v}},
                         cp_format, os);
    });

    // jury -------------------------------------------------------------------
    auto* ju = app.add_subcommand("jury", "Classify a monic polynomial by table reduction");
    ju->set_help_flag("--help", "Print help");
    std::string ju_coeffs, ju_format = "json";
    double ju_tol = 1e-9;
    ju->add_option("--coeffs", ju_coeffs, "Same convention as check-poly")->required();
    ju->add_option("--tol", ju_tol, "Decision tolerance");
    ju->add_option("--format", ju_format)->check(CLI::IsMember({"json", "text"}));
    ju->callback([&] {
        const MonicPoly p(cli_detail::parse_csv_doubles(ju_coeffs));
        cli_detail::emit({{"polynomial", p},
                          {"table", jury_table(p, ju_tol)},
                          {"verdict", jury_stable(p, ju_tol)}},
                         ju_format, os);
    });

    // expand -----------------------------------------------------------------
    auto* ex = app.add_subcommand(
        "expand", "Print the expanded coefficient vectors and their norms");
    ex->set_help_flag("--help", "Print help");
    std::string ex_coeffs, ex_format = "json";
    int ex_mmax = 8;
    ex->add_option("--coeffs", ex_coeffs, "Same convention as check-poly")->required();
    ex->add_option("--m-max", ex_mmax, "Highest expansion order to print");
    ex->add_option("--format", ex_format)->check(CLI::IsMember({"json", "text"}));
    ex->callback([&] {
        if (ex_mmax < 0 || ex_mmax > 100000)
            throw std::invalid_argument("expand: m-max out of range");
        const MonicPoly p(cli_detail::parse_csv_doubles(ex_coeffs));
        std::vector<double> a(p.coeffs.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = -p.coeffs[i];
        const CoeffVector v0{a};
        nlohmann::json rows = nlohmann::json::array();
        for (int m = 0; m <= ex_mmax; ++m) {
            const CoeffVector vm = expand_m(v0, m);
            rows.push_back({{"m", m},
                            {"entries", vm.entries},
                            {"l1_v", l1_norm(vm)},
                            {"l1_p", 1.0 + l1_norm(vm)}});
        }
        cli_detail::emit({{"polynomial", p}, {"rows", rows}}, ex_format, os);
    });

    // classify-local ---------------------------------------------------------
    auto* cl = app.add_subcommand(
        "classify-local", "Linearize a delay map at a fixed point and classify it");
    cl->set_help_flag("--help", "Print help");
    std::string cl_f, cl_format = "json";
    int cl_k = 1, cl_mmax = 200;
    double cl_xbar = 0.0, cl_tol = 1e-9, cl_fd = 0.0, cl_lo = 0.0, cl_hi = 50.0;
    cl->add_option("--f", cl_f, "Update expression in x0..x{k-1} (x0 newest)")->required();
    cl->add_option("--k", cl_k, "Number of delay arguments")->required();
    auto* cl_xbar_opt = cl->add_option("--xbar", cl_xbar,
                                       "Fixed point (omit to scan the diagonal)");
    cl->add_option("--m-max", cl_mmax, "Expansion budget");
    cl->add_option("--tol", cl_tol, "Decision tolerance");
    cl->add_option("--fd-step", cl_fd, "Finite-difference step (0 = automatic)");
    cl->add_option("--lo", cl_lo, "Fixed-point scan lower bound");
    cl->add_option("--hi", cl_hi, "Fixed-point scan upper bound");
    cl->add_option("--format", cl_format)->check(CLI::IsMember({"json", "text"}));
    cl->callback([&] {
        const DelayMap map = parse_delay_map(cl_f, cl_k);
        std::vector<double> points;
        if (cl_xbar_opt->count() > 0)
            points.push_back(cl_xbar);
        else
            points = find_fixed_points_1d(
                [&map](double x) {
                    const std::vector<double> a(static_cast<std::size_t>(map.k), x);
                    return map.eval(a);
                },
                cl_lo, cl_hi, 2048, cl_tol);
        nlohmann::json arr = nlohmann::json::array();
        for (const double x : points) {
            const CoeffVector lin = linearize_at(map, x, cl_fd);
            arr.push_back({{"xbar", x},
                           {"coefficients", lin.entries},
                           {"verdict", classify_local(map, x, cl_mmax, cl_tol, cl_fd)}});
        }
        cli_detail::emit({{"map", cl_f}, {"fixed_points", arr}}, cl_format, os);
    });

    // orbit ------------------------------------------------------------------
    auto* ob = app.add_subcommand("orbit", "Iterate a delay map (or its expansion)");
    ob->set_help_flag("--help", "Print help");
    std::string ob_f, ob_init, ob_format = "json";
    int ob_k = 1, ob_m = 0, ob_steps = 1000, ob_window = 32, ob_random = 0;
    double ob_conv = 1e-9, ob_ilo = 0.0, ob_ihi = 5.0;
    std::uint64_t ob_seed = 0;
    bool ob_full = false;
    ob->add_option("--f", ob_f, "Update expression in x0..x{k-1} (x0 newest)")->required();
    ob->add_option("--k", ob_k, "Number of delay arguments")->required();
    ob->add_option("--m", ob_m, "Expansion order (history auto-calibrated from k values)");
    auto* ob_init_opt = ob->add_option("--init", ob_init,
                                       "Comma-separated initial history, oldest first");
    ob->add_option("--random-inits", ob_random, "Number of random initial histories");
    ob->add_option("--seed", ob_seed, "Seed for random initial histories");
    ob->add_option("--init-lo", ob_ilo, "Random history lower bound");
    ob->add_option("--init-hi", ob_ihi, "Random history upper bound");
    ob->add_option("--steps", ob_steps, "Iteration count");
    ob->add_option("--conv-tol", ob_conv, "Convergence spread tolerance (0 = never stop)");
    ob->add_option("--window", ob_window, "Trailing window for the convergence test");
    ob->add_flag("--full", ob_full, "Include the whole orbit in the output");
    ob->add_option("--format", ob_format)->check(CLI::IsMember({"json", "text"}));
    ob->callback([&] {
        const DelayMap map = parse_delay_map(ob_f, ob_k);
        auto run_one = [&](std::vector<double> init) {
            if (ob_m > 0 && static_cast<int>(init.size()) == ob_k)
                init = calibrate_initial(map, init, ob_m);
            const OrbitRecord rec =
                orbit_expanded(map, ob_m, init, ob_steps, ob_conv, ob_window);
            nlohmann::json j = rec;
            if (!ob_full) {
                const std::size_t tail = std::min<std::size_t>(10, rec.values.size());
                j["values"] = std::vector<double>(rec.values.end() - tail, rec.values.end());
            }
            return j;
        };
        nlohmann::json out = {{"map", ob_f}, {"m", ob_m}};
        if (ob_random > 0) {
            if (ob_init_opt->count() > 0)
                throw std::invalid_argument("orbit: --init and --random-inits conflict");
            std::mt19937_64 rng(ob_seed);
            std::uniform_real_distribution<double> dist(ob_ilo, ob_ihi);
            nlohmann::json arr = nlohmann::json::array();
            bool all = true;
            for (int i = 0; i < ob_random; ++i) {
                std::vector<double> init(static_cast<std::size_t>(ob_k));
                for (double& v : init) v = dist(rng);
                nlohmann::json j = run_one(init);
                all = all && j["converged"].get<bool>();
                arr.push_back(std::move(j));
            }
            out["orbits"] = std::move(arr);
            out["all_converged"] = all;
        } else {
            if (ob_init_opt->count() == 0)
                throw std::invalid_argument("orbit: need --init or --random-inits");
            out["orbit"] = run_one(cli_detail::parse_csv_doubles(ob_init));
        }
        cli_detail::emit(out, ob_format, os);
    });

    // ricker -----------------------------------------------------------------
    auto* ri = app.add_subcommand(
        "ricker", "Stocked recruitment model: conditions at the equilibrium");
    ri->set_help_flag("--help", "Print help");
    std::string ri_f, ri_format = "json";
    double ri_b = 1.0, ri_h = 1.0, ri_tol = 1e-9;
    bool ri_global = false;
    ri->add_option("--b", ri_b, "Growth parameter (f(0) scale)")->required();
    ri->add_option("--h", ri_h, "Stocking constant")->required();
    ri->add_option("--f", ri_f,
                   "Custom decreasing density factor in x0 (default exp(b-x0))");
    ri->add_flag("--global", ri_global, "Run the global attractivity check");
    ri->add_option("--tol", ri_tol, "Decision tolerance");
    ri->add_option("--format", ri_format)->check(CLI::IsMember({"json", "text"}));
    ri->callback([&] {
        const RickerParams p =
            ri_f.empty() ? make_exp_ricker(ri_b, ri_h)
                         : make_custom_ricker(ri_b, ri_h, parse_scalar_map(ri_f));
        nlohmann::json out = {
            {"params",
             {{"b", ri_b},
              {"h", ri_h},
              {"f", ri_f.empty() ? "exp(b-x0)" : ri_f}}},
            {"conditions", ricker_conditions(p)},
            {"exact", ricker_exact_verdict(p, ri_tol)},
        };
        if (p.kind == RickerKind::ExpFamily) {
            out["b_infinity"] = ricker_b_infinity(ri_h);
            try {
                const LcPoint lc = ricker_lc_boundary(ricker_equilibrium(p));
                out["lc_at_equilibrium"] = {{"h", lc.h}, {"b", lc.b}};
            } catch (const std::runtime_error&) {
                out["lc_at_equilibrium"] = nullptr;
            }
        }
        if (ri_global) out["global"] = ricker_global_check(p, 4096, ri_tol);
        cli_detail::emit(out, ri_format, os);
    });

    // clark ------------------------------------------------------------------
    auto* ck = app.add_subcommand(
        "clark", "Delayed recruitment model: norms and global attractivity");
    ck->set_help_flag("--help", "Print help");
    std::string ck_f, ck_format = "json";
    double ck_a = 0.5, ck_tol = 1e-9;
    int ck_k = 1;
    bool ck_global = false;
    ck->add_option("--a", ck_a, "Survival rate in (0,1)")->required();
    ck->add_option("--k", ck_k, "Recruitment delay")->required();
    ck->add_option("--f", ck_f, "Recruitment function in x0")->required();
    ck->add_flag("--global", ck_global, "Run the global attractivity check");
    ck->add_option("--tol", ck_tol, "Decision tolerance");
    ck->add_option("--format", ck_format)->check(CLI::IsMember({"json", "text"}));
    ck->callback([&] {
        const ClarkParams p = make_clark(ck_a, ck_k, parse_scalar_map(ck_f));
        nlohmann::json out = {{"params", {{"a", ck_a}, {"k", ck_k}, {"f", ck_f}}},
                              {"norms", clark_v0_vk_norms(p, ck_tol)}};
        if (ck_global) out["global"] = clark_global_check(p, 4096, ck_tol);
        cli_detail::emit(out, ck_format, os);
    });

    // sweep ------------------------------------------------------------------
    auto* sw = app.add_subcommand("sweep", "Grid-evaluate conditions over a parameter plane");
    sw->set_help_flag("--help", "Print help");
    std::string sw_plane, sw_grid = "400x400", sw_xr, sw_yr, sw_conds, sw_out,
                sw_format = "csv";
    int sw_k = 2;
    bool sw_complex = false;
    double sw_tol = 1e-9;
    sw->add_option("--plane", sw_plane, "One of eig, a0a2, hb, abeta")
        ->required()
        ->check(CLI::IsMember({"eig", "a0a2", "hb", "abeta"}));
    sw->add_option("--grid", sw_grid, "Cells per axis, NxM");
    sw->add_option("--x-range", sw_xr, "lo:hi")->required();
    sw->add_option("--y-range", sw_yr, "lo:hi")->required();
    sw->add_option("--conditions", sw_conds, "Comma-separated condition names");
    sw->add_option("--k", sw_k, "Delay for the abeta plane");
    sw->add_flag("--complex", sw_complex, "Eigenvalue plane: cells are x +- iy");
    sw->add_option("--tol", sw_tol, "Decision tolerance");
    sw->add_option("--out", sw_out, "CSV path (sidecar <path>.meta.json); default stdout");
    sw->add_option("--format", sw_format)->check(CLI::IsMember({"csv", "json"}));
    sw->callback([&] {
        SweepSpec spec;
        if (sw_plane == "eig") spec.plane = Plane::EigPlane;
        else if (sw_plane == "a0a2") spec.plane = Plane::A0A2Plane;
        else if (sw_plane == "hb") spec.plane = Plane::HBPlane;
        else spec.plane = Plane::ABetaPlane;
        const auto [nx, ny] = cli_detail::parse_grid(sw_grid);
        const auto [xlo, xhi] = cli_detail::parse_range(sw_xr);
        const auto [ylo, yhi] = cli_detail::parse_range(sw_yr);
        spec.x = {xlo, xhi, nx};
        spec.y = {ylo, yhi, ny};
        spec.conditions = cli_detail::split_names(sw_conds);
        spec.k = sw_k;
        spec.eig_complex = sw_complex;
        spec.tol = sw_tol;
        const RegionGrid grid = run_sweep(spec);
        if (sw_format == "json") {
            const nlohmann::json out = {{"meta", sweep_metadata(spec, grid)},
                                        {"grid", grid}};
            if (sw_out.empty()) {
                os << out.dump(2) << '\n';
            } else {
                std::ofstream file(sw_out);
                if (!file) throw std::runtime_error("cannot open " + sw_out);
                file << out.dump(2) << '\n';
            }
            return;
        }
        if (sw_out.empty()) {
            write_csv(grid, spec, os);
        } else {
            std::ofstream file(sw_out);
            if (!file) throw std::runtime_error("cannot open " + sw_out);
            write_csv(grid, spec, file);
            std::ofstream meta(sw_out + ".meta.json");
            if (!meta) throw std::runtime_error("cannot open " + sw_out + ".meta.json");
            meta << sweep_metadata(spec, grid).dump(2) << '\n';
        }
    });

    // example ----------------------------------------------------------------
    auto* xp = app.add_subcommand("example", "Reproduce a built-in worked example");
    xp->set_help_flag("--help", "Print help");
    std::string xp_name, xp_format = "json";
    xp->add_option("--name", xp_name,
                   "table1 | table2 | easy1 | algebraic-c | new-fixed-points | clark-final")
        ->required();
    xp->add_option("--format", xp_format)->check(CLI::IsMember({"json", "text"}));
    xp->callback([&] { cli_detail::emit(run_example(xp_name), xp_format, os); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace delaystab
