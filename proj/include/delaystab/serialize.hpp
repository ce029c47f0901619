#pragma once

// JSON views of the core types (nlohmann::json ADL hooks).

#include <json.hpp>

#include "dynamics.hpp"
#include "expand.hpp"
#include "jury.hpp"
#include "models.hpp"
#include "poly.hpp"
#include "sweep.hpp"

namespace delaystab {

inline void to_json(nlohmann::json& j, const MonicPoly& p) {
    j = nlohmann::json{{"degree", p.degree()}, {"coeffs", p.coeffs}};
}

inline void to_json(nlohmann::json& j, const CoeffVector& v) {
    j = nlohmann::json{{"order", v.order}, {"entries", v.entries}, {"l1", l1_norm(v)}};
}

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Marginal: return "marginal";
    }
    return "?";
}

inline void to_json(nlohmann::json& j, const NecessaryReport& r) {
    j = nlohmann::json{
        {"det", {{"status", to_string(r.det)}, {"value", r.det_value}}},
        {"at_one", {{"status", to_string(r.one)}, {"value", r.at_one}}},
        {"at_minus_one", {{"status", to_string(r.minus_one)}, {"value", r.at_minus_one}}},
        {"overall", to_string(r.overall())},
    };
}

inline void to_json(nlohmann::json& j, const Verdict& v) {
    j = nlohmann::json{{"kind", to_string(v.kind)}, {"reason", v.reason}, {"norms", v.norms}};
    if (v.witness_m)
        j["witness_m"] = *v.witness_m;
    else
        j["witness_m"] = nullptr;
}

inline void to_json(nlohmann::json& j, const ConditionSet& cs) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : cs.entries)
        checks.push_back({{"name", e.name}, {"holds", e.holds}, {"lhs", e.lhs}, {"rhs", e.rhs}});
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [n, v] : cs.values) vals[n] = v;
    j = nlohmann::json{{"checks", checks}, {"values", vals}};
}

inline void to_json(nlohmann::json& j, const OrbitRecord& r) {
    j = nlohmann::json{{"values", r.values},
                       {"converged", r.converged},
                       {"iterations_used", r.iterations_used}};
    if (r.converged)
        j["limit"] = r.limit;
    else
        j["limit"] = nullptr;
}

inline void to_json(nlohmann::json& j, const JuryTable& t) {
    j = nlohmann::json{{"rows", t.rows},
                       {"reflections", t.reflections},
                       {"at_one", t.at_one},
                       {"at_minus_one", t.at_minus_one}};
}

inline void to_json(nlohmann::json& j, const RegionGrid& g) {
    j = nlohmann::json{{"nx", g.nx},
                       {"ny", g.ny},
                       {"condition_names", g.condition_names},
                       {"flags", g.flags},
                       {"valid", g.valid}};
}

/// Metadata block written next to sweep CSV files.
inline nlohmann::json sweep_metadata(const SweepSpec& spec, const RegionGrid& grid) {
    return nlohmann::json{
        {"plane", to_string(spec.plane)},
        {"x", {{"lo", spec.x.lo}, {"hi", spec.x.hi}, {"n_cells", spec.x.n_cells}}},
        {"y", {{"lo", spec.y.lo}, {"hi", spec.y.hi}, {"n_cells", spec.y.n_cells}}},
        {"k", spec.k},
        {"eig_complex", spec.eig_complex},
        {"condition_names", grid.condition_names},
        {"flag_encoding", "bit i set when condition_names[i] holds; -1 marks invalid cells"},
    };
}

}  // namespace delaystab
