#include "stosym/report.hpp"

#include "stosym/io.hpp"

namespace stosym {

namespace {

Json strings(const ExprVec& v) {
    Json out = Json::array();
    for (const auto& e : v) out.push_back(to_string(e));
    return out;
}

Json strings(const ExprMat& m) {
    Json out = Json::array();
    for (const auto& row : m) out.push_back(strings(row));
    return out;
}

Json coefficients(const std::vector<Coefficient>& c) {
    Json out = Json::array();
    for (const auto& x : c) out.push_back(to_string(x));
    return out;
}

}  // namespace

Json report_header(const std::string& command) {
    Json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    return j;
}

Json to_json(const ResidualReport& r) {
    Json j;
    j["all_zero"] = r.all_zero();
    j["failing"] = r.failing();
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        entries.push_back({{"label", e.label}, {"residual", to_string(e.residual)}, {"informational", e.informational}});
    }
    j["entries"] = std::move(entries);
    j["notes"] = r.notes;
    return j;
}

Json to_json(const SymmetryClass& c) {
    Json j;
    j["kind"] = to_string(c.kind);
    j["is_symmetry"] = c.is_symmetry;
    j["k"] = c.k ? Json(to_string(*c.k)) : Json(nullptr);
    j["witness"] = c.witness ? Json::array({c.witness->first, c.witness->second}) : Json(nullptr);
    j["reason"] = c.reason;
    return j;
}

Json to_json(const PdeSymmetry& xi) {
    return {{"m", to_string(xi.m)}, {"phi", strings(xi.phi)}, {"k", to_string(xi.k)}};
}

Json to_json(const InfTransform& v) {
    return {{"Y", strings(v.Y)}, {"C", strings(v.C)}, {"tau", to_string(v.tau)}, {"H", strings(v.H)}};
}

Json to_json(const SymmetrySpace& s) {
    Json j;
    j["mode"] = s.mode == SolveMode::Doob ? "doob" : "general";
    j["unknowns"] = s.unknowns;
    j["equations"] = s.equations;
    j["dimension"] = s.dimension();
    Json gens = Json::array();
    for (const auto& g : s.generators) {
        Json x = to_json(g.V);
        if (g.k) x["k"] = to_string(*g.k);
        gens.push_back(std::move(x));
    }
    j["generators"] = std::move(gens);
    return j;
}

Json to_json(const ClosureReport& c) {
    Json j;
    j["closed"] = c.closed;
    Json consts = Json::array();
    for (const auto& s : c.constants) consts.push_back({{"i", s.i}, {"j", s.j}, {"coefficients", coefficients(s.coefficients)}});
    j["structure_constants"] = std::move(consts);
    j["offending"] = c.offending ? Json::array({c.offending->first, c.offending->second}) : Json(nullptr);
    return j;
}

Json to_json(const McConfig& c) {
    Json j;
    j["paths"] = c.n_paths;
    j["dt"] = c.dt;
    j["horizon"] = c.horizon;
    j["seed"] = c.seed;
    j["x0"] = c.x0;
    j["eval_times"] = c.eval_times;
    j["degree"] = c.degree;
    Json params = Json::object();
    for (const auto& [k, v] : c.param_values) params[k] = v;
    j["params"] = std::move(params);
    return j;
}

Json to_json(const CompareReport& r) {
    Json j;
    j["pass"] = r.pass;
    j["thresholds"] = {{"z_max", r.thresholds.z_max}, {"p_min", r.thresholds.p_min}};
    j["max_abs_z"] = r.max_abs_z;
    j["min_p"] = r.min_p;
    Json moments = Json::array();
    for (const auto& m : r.moments) {
        moments.push_back({{"time", m.time}, {"moment", m.label}, {"transformed", m.transformed}, {"direct", m.direct},
                           {"se", m.se}, {"z", m.z}});
    }
    j["moments"] = std::move(moments);
    Json ks = Json::array();
    for (const auto& k : r.ks) {
        ks.push_back({{"time", k.time}, {"coordinate", k.coordinate}, {"statistic", k.statistic}, {"n_eff", k.n_eff},
                      {"p_value", k.p_value}});
    }
    j["ks"] = std::move(ks);
    return j;
}

Json to_json(const PathwiseReport& r) {
    return {{"paths", r.paths}, {"max_discrepancy", r.max_discrepancy}, {"mean_discrepancy", r.mean_discrepancy}};
}

Json to_json(const VerifyReport& r) {
    Json j;
    j["model"] = r.model;
    j["pass"] = r.pass;
    Json syms = Json::array();
    for (const auto& s : r.symmetries) {
        Json x{{"symmetry", s.symmetry}, {"pass", s.pass}, {"failing", s.residual.failing()}, {"probe_max", s.probe_max},
               {"probe_tolerance", 1e-9}};
        if (s.doob) x["doob_failing"] = s.doob->failing();
        syms.push_back(std::move(x));
    }
    j["symmetries"] = std::move(syms);
    Json classes = Json::array();
    for (const auto& c : r.classes) {
        classes.push_back({{"symmetry", c.symmetry}, {"expected", to_string(c.expected)}, {"actual", to_json(c.actual)},
                           {"pass", c.pass}});
    }
    j["classification"] = std::move(classes);
    Json bridges = Json::array();
    for (const auto& b : r.bridges) {
        bridges.push_back({{"generator", b.generator}, {"source", b.source.empty() ? "trivial" : b.source},
                           {"scale", b.scale.get_str()}, {"match", b.match}, {"pde_symmetry", b.pde_symmetry},
                           {"round_trip", b.round_trip}, {"pass", b.pass}});
    }
    j["bridge"] = std::move(bridges);
    Json remarks = Json::array();
    for (const auto& m : r.remarks) {
        remarks.push_back({{"symmetry", m.symmetry}, {"gradient", m.gradient}, {"not_harmonic", m.not_harmonic},
                           {"pass", m.pass}});
    }
    j["potential_remarks"] = std::move(remarks);
    j["failures"] = r.failures;
    return j;
}

}  // namespace stosym
