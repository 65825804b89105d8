// Command-line front end: residual checks, classification, PDE bridge,
// ansatz solving, brackets, Monte Carlo checks and the built-in catalog.

#include "stosym/ansatz.hpp"
#include "stosym/catalog.hpp"
#include "stosym/errors.hpp"
#include "stosym/io.hpp"
#include "stosym/montecarlo.hpp"
#include "stosym/numeric_expr.hpp"
#include "stosym/pde_bridge.hpp"
#include "stosym/report.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stosym;

namespace {

ModelFile load_model(const std::string& name_or_path) {
    for (const auto& n : catalog_names()) {
        if (n == name_or_path) return load(n).file;
    }
    return read_model_file(name_or_path);
}

// k for Doob-type operations: the stored one, else the classifier's.
Expr potential_for(const ModelFile& f, const NamedSymmetry& s) {
    if (s.k) return *s.k;
    const SymmetryClass c = classify(f.sde, s.V);
    if (c.kind != SymmetryKind::Doob || !c.k) {
        throw DoobResidualNonzero("symmetry " + s.name + " has no stored k and is classified " + to_string(c.kind));
    }
    return *c.k;
}

SolveMode parse_mode(const std::string& m) {
    if (m == "general") return SolveMode::General;
    if (m == "doob") return SolveMode::Doob;
    throw CLI::ValidationError("--mode", "expected general or doob");
}

void emit(const Json& j, const std::string& out) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw Error("cannot write " + out);
        f << text;
    }
}

int default_threads() {
    if (const char* env = std::getenv("STOSYM_THREADS")) return std::atoi(env);
    return 0;
}

struct Options {
    std::string model;
    std::vector<std::string> symmetries;
    bool all = false;
    std::string mode = "general";
    bool reverse = false;
    std::string basis_file;
    std::string transform;
    std::size_t paths = 0;
    double dt = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> params;
    std::string csv;
    bool unweighted = false;
    bool verify_all = false;
    std::string export_dir;
    std::string output;
    int threads = default_threads();
};

bool cmd_check(const Options& o, Json& j) {
    const ModelFile f = load_model(o.model);
    bool pass = true;
    Json results = Json::array();
    if (o.mode == "pde") {
        std::vector<std::pair<std::string, PdeSymmetry>> targets;
        for (const auto& p : f.pdes) {
            if (o.all || o.symmetries.empty() ||
                std::find(o.symmetries.begin(), o.symmetries.end(), p.name) != o.symmetries.end()) {
                targets.emplace_back(p.name, p.xi);
            }
        }
        for (const auto& s : f.symmetries) {
            if (std::find(o.symmetries.begin(), o.symmetries.end(), s.name) != o.symmetries.end()) {
                targets.emplace_back(s.name, sde_to_pde(f.sde, s.V, potential_for(f, s)));
            }
        }
        if (targets.empty()) throw Error("no PDE generator selected");
        for (const auto& [name, xi] : targets) {
            const auto r = pde_residual(f.sde, xi);
            pass = pass && r.all_zero();
            results.push_back({{"name", name}, {"generator", to_json(xi)}, {"residual", to_json(r)}});
        }
    } else {
        std::vector<const NamedSymmetry*> targets;
        for (const auto& s : f.symmetries) {
            if (o.all || o.symmetries.empty() ||
                std::find(o.symmetries.begin(), o.symmetries.end(), s.name) != o.symmetries.end()) {
                targets.push_back(&s);
            }
        }
        if (targets.empty()) throw Error("no symmetry selected");
        for (const auto* s : targets) {
            const auto r = o.mode == "doob" ? doob_residual(f.sde, s->V, potential_for(f, *s)) : sde_residual(f.sde, s->V);
            pass = pass && r.all_zero();
            results.push_back({{"name", s->name}, {"residual", to_json(r)}});
        }
    }
    j["model"] = f.sde.name;
    j["mode"] = o.mode;
    j["results"] = std::move(results);
    return pass;
}

bool cmd_classify(const Options& o, Json& j) {
    const ModelFile f = load_model(o.model);
    bool pass = true;
    Json results = Json::array();
    for (const auto& name : o.symmetries) {
        const auto c = classify(f.sde, f.symmetry(name).V);
        pass = pass && c.is_symmetry && c.kind != SymmetryKind::Undecided;
        results.push_back({{"name", name}, {"class", to_json(c)}});
    }
    j["model"] = f.sde.name;
    j["results"] = std::move(results);
    return pass;
}

bool cmd_bridge(const Options& o, Json& j) {
    const ModelFile f = load_model(o.model);
    Json results = Json::array();
    for (const auto& name : o.symmetries) {
        if (o.reverse) {
            const NamedPde* p = nullptr;
            for (const auto& x : f.pdes) {
                if (x.name == name) p = &x;
            }
            if (!p) throw Error("no PDE generator named " + name);
            const auto [v, k] = pde_to_sde(f.sde, p->xi);
            Json r = to_json(v);
            r["k"] = to_string(k);
            results.push_back({{"name", name}, {"symmetry", std::move(r)}});
        } else {
            const auto& s = f.symmetry(name);
            const Expr k = potential_for(f, s);
            results.push_back({{"name", name}, {"generator", to_json(sde_to_pde(f.sde, s.V, k))},
                               {"round_trip", round_trip_check(f.sde, s.V, k)}});
        }
    }
    j["model"] = f.sde.name;
    j["reverse"] = o.reverse;
    j["results"] = std::move(results);
    return true;
}

bool cmd_solve(const Options& o, Json& j) {
    const ModelFile f = load_model(o.model);
    std::optional<AnsatzBasis> basis = f.ansatz;
    if (!o.basis_file.empty()) {
        std::ifstream in(o.basis_file);
        if (!in) throw Error("cannot open basis file " + o.basis_file);
        std::ostringstream text;
        ModelFile bare;
        bare.sde = f.sde;
        text << print_model(bare) << "\n" << in.rdbuf();
        basis = parse_model(text.str()).ansatz;
    }
    if (!basis) throw Error("no ansatz basis: give --basis or an [ansatz] section");
    const SolveMode mode = parse_mode(o.mode);
    const SymmetrySpace space = solve(f.sde, *basis, mode);
    std::vector<std::size_t> members;
    const ClosureReport closure = closure_check(f.sde, space, &members);
    j["model"] = f.sde.name;
    j["space"] = to_json(space);
    j["closure"] = to_json(closure);
    j["closure"]["members"] = members;
    Json named = Json::array();
    for (const auto& s : f.symmetries) {
        const SymmetryGenerator g{s.V, mode == SolveMode::Doob ? s.k : std::nullopt};
        if (mode == SolveMode::Doob && !s.k) continue;
        named.push_back({{"name", s.name}, {"in_space", contains(space, g)}});
    }
    j["catalog_membership"] = std::move(named);
    // A truncated general-mode basis need not be closed under brackets, so
    // closure only decides the verdict in Doob mode.
    return mode == SolveMode::General || closure.closed;
}

bool cmd_bracket(const Options& o, Json& j) {
    if (o.symmetries.size() != 2) throw CLI::ValidationError("--symmetry", "bracket needs exactly two symmetries");
    const ModelFile f = load_model(o.model);
    const auto& a = f.symmetry(o.symmetries[0]);
    const auto& b = f.symmetry(o.symmetries[1]);
    const InfTransform v = bracket(f.sde.vars, a.V, b.V);
    j["model"] = f.sde.name;
    j["a"] = a.name;
    j["b"] = b.name;
    j["bracket"] = to_json(v);
    const auto r = sde_residual(f.sde, v);
    j["is_symmetry"] = r.all_zero();
    Json named = Json::array();
    for (const auto& s : f.symmetries) {
        if (s.V == v) named.push_back(s.name);
        if (!v.is_zero() && s.V == v * Coefficient(-1)) named.push_back("-" + s.name);
    }
    j["equals"] = std::move(named);
    return r.all_zero();
}

bool cmd_mc(const Options& o, Json& j) {
    const ModelFile f = load_model(o.model);
    McConfig cfg = f.mc.value_or(McConfig{});
    if (o.paths) cfg.n_paths = o.paths;
    if (o.dt > 0) cfg.dt = o.dt;
    if (o.horizon > 0) cfg.horizon = o.horizon;
    if (o.seed_set) cfg.seed = o.seed;
    cfg.threads = o.threads;
    for (const auto& p : o.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected NAME=VALUE");
        cfg.param_values[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
    }
    if (cfg.x0.empty()) cfg.x0.assign(f.sde.dim(), 0.0);
    const FiniteTransform& t = f.transform(o.transform).T;

    const PathBundle base = simulate(f.sde, cfg);
    const PathBundle transformed = transform_paths(base, t);
    // The transformed paths solve E_T(mu, sigma) started at Phi(x0).
    const Sde target = et_apply(f.sde, t);
    McConfig direct_cfg = cfg;
    direct_cfg.seed = cfg.seed + 1;
    const auto phi = compile(t.phi, f.sde.vars, cfg.param_values);
    for (std::size_t i = 0; i < phi.size(); ++i) direct_cfg.x0[i] = phi[i](cfg.x0.data());
    const PathBundle direct = simulate(target, direct_cfg);
    const CompareReport cmp = weak_compare(transformed, direct, {}, !o.unweighted);

    j["model"] = f.sde.name;
    j["transform"] = o.transform;
    j["config"] = to_json(cfg);
    j["direct_seed"] = direct_cfg.seed;
    j["weighted"] = !o.unweighted;
    j["weak_compare"] = to_json(cmp);
    const Estimate w = mean_weight(transformed);
    j["mean_weight"] = {{"mean", w.mean}, {"se", w.se}};
    j["effective_sample_size"] = effective_sample_size(transformed);

    if (f.sde.nonexplosive) {
        if (const auto hpot = recover_doob_potential(f.sde, t.h)) {
            const DensityRecipe recipe = density_recipe(f.sde, t.h, hpot);
            j["doob_potential"] = to_string(*hpot);
            j["doob_pathwise"] = to_json(doob_pathwise_check(base, recipe));
        }
    }
    if (!o.csv.empty()) {
        std::ofstream out(o.csv);
        if (!out) throw Error("cannot write " + o.csv);
        write_csv(out, transformed);
        j["csv"] = o.csv;
    }
    return cmp.pass;
}

bool cmd_catalog(const Options& o, Json& j) {
    j["models"] = catalog_names();
    if (!o.export_dir.empty()) {
        std::filesystem::create_directories(o.export_dir);
        for (const auto& n : catalog_names()) {
            std::ofstream out(o.export_dir + "/" + n + ".model");
            if (!out) throw Error("cannot write into " + o.export_dir);
            out << print_model(load(n).file);
        }
        j["exported_to"] = o.export_dir;
    }
    if (!o.verify_all) return true;
    bool pass = true;
    Json reports = Json::array();
    for (const auto& n : catalog_names()) {
        const VerifyReport r = verify_all(load(n));
        pass = pass && r.pass;
        reports.push_back(to_json(r));
    }
    j["verify_all"] = std::move(reports);
    j["pass"] = pass;
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetries of SDEs with random time changes, rotations and measure changes"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--output,-o", o.output, "Write the JSON report to a file");
    app.add_option("--threads", o.threads, "Worker threads (default: STOSYM_THREADS or all cores)");

    auto* check = app.add_subcommand("check", "Residuals of the determining equations");
    check->add_option("model", o.model, "Catalog name or model file")->required();
    check->add_option("--symmetry", o.symmetries, "Symmetry (or PDE generator) name");
    check->add_flag("--all", o.all, "All symmetries of the model");
    check->add_option("--mode", o.mode, "general, doob or pde")->check(CLI::IsMember({"general", "doob", "pde"}));

    auto* cls = app.add_subcommand("classify", "Doob / almost Doob / non-Doob classification");
    cls->add_option("model", o.model)->required();
    cls->add_option("--symmetry", o.symmetries)->required();

    auto* bridge_cmd = app.add_subcommand("bridge", "Map a Doob symmetry to the backward equation and back");
    bridge_cmd->add_option("model", o.model)->required();
    bridge_cmd->add_option("--symmetry", o.symmetries)->required();
    bridge_cmd->add_flag("--reverse", o.reverse, "Map PDE generators back to SDE symmetries");

    auto* solve_cmd = app.add_subcommand("solve", "Solve the determining equations in an ansatz basis");
    solve_cmd->add_option("model", o.model)->required();
    solve_cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"general", "doob"}));
    solve_cmd->add_option("--basis", o.basis_file, "File with an [ansatz] section");

    auto* bracket_cmd = app.add_subcommand("bracket", "Lie bracket of two symmetries");
    bracket_cmd->add_option("model", o.model)->required();
    bracket_cmd->add_option("--symmetry", o.symmetries)->required()->expected(2);

    auto* mc = app.add_subcommand("mc", "Monte Carlo weak-symmetry check of a finite transformation");
    mc->add_option("model", o.model)->required();
    mc->add_option("--transform", o.transform)->required();
    mc->add_option("--paths", o.paths);
    mc->add_option("--dt", o.dt);
    mc->add_option("--horizon", o.horizon);
    mc->add_option("--seed", o.seed)->each([&](const std::string&) { o.seed_set = true; });
    mc->add_option("--param", o.params, "Parameter value NAME=VALUE");
    mc->add_option("--csv", o.csv, "Dump transformed paths as CSV");
    mc->add_flag("--unweighted", o.unweighted, "Ignore the Girsanov weights (control run)");

    auto* cat = app.add_subcommand("catalog", "Built-in models");
    cat->add_flag("--verify-all", o.verify_all, "Check every built-in claim");
    cat->add_option("--export", o.export_dir, "Write the models as model files into a directory");

    CLI11_PARSE(app, argc, argv);

    try {
        catalog_self_test();
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }

    try {
        Json j = report_header(app.get_subcommands().front()->get_name());
        bool pass = false;
        if (*check) pass = cmd_check(o, j);
        if (*cls) pass = cmd_classify(o, j);
        if (*bridge_cmd) pass = cmd_bridge(o, j);
        if (*solve_cmd) pass = cmd_solve(o, j);
        if (*bracket_cmd) pass = cmd_bracket(o, j);
        if (*mc) pass = cmd_mc(o, j);
        if (*cat) pass = cmd_catalog(o, j);
        j["pass"] = pass;
        emit(j, o.output);
        return pass ? 0 : 1;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
