#include "stosym/ansatz.hpp"

#include "stosym/errors.hpp"
#include "stosym/linalg.hpp"
#include "stosym/transform.hpp"

#include <exception>

namespace stosym {

namespace {

std::string one_based(std::size_t a) { return "[" + std::to_string(a + 1) + "]"; }

// Unit unknown: the component `key` set to f, everything else zero.
SymmetryGenerator unit(const Sde& sde, SolveMode mode, const std::string& key, const Expr& f) {
    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();
    SymmetryGenerator g{InfTransform::zero(n, m), std::nullopt};
    if (mode == SolveMode::Doob) g.k = Expr();
    for (std::size_t i = 0; i < n; ++i) {
        if (key == "Y[" + sde.vars[i] + "]") {
            g.V.Y[i] = f;
            return g;
        }
    }
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            if (key == "C" + one_based(a) + one_based(b)) {
                g.V.C[a][b] = f;
                g.V.C[b][a] = -f;
                return g;
            }
        }
        if (key == "H" + one_based(a)) {
            g.V.H[a] = f;
            return g;
        }
    }
    if (key == "tau") {
        g.V.tau = f;
        return g;
    }
    if (key == "k" && mode == SolveMode::Doob) {
        g.k = f;
        return g;
    }
    throw Error("unknown ansatz component " + key);
}

using FlatKey = std::pair<std::size_t, Monomial>;
using FlatVector = std::map<FlatKey, Coefficient>;

void flatten_into(FlatVector& out, std::size_t slot, const Expr& e) {
    for (const auto& [mono, c] : e.terms()) out.emplace(FlatKey{slot, mono}, c);
}

FlatVector flatten(const SymmetryGenerator& g, SolveMode mode) {
    FlatVector out;
    std::size_t slot = 0;
    for (const auto& e : g.V.Y) flatten_into(out, slot++, e);
    for (std::size_t a = 0; a < g.V.C.size(); ++a) {
        for (std::size_t b = a + 1; b < g.V.C.size(); ++b) flatten_into(out, slot++, g.V.C[a][b]);
    }
    flatten_into(out, slot++, g.V.tau);
    for (const auto& e : g.V.H) flatten_into(out, slot++, e);
    if (mode == SolveMode::Doob) flatten_into(out, slot++, g.k.value_or(Expr()));
    return out;
}

SymmetryGenerator combine(const std::vector<SymmetryGenerator>& span, const std::vector<Coefficient>& coeffs,
                          SolveMode mode) {
    SymmetryGenerator out{InfTransform::zero(span.front().V.Y.size(), span.front().V.H.size()), std::nullopt};
    if (mode == SolveMode::Doob) out.k = Expr();
    for (std::size_t j = 0; j < span.size(); ++j) {
        if (coeffs[j].is_zero()) continue;
        out.V = out.V + span[j].V * coeffs[j];
        if (mode == SolveMode::Doob) *out.k += span[j].k.value_or(Expr()) * Expr(coeffs[j]);
    }
    return out;
}

}  // namespace

const ExprVec& AnsatzBasis::for_component(const std::string& key) const {
    auto it = overrides.find(key);
    return it == overrides.end() ? functions : it->second;
}

std::vector<std::string> component_keys(const Sde& sde, SolveMode mode) {
    std::vector<std::string> keys;
    for (const auto& v : sde.vars) keys.push_back("Y[" + v + "]");
    const std::size_t m = sde.noise_dim();
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) keys.push_back("C" + one_based(a) + one_based(b));
    }
    keys.push_back("tau");
    for (std::size_t a = 0; a < m; ++a) keys.push_back("H" + one_based(a));
    if (mode == SolveMode::Doob) keys.push_back("k");
    return keys;
}

SymmetrySpace solve(const Sde& sde, const AnsatzBasis& basis, SolveMode mode) {
    sde.validate();
    for (const auto& f : basis.functions) sde.check(f, "ansatz basis");
    for (const auto& [key, fs] : basis.overrides) {
        for (const auto& f : fs) sde.check(f, "ansatz basis " + key);
    }

    std::vector<SymmetryGenerator> units;
    for (const auto& key : component_keys(sde, mode)) {
        for (const auto& f : basis.for_component(key)) units.push_back(unit(sde, mode, key, f));
    }
    const std::size_t n_cols = units.size();

    // The residual of each unit unknown is one column of the linear system.
    std::vector<std::map<std::pair<std::size_t, Monomial>, Coefficient>> cols(n_cols);
    std::vector<std::exception_ptr> errors(n_cols);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < n_cols; ++j) {
        try {
            const ResidualReport r = mode == SolveMode::Doob ? doob_residual(sde, units[j].V, *units[j].k)
                                                             : sde_residual(sde, units[j].V);
            for (std::size_t e = 0; e < r.entries.size(); ++e) {
                if (r.entries[e].informational) continue;
                for (const auto& [mono, c] : r.entries[e].residual.terms()) cols[j].emplace(std::pair{e, mono}, c);
            }
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::map<std::pair<std::size_t, Monomial>, SparseRow> rows_by_key;
    for (std::size_t j = 0; j < n_cols; ++j) {
        for (const auto& [key, c] : cols[j]) rows_by_key[key][j] = c;
    }
    std::vector<SparseRow> rows;
    rows.reserve(rows_by_key.size());
    for (auto& [key, row] : rows_by_key) rows.push_back(std::move(row));

    SymmetrySpace space;
    space.mode = mode;
    space.unknowns = n_cols;
    space.equations = rows.size();
    const Rref rref = row_reduce(std::move(rows), n_cols);
    for (const auto& v : nullspace(rref)) {
        SymmetryGenerator g = combine(units, v, mode);
        const bool ok = mode == SolveMode::Doob ? is_doob_symmetry(sde, g.V, *g.k) : is_symmetry(sde, g.V);
        if (!ok) throw Error("internal: solved generator fails the determining equations");
        space.generators.push_back(std::move(g));
    }
    return space;
}

std::optional<std::vector<Coefficient>> express_in_span(const std::vector<SymmetryGenerator>& span,
                                                        const SymmetryGenerator& target, SolveMode mode) {
    if (span.empty()) {
        if (flatten(target, mode).empty()) return std::vector<Coefficient>{};
        return std::nullopt;
    }
    std::vector<FlatVector> columns;
    columns.reserve(span.size());
    for (const auto& g : span) columns.push_back(flatten(g, mode));
    return solve_columns(columns, flatten(target, mode));
}

bool contains(const SymmetrySpace& space, const SymmetryGenerator& g) {
    return express_in_span(space.generators, g, space.mode).has_value();
}

ClosureReport closure_check(const Sde& sde, const std::vector<InfTransform>& generators) {
    ClosureReport out;
    std::vector<SymmetryGenerator> span;
    for (const auto& v : generators) span.push_back({v, std::nullopt});
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            const InfTransform b = bracket(sde.vars, generators[i], generators[j]);
            auto c = express_in_span(span, {b, std::nullopt}, SolveMode::General);
            if (!c) {
                out.closed = false;
                out.offending = std::pair{i, j};
                return out;
            }
            out.constants.push_back({i, j, std::move(*c)});
        }
    }
    return out;
}

ClosureReport closure_check(const Sde& sde, const SymmetrySpace& space, std::vector<std::size_t>* members) {
    std::vector<InfTransform> gens;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < space.generators.size(); ++i) {
        if (space.generators[i].V.is_zero()) continue;
        gens.push_back(space.generators[i].V);
        idx.push_back(i);
    }
    ClosureReport r = closure_check(sde, gens);
    for (auto& c : r.constants) {
        c.i = idx[c.i];
        c.j = idx[c.j];
    }
    if (r.offending) r.offending = std::pair{idx[r.offending->first], idx[r.offending->second]};
    if (members) *members = idx;
    return r;
}

}  // namespace stosym
