#include "stosym/doob.hpp"

#include "stosym/errors.hpp"

#include <algorithm>
#include <variant>

namespace stosym {

namespace {

Expr drop_constant(const Expr& e) { return e - Expr(e.constant_part()); }

struct Fixed {
    Expr k;
};
struct DependsOnDiffusive {};
struct CannotDecide {
    std::string reason;
};
using FixResult = std::variant<Fixed, DependsOnDiffusive, CannotDecide>;

// Adds a function g of the non-diffusive variables so that
// L(k0 + g) = source. Only the single-clock case (one non-diffusive
// variable with a constant nonzero drift) is solved.
FixResult fix_free_part(const Sde& sde, const Expr& k0, const std::vector<std::string>& free_vars,
                        const Expr& source) {
    const Expr r = source - generator_apply(sde, k0);
    if (r.is_zero()) return Fixed{k0};
    for (const auto& v : r.variables()) {
        if (std::find(free_vars.begin(), free_vars.end(), v) == free_vars.end()) {
            bool clock_drift_constant = true;
            for (const auto& f : free_vars) clock_drift_constant = clock_drift_constant && sde.drift[sde.index_of(f)].is_constant();
            if (clock_drift_constant) return DependsOnDiffusive{};
            return CannotDecide{"the drift of a non-diffusive variable depends on the diffusive ones"};
        }
    }
    if (free_vars.empty()) return DependsOnDiffusive{};
    if (free_vars.size() > 1) return CannotDecide{"more than one non-diffusive variable"};
    const std::string& f = free_vars.front();
    const Expr& c = sde.drift[sde.index_of(f)];
    if (!c.is_constant()) return CannotDecide{"drift of the non-diffusive variable is not constant"};
    if (c.is_zero()) return DependsOnDiffusive{};
    auto g = (r / c).integrate(f);
    if (!g) return CannotDecide{"the correction in " + f + " leaves the expression class"};
    return Fixed{drop_constant(k0 + *g)};
}

}  // namespace

std::string to_string(SymmetryKind k) {
    switch (k) {
        case SymmetryKind::Doob: return "doob";
        case SymmetryKind::AlmostDoob: return "almost_doob";
        case SymmetryKind::NonDoob: return "non_doob";
        case SymmetryKind::Undecided: return "undecided";
    }
    return "undecided";
}

PotentialRecovery recover_k(const Sde& sde, const ExprVec& H) {
    const auto& vars = sde.vars;
    const std::size_t m = sde.noise_dim();
    if (H.size() != m) throw Error("Girsanov generator has the wrong length");
    PotentialRecovery out;

    std::vector<std::size_t> diffusive;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        bool any = false;
        for (const auto& e : sde.diffusion[i]) any = any || !e.is_zero();
        if (any) {
            diffusive.push_back(i);
        } else {
            out.free_vars.push_back(vars[i]);
        }
    }

    if (is_zero(H)) {
        out.status = PotentialRecovery::Status::Found;
        return out;
    }
    if (diffusive.size() != m) {
        out.reason = "diffusion is not square on the diffusive variables";
        return out;
    }

    ExprMat st = zero_matrix(m, m);  // st[a][j] = sigma[S_j][a]
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t j = 0; j < m; ++j) st[a][j] = sde.diffusion[diffusive[j]][a];
    }
    const auto inv = inverse_adjugate(st);
    if (!inv) {
        out.reason = "diffusion is not invertible within the expression class";
        return out;
    }
    const ExprVec g = *inv * H;

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto& vi = vars[diffusive[i]];
            const auto& vj = vars[diffusive[j]];
            if (g[i].diff(vj) != g[j].diff(vi)) {
                out.status = PotentialRecovery::Status::NotClosed;
                out.witness = {vi, vj};
                out.reason = "sigma^{-1} H is not a closed form";
                return out;
            }
        }
    }

    Expr k;
    for (std::size_t j = 0; j < m; ++j) {
        const auto& v = vars[diffusive[j]];
        const Expr rest = g[j] - k.diff(v);
        if (rest.is_zero()) continue;
        auto part = rest.integrate(v);
        if (!part) {
            out.reason = "the potential leaves the expression class in " + v;
            return out;
        }
        k += *part;
    }
    k = drop_constant(k);
    if (transpose(sde.diffusion) * gradient(vars, k) != H) {
        out.reason = "recovered potential does not reproduce H";
        return out;
    }
    out.status = PotentialRecovery::Status::Found;
    out.particular = k;
    return out;
}

SymmetryClass classify(const Sde& sde, const InfTransform& v) {
    validate(sde, v);
    SymmetryClass out;
    out.is_symmetry = is_symmetry(sde, v);

    const PotentialRecovery rec = recover_k(sde, v.H);
    switch (rec.status) {
        case PotentialRecovery::Status::NotClosed:
            out.kind = SymmetryKind::NonDoob;
            out.witness = rec.witness;
            out.reason = rec.reason;
            return out;
        case PotentialRecovery::Status::Undecided:
            out.kind = SymmetryKind::Undecided;
            out.reason = rec.reason;
            return out;
        case PotentialRecovery::Status::Found:
            break;
    }

    const FixResult fix = fix_free_part(sde, rec.particular, rec.free_vars, Expr());
    if (const auto* f = std::get_if<Fixed>(&fix)) {
        out.kind = SymmetryKind::Doob;
        out.k = f->k;
        if (!generator_apply(sde, f->k).is_zero()) throw Error("internal: Doob potential is not harmonic");
    } else if (std::holds_alternative<DependsOnDiffusive>(fix)) {
        out.kind = SymmetryKind::AlmostDoob;
        out.k = rec.particular;
        out.reason = "no function of the non-diffusive variables makes the potential space-time harmonic";
    } else {
        out.kind = SymmetryKind::Undecided;
        out.reason = std::get<CannotDecide>(fix).reason;
    }
    return out;
}

ResidualReport doob_condition_residual(const Sde& sde, const ExprVec& h, const Expr& hpot) {
    if (h.size() != sde.noise_dim()) throw Error("Girsanov drift has the wrong length");
    for (const auto& e : h) sde.check(e, "h");
    sde.check(hpot, "potential");
    ResidualReport r;
    const ExprVec diff = h - transpose(sde.diffusion) * gradient(sde.vars, hpot);
    for (std::size_t a = 0; a < h.size(); ++a) r.entries.push_back({"doob.h[" + std::to_string(a + 1) + "]", diff[a]});
    Expr half_norm;
    for (const auto& e : h) half_norm += e * e;
    half_norm *= Coefficient(Rational(1, 2));
    r.entries.push_back({"doob.pair", half_norm + generator_apply(sde, hpot)});
    return r;
}

std::optional<Expr> recover_doob_potential(const Sde& sde, const ExprVec& h) {
    const PotentialRecovery rec = recover_k(sde, h);
    if (rec.status != PotentialRecovery::Status::Found) return std::nullopt;
    Expr half_norm;
    for (const auto& e : h) half_norm += e * e;
    half_norm *= Coefficient(Rational(1, 2));
    const FixResult fix = fix_free_part(sde, rec.particular, rec.free_vars, -half_norm);
    const auto* f = std::get_if<Fixed>(&fix);
    if (!f) return std::nullopt;
    if (!doob_condition_residual(sde, h, f->k).all_zero()) return std::nullopt;
    return f->k;
}

DensityRecipe density_recipe(const Sde& sde, const ExprVec& h, const std::optional<Expr>& hpot) {
    if (!sde.nonexplosive) throw NonExplosiveRequired("density formula needs a nonexplosive SDE");
    if (h.size() != sde.noise_dim()) throw Error("Girsanov drift has the wrong length");
    DensityRecipe out;
    out.theta = h;
    for (const auto& e : h) out.half_norm += e * e;
    out.half_norm *= Coefficient(Rational(1, 2));
    if (hpot) {
        if (doob_condition_residual(sde, h, *hpot).all_zero()) out.doob_potential = *hpot;
    } else {
        out.doob_potential = recover_doob_potential(sde, h);
    }
    return out;
}

}  // namespace stosym
