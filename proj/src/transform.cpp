#include "stosym/transform.hpp"

#include "stosym/errors.hpp"

namespace stosym {

namespace {

bool is_identity_map(const std::vector<std::string>& vars, const ExprVec& phi) {
    if (phi.size() != vars.size()) return false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (phi[i] != Expr::var(vars[i])) return false;
    }
    return true;
}

// Phi^{-1}, or nullopt for the identity map.
std::optional<ExprVec> pullback_map(const std::vector<std::string>& vars, const FiniteTransform& t) {
    if (is_identity_map(vars, t.phi)) return std::nullopt;
    if (!t.phi_inv) throw MissingInverse("transformation has a non-identity map but no declared inverse");
    return t.phi_inv;
}

Expr pull(const std::vector<std::string>& vars, const Expr& f, const std::optional<ExprVec>& inv) {
    return inv ? compose_with(vars, f, *inv) : f;
}
ExprVec pull(const std::vector<std::string>& vars, const ExprVec& f, const std::optional<ExprVec>& inv) {
    return inv ? compose_with(vars, f, *inv) : f;
}
ExprMat pull(const std::vector<std::string>& vars, const ExprMat& f, const std::optional<ExprVec>& inv) {
    return inv ? compose_with(vars, f, *inv) : f;
}

}  // namespace

InfTransform InfTransform::zero(std::size_t n, std::size_t m) {
    return InfTransform{ExprVec(n), zero_matrix(m, m), Expr(), ExprVec(m)};
}

bool InfTransform::is_zero() const { return stosym::is_zero(Y) && stosym::is_zero(C) && tau.is_zero() && stosym::is_zero(H); }

InfTransform InfTransform::operator+(const InfTransform& o) const {
    return InfTransform{Y + o.Y, C + o.C, tau + o.tau, H + o.H};
}

InfTransform InfTransform::operator*(const Coefficient& c) const {
    const Expr s(c);
    return InfTransform{scale(Y, s), scale(C, s), tau * s, scale(H, s)};
}

FiniteTransform identity_transform(const std::vector<std::string>& vars, std::size_t m) {
    FiniteTransform t;
    for (const auto& v : vars) t.phi.push_back(Expr::var(v));
    t.phi_inv = t.phi;
    t.B = identity_matrix(m);
    t.eta = Expr(1);
    t.h = ExprVec(m);
    return t;
}

Expr compose_with(const std::vector<std::string>& vars, const Expr& f, const ExprVec& phi) {
    if (is_identity_map(vars, phi)) return f;
    std::map<std::string, Expr> sub;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (phi[i] != Expr::var(vars[i])) sub.emplace(vars[i], phi[i]);
    }
    return f.substitute(sub);
}

ExprVec compose_with(const std::vector<std::string>& vars, const ExprVec& f, const ExprVec& phi) {
    ExprVec out;
    out.reserve(f.size());
    for (const auto& e : f) out.push_back(compose_with(vars, e, phi));
    return out;
}

ExprMat compose_with(const std::vector<std::string>& vars, const ExprMat& f, const ExprVec& phi) {
    ExprMat out;
    out.reserve(f.size());
    for (const auto& row : f) out.push_back(compose_with(vars, row, phi));
    return out;
}

void validate(const Sde& sde, const FiniteTransform& t) {
    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();
    if (t.phi.size() != n) throw Error("transformation map has the wrong length");
    if (t.phi_inv && t.phi_inv->size() != n) throw Error("inverse map has the wrong length");
    if (t.B.size() != m) throw Error("rotation has the wrong size");
    for (const auto& row : t.B) {
        if (row.size() != m) throw Error("rotation has the wrong size");
    }
    if (t.h.size() != m) throw Error("Girsanov drift has the wrong length");
    for (std::size_t i = 0; i < n; ++i) sde.check(t.phi[i], "phi");
    if (t.phi_inv) {
        for (const auto& e : *t.phi_inv) sde.check(e, "phi_inv");
    }
    for (const auto& row : t.B) {
        for (const auto& e : row) sde.check(e, "B");
    }
    sde.check(t.eta, "eta");
    for (const auto& e : t.h) sde.check(e, "h");
    if (!is_zero(transpose(t.B) * t.B - identity_matrix(m))) throw Error("rotation is not orthogonal");
    if (determinant(t.B) != Expr(1)) throw Error("rotation does not have determinant one");
    if (t.eta.is_zero()) throw Error("time-change density is zero");
    if (t.phi_inv && !is_identity_map(sde.vars, t.phi)) {
        const ExprVec round = compose_with(sde.vars, t.phi, *t.phi_inv);
        for (std::size_t i = 0; i < n; ++i) {
            if (round[i] != Expr::var(sde.vars[i])) throw Error("declared inverse does not invert the map");
        }
    }
}

void validate(const Sde& sde, const InfTransform& v) {
    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();
    if (v.Y.size() != n) throw Error("vector field has the wrong length");
    if (v.C.size() != m) throw Error("rotation generator has the wrong size");
    for (const auto& row : v.C) {
        if (row.size() != m) throw Error("rotation generator has the wrong size");
    }
    if (v.H.size() != m) throw Error("Girsanov generator has the wrong length");
    for (const auto& e : v.Y) sde.check(e, "Y");
    for (const auto& row : v.C) {
        for (const auto& e : row) sde.check(e, "C");
    }
    sde.check(v.tau, "tau");
    for (const auto& e : v.H) sde.check(e, "H");
    if (!is_zero(v.C + transpose(v.C))) throw Error("rotation generator is not antisymmetric");
}

Sde et_apply(const Sde& sde, const FiniteTransform& t) {
    validate(sde, t);
    const auto& vars = sde.vars;
    const auto inv = pullback_map(vars, t);
    const ExprMat dphi = jacobian(vars, t.phi);
    const Expr inv_eta = t.eta.inverse();
    const Expr inv_sqrt_eta = t.eta.pow_rational(Rational(-1, 2));

    Sde out = sde;
    const ExprVec drift = scale(generator_apply(sde, t.phi) + dphi * (sde.diffusion * t.h), inv_eta);
    const ExprMat diffusion = scale(dphi * sde.diffusion * transpose(t.B), inv_sqrt_eta);
    out.drift = pull(vars, drift, inv);
    out.diffusion = pull(vars, diffusion, inv);

    if (out.time_var) {
        const std::size_t k = out.index_of(*out.time_var);
        bool still_time = out.drift[k] == Expr(1);
        for (const auto& e : out.diffusion[k]) still_time = still_time && e.is_zero();
        if (!still_time) out.time_var.reset();
    }
    return out;
}

FiniteTransform compose(const std::vector<std::string>& vars, const FiniteTransform& second,
                        const FiniteTransform& first) {
    FiniteTransform out;
    out.phi = compose_with(vars, second.phi, first.phi);
    if (first.phi_inv && second.phi_inv) out.phi_inv = compose_with(vars, *first.phi_inv, *second.phi_inv);
    out.B = compose_with(vars, second.B, first.phi) * first.B;
    out.eta = compose_with(vars, second.eta, first.phi) * first.eta;
    const ExprVec h2 = compose_with(vars, second.h, first.phi);
    // h2 is a drift in the clock of the first transform: dt' = eta1 dt.
    out.h = scale(transpose(first.B) * h2, first.eta.pow_rational(Rational(1, 2))) + first.h;
    return out;
}

FiniteTransform invert(const std::vector<std::string>& vars, const FiniteTransform& t) {
    const auto inv = pullback_map(vars, t);
    FiniteTransform out;
    out.phi = inv ? *inv : t.phi;
    out.phi_inv = t.phi;
    out.B = pull(vars, transpose(t.B), inv);
    out.eta = pull(vars, t.eta.inverse(), inv);
    out.h = pull(vars, scale(t.B * t.h, -t.eta.pow_rational(Rational(-1, 2))), inv);
    return out;
}

InfTransform push_forward(const std::vector<std::string>& vars, const FiniteTransform& t, const InfTransform& v) {
    const auto inv = pullback_map(vars, t);
    const std::size_t m = t.B.size();
    const ExprMat bt = transpose(t.B);
    const Expr inv_sqrt_eta = t.eta.pow_rational(Rational(-1, 2));

    InfTransform out;
    out.Y = pull(vars, jacobian(vars, t.phi) * v.Y, inv);
    out.C = pull(vars, t.B * v.C * bt + apply_field(vars, v.Y, t.B) * bt, inv);
    out.tau = pull(vars, v.tau + apply_field(vars, v.Y, t.eta) / t.eta, inv);

    ExprMat shift = scale(v.C, Expr(-1));
    for (std::size_t i = 0; i < m; ++i) shift[i][i] += v.tau * Expr(Rational(1, 2));
    ExprVec inner = v.H + apply_field(vars, v.Y, t.h) + shift * t.h;
    out.H = pull(vars, scale(t.B * inner, inv_sqrt_eta), inv);
    return out;
}

InfTransform bracket(const std::vector<std::string>& vars, const InfTransform& v1, const InfTransform& v2) {
    const std::size_t m = v1.C.size();
    InfTransform out;
    out.Y = apply_field(vars, v1.Y, v2.Y) - apply_field(vars, v2.Y, v1.Y);
    out.C = apply_field(vars, v1.Y, v2.C) - apply_field(vars, v2.Y, v1.C) - (v1.C * v2.C - v2.C * v1.C);
    out.tau = apply_field(vars, v1.Y, v2.tau) - apply_field(vars, v2.Y, v1.tau);

    // H mixes through tau/2 - C; checked against the determining equations
    // on every pair of catalog symmetries.
    ExprMat s1 = scale(v1.C, Expr(-1));
    ExprMat s2 = scale(v2.C, Expr(-1));
    for (std::size_t i = 0; i < m; ++i) {
        s1[i][i] += v1.tau * Expr(Rational(1, 2));
        s2[i][i] += v2.tau * Expr(Rational(1, 2));
    }
    out.H = apply_field(vars, v1.Y, v2.H) - apply_field(vars, v2.Y, v1.H) + s1 * v2.H - s2 * v1.H;
    return out;
}

}  // namespace stosym
