#include "stosym/pde_bridge.hpp"

#include "stosym/errors.hpp"

namespace stosym {

PdeSymmetry sde_to_pde(const Sde& sde, const InfTransform& v, const Expr& k) {
    if (!sde.time_var) throw Error("backward equation symmetries need a time variable");
    const ResidualReport r = doob_residual(sde, v, k);
    if (!r.all_zero()) {
        std::string which;
        for (const auto& l : r.failing()) which += (which.empty() ? "" : ", ") + l;
        throw DoobResidualNonzero("not a Doob symmetry: nonzero " + which);
    }
    PdeSymmetry xi;
    std::size_t t = sde.index_of(*sde.time_var);
    for (std::size_t i = 0; i < sde.dim(); ++i) {
        if (i == t) {
            xi.m = v.Y[i];
        } else {
            xi.phi.push_back(v.Y[i]);
        }
    }
    xi.k = k;
    return xi;
}

std::pair<InfTransform, Expr> pde_to_sde(const Sde& sde, const PdeSymmetry& xi) {
    const ResidualReport r = pde_residual(sde, xi);
    if (!r.all_zero()) {
        std::string which;
        for (const auto& l : r.failing()) which += (which.empty() ? "" : ", ") + l;
        throw PdeResidualNonzero("not a symmetry of the backward equation: nonzero " + which);
    }
    const auto& vars = sde.vars;
    const std::size_t m = sde.noise_dim();
    const ExprMat& s = sde.diffusion;
    const ExprMat st = transpose(s);
    const auto gram_inv = inverse_adjugate(st * s);
    if (!gram_inv) throw SingularSigma("sigma^T sigma is not invertible within the expression class");

    InfTransform v;
    v.Y = pde_field(sde, xi);
    const Expr& k = xi.k;
    v.tau = generator_apply(sde, xi.m);
    v.H = st * gradient(vars, k);
    v.C = *gram_inv * st * (jacobian(vars, v.Y) * s - apply_field(vars, v.Y, s));
    for (std::size_t a = 0; a < m; ++a) v.C[a][a] -= v.tau * Expr(Rational(1, 2));
    if (!is_zero(v.C + transpose(v.C))) throw Error("recovered rotation generator is not antisymmetric");
    return {v, k};
}

bool round_trip_check(const Sde& sde, const InfTransform& v, const Expr& k) {
    const auto [v2, k2] = pde_to_sde(sde, sde_to_pde(sde, v, k));
    return v2 == v && k2 == k;
}

}  // namespace stosym
