#include "stosym/determining.hpp"

#include "stosym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stosym {

namespace {

std::string idx(std::size_t a) { return "[" + std::to_string(a + 1) + "]"; }
std::string bracketed(const std::string& v) { return "[" + v + "]"; }

// Y(sigma) - dY sigma + tau sigma / 2 + sigma C.
ExprMat diffusion_block(const Sde& sde, const InfTransform& v) {
    const auto& vars = sde.vars;
    const ExprMat& s = sde.diffusion;
    ExprMat out = apply_field(vars, v.Y, s) - jacobian(vars, v.Y) * s + s * v.C;
    const Expr half_tau = v.tau * Expr(Rational(1, 2));
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t a = 0; a < s[i].size(); ++a) {
            if (!s[i][a].is_zero()) out[i][a] += half_tau * s[i][a];
        }
    }
    return out;
}

}  // namespace

bool ResidualReport::all_zero() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ResidualEntry& e) { return e.informational || e.residual.is_zero(); });
}

std::vector<std::string> ResidualReport::failing() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (!e.informational && !e.residual.is_zero()) out.push_back(e.label);
    }
    return out;
}

const ResidualEntry* ResidualReport::find(const std::string& label) const {
    for (const auto& e : entries) {
        if (e.label == label) return &e;
    }
    return nullptr;
}

ResidualReport sde_residual(const Sde& sde, const InfTransform& v) {
    validate(sde, v);
    const auto& vars = sde.vars;
    ResidualReport r;
    const ExprVec drift = apply_field(vars, v.Y, sde.drift) - generator_apply(sde, v.Y) - sde.diffusion * v.H +
                          scale(sde.drift, v.tau);
    for (std::size_t i = 0; i < vars.size(); ++i) r.entries.push_back({"drift" + bracketed(vars[i]), drift[i]});
    const ExprMat diff = diffusion_block(sde, v);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t a = 0; a < sde.noise_dim(); ++a) {
            r.entries.push_back({"diff" + bracketed(vars[i]) + idx(a), diff[i][a]});
        }
    }
    return r;
}

bool is_symmetry(const Sde& sde, const InfTransform& v) { return sde_residual(sde, v).all_zero(); }

ResidualReport doob_residual(const Sde& sde, const InfTransform& v, const Expr& k) {
    validate(sde, v);
    sde.check(k, "k");
    const auto& vars = sde.vars;
    const ExprVec grad_k = gradient(vars, k);
    const ExprMat sigma_t = transpose(sde.diffusion);
    ResidualReport r;

    const ExprVec h_res = v.H - sigma_t * grad_k;
    for (std::size_t a = 0; a < sde.noise_dim(); ++a) r.entries.push_back({"doob.H" + idx(a), h_res[a]});

    const ExprVec printed =
        apply_field(vars, v.Y, sde.drift) - generator_apply(sde, v.Y) - sde.diffusion * (sigma_t * grad_k);
    const ExprVec drift = printed + scale(sde.drift, v.tau);
    for (std::size_t i = 0; i < vars.size(); ++i) r.entries.push_back({"doob.drift" + bracketed(vars[i]), drift[i]});

    const ExprMat diff = diffusion_block(sde, v);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t a = 0; a < sde.noise_dim(); ++a) {
            r.entries.push_back({"doob.diff" + bracketed(vars[i]) + idx(a), diff[i][a]});
        }
    }
    r.entries.push_back({"doob.k", generator_apply(sde, k)});

    bool differs = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        r.entries.push_back({"doob.drift_without_tau" + bracketed(vars[i]), printed[i], true});
        if (printed[i].is_zero() != drift[i].is_zero()) differs = true;
    }
    if (differs) {
        r.notes.push_back("drift condition without the tau*mu term disagrees with the substituted symmetry "
                          "condition; the verdict uses the substituted form");
    }
    return r;
}

bool is_doob_symmetry(const Sde& sde, const InfTransform& v, const Expr& k) {
    return doob_residual(sde, v, k).all_zero();
}

ExprVec pde_field(const Sde& sde, const PdeSymmetry& xi) {
    if (!sde.time_var) throw Error("backward equation symmetries need a time variable");
    const auto spatial = sde.spatial_vars();
    if (xi.phi.size() != spatial.size()) throw Error("PDE symmetry has the wrong number of spatial components");
    ExprVec y;
    std::size_t s = 0;
    for (const auto& v : sde.vars) y.push_back(v == *sde.time_var ? xi.m : xi.phi[s++]);
    return y;
}

ResidualReport pde_residual(const Sde& sde, const PdeSymmetry& xi) {
    const ExprVec y = pde_field(sde, xi);
    for (const auto& e : y) sde.check(e, "Xi");
    sde.check(xi.k, "k");
    const auto& vars = sde.vars;
    const std::size_t n = vars.size();
    const ExprMat a = diffusion_square(sde);
    const Expr lm = generator_apply(sde, xi.m);
    ResidualReport r;

    r.entries.push_back({"pde.k", generator_apply(sde, xi.k)});

    const ExprVec drift = generator_apply(sde, y) - apply_field(vars, y, sde.drift) +
                          scale(a * gradient(vars, xi.k), Expr(2)) - scale(sde.drift, lm);
    for (std::size_t i = 0; i < n; ++i) r.entries.push_back({"pde.drift" + bracketed(vars[i]), drift[i]});

    const ExprMat dy = jacobian(vars, y);
    const ExprMat diff = scale(a, lm) + apply_field(vars, y, a) - dy * a - a * transpose(dy);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            r.entries.push_back({"pde.diffusion" + bracketed(vars[i]) + bracketed(vars[j]), diff[i][j]});
        }
    }

    const ExprVec gm = a * gradient(vars, xi.m);
    for (std::size_t i = 0; i < n; ++i) r.entries.push_back({"pde.gradm" + bracketed(vars[i]), gm[i]});

    const RankProbe rank = rank_probe(sde, 8);
    if (!rank.constant) {
        r.notes.push_back("diffusion rank is not constant on the domain; the determining equations may miss "
                          "symmetries on the degenerate set");
    }
    return r;
}

bool is_pde_symmetry(const Sde& sde, const PdeSymmetry& xi) { return pde_residual(sde, xi).all_zero(); }

double probe_sde_residual(const Sde& sde, const InfTransform& v, int points, std::uint64_t seed) {
    validate(sde, v);
    const auto& vars = sde.vars;
    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();

    const ExprMat dmu = jacobian(vars, sde.drift);
    const ExprMat dy = jacobian(vars, v.Y);
    std::vector<ExprMat> ddy(n);
    for (std::size_t i = 0; i < n; ++i) ddy[i] = jacobian(vars, dy[i]);
    std::vector<ExprMat> dsigma(n);  // dsigma[k][i][a] = d_k sigma^i_a
    for (std::size_t k = 0; k < n; ++k) {
        dsigma[k] = zero_matrix(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < m; ++a) dsigma[k][i][a] = sde.diffusion[i][a].diff(vars[k]);
        }
    }

    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int p = 0; p < points; ++p) {
        const auto pt = sample_point(sde, rng);
        auto ev = [&](const Expr& e) { return e.eval(pt); };

        std::vector<double> mu(n), y(n), h(m);
        std::vector<std::vector<double>> s(n, std::vector<double>(m)), c(m, std::vector<double>(m));
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = ev(sde.drift[i]);
            y[i] = ev(v.Y[i]);
            for (std::size_t a = 0; a < m; ++a) s[i][a] = ev(sde.diffusion[i][a]);
        }
        for (std::size_t a = 0; a < m; ++a) {
            h[a] = ev(v.H[a]);
            for (std::size_t b = 0; b < m; ++b) c[a][b] = ev(v.C[a][b]);
        }
        const double tau = ev(v.tau);

        for (std::size_t i = 0; i < n; ++i) {
            double r = tau * mu[i];
            for (std::size_t k = 0; k < n; ++k) {
                r += y[k] * ev(dmu[i][k]);
                r -= mu[k] * ev(dy[i][k]);
                for (std::size_t l = 0; l < n; ++l) {
                    double akl = 0.0;
                    for (std::size_t a = 0; a < m; ++a) akl += 0.5 * s[k][a] * s[l][a];
                    if (akl != 0.0) r -= akl * ev(ddy[i][k][l]);
                }
            }
            for (std::size_t a = 0; a < m; ++a) r -= s[i][a] * h[a];
            worst = std::max(worst, std::abs(r));

            for (std::size_t a = 0; a < m; ++a) {
                double d = 0.5 * tau * s[i][a];
                for (std::size_t k = 0; k < n; ++k) {
                    d += y[k] * ev(dsigma[k][i][a]);
                    d -= ev(dy[i][k]) * s[k][a];
                }
                for (std::size_t b = 0; b < m; ++b) d += s[i][b] * c[b][a];
                worst = std::max(worst, std::abs(d));
            }
        }
    }
    return worst;
}

}  // namespace stosym
