#include "stosym/sde.hpp"

#include "stosym/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace stosym {

std::size_t Sde::index_of(const std::string& var) const {
    auto it = std::find(vars.begin(), vars.end(), var);
    if (it == vars.end()) throw DeclarationError("unknown variable " + var);
    return static_cast<std::size_t>(it - vars.begin());
}

Interval Sde::bounds(const std::string& var) const {
    auto it = domain.find(var);
    return it == domain.end() ? Interval{} : it->second;
}

std::vector<std::string> Sde::spatial_vars() const {
    std::vector<std::string> out;
    for (const auto& v : vars) {
        if (!time_var || v != *time_var) out.push_back(v);
    }
    return out;
}

void Sde::check(const Expr& e, const std::string& context) const {
    check_declared(e, var_set(), param_set(), context);
}

void Sde::validate() const {
    std::set<std::string> seen;
    for (const auto& v : vars) {
        if (!seen.insert(v).second) throw DeclarationError("variable declared twice: " + v);
    }
    for (const auto& p : params) {
        if (!seen.insert(p).second) throw DeclarationError("symbol declared twice: " + p);
    }
    if (drift.size() != vars.size()) throw Error("drift length differs from the number of variables");
    if (diffusion.size() != vars.size()) throw Error("diffusion must have one row per variable");
    const std::size_t m = noise_dim();
    if (m == 0) throw Error("diffusion has no noise columns");
    for (const auto& row : diffusion) {
        if (row.size() != m) throw Error("diffusion rows have different lengths");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        check(drift[i], "drift[" + vars[i] + "]");
        for (std::size_t a = 0; a < m; ++a) check(diffusion[i][a], "sigma[" + vars[i] + "]");
    }
    for (const auto& [v, iv] : domain) {
        if (!seen.count(v) || std::find(params.begin(), params.end(), v) != params.end()) {
            throw DeclarationError("domain bound for undeclared variable " + v);
        }
        if (!(iv.lo < iv.hi)) throw Error("empty domain for variable " + v);
    }
    if (time_var) {
        const std::size_t t = index_of(*time_var);
        if (drift[t] != Expr(1)) throw Error("time variable drift must be 1");
        for (std::size_t a = 0; a < m; ++a) {
            if (!diffusion[t][a].is_zero()) throw Error("time variable must have a zero diffusion row");
        }
    }
}

Expr apply_field(const std::vector<std::string>& vars, const ExprVec& field, const Expr& f) {
    Expr out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (field[i].is_zero()) continue;
        const Expr d = f.diff(vars[i]);
        if (!d.is_zero()) out += field[i] * d;
    }
    return out;
}

ExprVec apply_field(const std::vector<std::string>& vars, const ExprVec& field, const ExprVec& f) {
    ExprVec out;
    out.reserve(f.size());
    for (const auto& e : f) out.push_back(apply_field(vars, field, e));
    return out;
}

ExprMat apply_field(const std::vector<std::string>& vars, const ExprVec& field, const ExprMat& f) {
    ExprMat out;
    out.reserve(f.size());
    for (const auto& row : f) out.push_back(apply_field(vars, field, row));
    return out;
}

ExprMat jacobian(const std::vector<std::string>& vars, const ExprVec& f) {
    ExprMat j = zero_matrix(f.size(), vars.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t k = 0; k < vars.size(); ++k) j[i][k] = f[i].diff(vars[k]);
    }
    return j;
}

ExprVec gradient(const std::vector<std::string>& vars, const Expr& f) {
    ExprVec g;
    g.reserve(vars.size());
    for (const auto& v : vars) g.push_back(f.diff(v));
    return g;
}

ExprMat diffusion_square(const Sde& sde) {
    ExprMat a = sde.diffusion * transpose(sde.diffusion);
    return scale(a, Expr(Rational(1, 2)));
}

Expr generator_apply(const Sde& sde, const Expr& f) {
    sde.check(f, "f");
    const ExprMat a = diffusion_square(sde);
    const std::size_t n = sde.dim();
    Expr out;
    for (std::size_t i = 0; i < n; ++i) {
        const Expr di = f.diff(sde.vars[i]);
        if (di.is_zero()) continue;
        if (!sde.drift[i].is_zero()) out += sde.drift[i] * di;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[i][j].is_zero()) continue;
            out += a[i][j] * di.diff(sde.vars[j]);
        }
    }
    return out;
}

ExprVec generator_apply(const Sde& sde, const ExprVec& f) {
    ExprVec out;
    out.reserve(f.size());
    for (const auto& e : f) out.push_back(generator_apply(sde, e));
    return out;
}

std::map<std::string, double> sample_point(const Sde& sde, std::mt19937_64& rng, double window,
                                           const std::map<std::string, double>& fixed_params) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::map<std::string, double> p;
    for (const auto& name : sde.params) {
        auto it = fixed_params.find(name);
        p[name] = it != fixed_params.end() ? it->second : 0.5 + 1.5 * unit(rng);
    }
    for (const auto& v : sde.vars) {
        const Interval iv = sde.bounds(v);
        double lo = iv.lo;
        double hi = iv.hi;
        if (std::isinf(lo) && std::isinf(hi)) {
            lo = -window;
            hi = window;
        } else if (std::isinf(hi)) {
            hi = lo + window;
        } else if (std::isinf(lo)) {
            lo = hi - window;
        }
        double x = lo;
        for (int attempt = 0; attempt < 64 && !iv.contains(x); ++attempt) x = lo + (hi - lo) * unit(rng);
        if (!iv.contains(x)) throw NoValidPoint("could not sample variable " + v + " inside its domain");
        p[v] = x;
    }
    return p;
}

RankProbe rank_probe(const Sde& sde, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error("rank_probe needs at least one trial");
    const ExprMat a = diffusion_square(sde);
    const std::size_t n = sde.dim();
    std::mt19937_64 rng(seed);
    RankProbe out;

    auto rank_at = [&](const std::map<std::string, double>& pt) {
        Eigen::MatrixXd m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i][j].eval(pt);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        lu.setThreshold(1e-10);
        return static_cast<int>(lu.rank());
    };

    std::vector<std::map<std::string, double>> points;
    {
        auto origin = sample_point(sde, rng, 10.0);
        bool inside = true;
        for (const auto& v : sde.vars) {
            if (!sde.bounds(v).contains(0.0)) inside = false;
            origin[v] = 0.0;
        }
        if (inside) points.push_back(origin);
    }
    while (static_cast<int>(points.size()) < trials) points.push_back(sample_point(sde, rng, 10.0));

    for (const auto& pt : points) out.observed.push_back(rank_at(pt));
    out.rank = out.observed.front();
    out.constant = std::all_of(out.observed.begin(), out.observed.end(), [&](int r) { return r == out.rank; });
    return out;
}

}  // namespace stosym
