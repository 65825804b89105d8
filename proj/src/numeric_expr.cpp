#include "stosym/numeric_expr.hpp"

#include "stosym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stosym {

NumericExpr::NumericExpr(const Expr& e, const std::vector<std::string>& vars,
                         const std::map<std::string, double>& params) {
    auto index = [&](const std::string& v) {
        auto it = std::find(vars.begin(), vars.end(), v);
        if (it == vars.end()) throw DeclarationError("unknown variable " + v);
        return static_cast<std::size_t>(it - vars.begin());
    };
    for (const auto& [mono, c] : e.terms()) {
        Term t;
        t.coef = c.eval(params);
        for (const auto& [v, p] : mono.powers) {
            Factor f{index(v), 0, 0.0, p.get_den() != 1};
            if (f.fractional) {
                f.real_power = p.get_d();
            } else {
                f.int_power = static_cast<int>(p.get_num().get_si());
            }
            if (f.fractional || f.int_power < 0) singular_ = true;
            t.factors.push_back(f);
        }
        for (const auto& [v, s] : mono.exp_slopes) t.exp_slopes.emplace_back(index(v), Coefficient(s).eval(params));
        terms_.push_back(std::move(t));
    }
    constant_ = std::all_of(terms_.begin(), terms_.end(),
                            [](const Term& t) { return t.factors.empty() && t.exp_slopes.empty(); });
    if (constant_) value_ = evaluate(nullptr);
}

double NumericExpr::evaluate(const double* x) const {
    double total = 0.0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (const auto& f : t.factors) {
            const double b = x[f.var];
            if (f.fractional) {
                if (b < 0.0) throw DomainError("fractional power of a negative value");
                v *= std::pow(b, f.real_power);
            } else {
                switch (f.int_power) {
                    case 1: v *= b; break;
                    case 2: v *= b * b; break;
                    default: v *= std::pow(b, f.int_power);
                }
            }
        }
        if (!t.exp_slopes.empty()) {
            double arg = 0.0;
            for (const auto& [i, s] : t.exp_slopes) arg += s * x[i];
            v *= std::exp(arg);
        }
        total += v;
    }
    return total;
}

std::vector<NumericExpr> compile(const ExprVec& v, const std::vector<std::string>& vars,
                                 const std::map<std::string, double>& params) {
    std::vector<NumericExpr> out;
    out.reserve(v.size());
    for (const auto& e : v) out.emplace_back(e, vars, params);
    return out;
}

}  // namespace stosym
