#pragma once

#include "stosym/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace stosym {

/// Expression compiled for fast floating evaluation: parameters are fixed
/// and variables are addressed by index into a state array.
class NumericExpr {
public:
    NumericExpr() = default;
    NumericExpr(const Expr& e, const std::vector<std::string>& vars, const std::map<std::string, double>& params);

    double operator()(const double* x) const { return constant_ ? value_ : evaluate(x); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return constant_; }
    /// Whether evaluation can fail (fractional or negative powers).
    bool has_singularities() const { return singular_; }

private:
    struct Factor {
        std::size_t var;
        int int_power;       // used when !fractional
        double real_power;   // used when fractional
        bool fractional;
    };
    struct Term {
        double coef;
        std::vector<Factor> factors;
        std::vector<std::pair<std::size_t, double>> exp_slopes;
    };
    double evaluate(const double* x) const;

    std::vector<Term> terms_;
    bool singular_ = false;
    bool constant_ = true;
    double value_ = 0.0;
};

std::vector<NumericExpr> compile(const ExprVec& v, const std::vector<std::string>& vars,
                                 const std::map<std::string, double>& params);

}  // namespace stosym
