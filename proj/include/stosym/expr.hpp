#pragma once

#include "stosym/param_poly.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stosym {

/// Product of Puiseux powers and exponentials of state variables,
///   prod_v v^{p_v} * exp(sum_v s_v * v),
/// with rational p_v and slopes s_v of parameter degree at most one.
struct Monomial {
    std::map<std::string, Rational> powers;
    std::map<std::string, ParamPoly> exp_slopes;

    bool is_unit() const { return powers.empty() && exp_slopes.empty(); }
    std::set<std::string> variables() const;
    Monomial operator*(const Monomial& o) const;

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.powers == b.powers && a.exp_slopes == b.exp_slopes;
    }
    friend bool operator<(const Monomial& a, const Monomial& b) {
        if (a.powers != b.powers) return a.powers < b.powers;
        return a.exp_slopes < b.exp_slopes;
    }
};

/// Exact symbolic expression in normal form: a finite sum of monomials with
/// rational-function coefficients in the parameters. Two expressions are
/// equal iff their term maps are identical; zero has no terms.
class Expr {
public:
    using TermMap = std::map<Monomial, Coefficient>;

    Expr() = default;
    Expr(const Rational& c) : Expr(Coefficient(c)) {}  // NOLINT(google-explicit-constructor)
    Expr(long c) : Expr(Coefficient(c)) {}             // NOLINT(google-explicit-constructor)
    Expr(int c) : Expr(Coefficient(c)) {}              // NOLINT(google-explicit-constructor)
    Expr(const Coefficient& c);                        // NOLINT(google-explicit-constructor)

    static Expr var(const std::string& name);
    static Expr param(const std::string& name);
    static Expr term(const Coefficient& c, const Monomial& m);
    /// exp(arg) for arg = sum of (parameter-linear slope) * variable.
    static Expr exp_linear(const Expr& arg);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_single_term() const { return terms_.size() == 1; }
    /// True when no state variable occurs (parameters may).
    bool is_constant() const;
    /// The coefficient of the unit monomial.
    Coefficient constant_part() const;
    std::set<std::string> variables() const;
    std::set<std::string> parameters() const;
    bool depends_on(const std::string& v) const;

    Expr operator-() const;
    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o);
    Expr& operator*=(const Coefficient& c);
    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator*(const Expr& a, const Expr& b);
    /// Division by a single-term expression; NotRepresentable otherwise.
    friend Expr operator/(const Expr& a, const Expr& b);

    /// Exact power. Multi-term bases accept only nonnegative integer q.
    Expr pow_rational(const Rational& q) const;
    Expr inverse() const { return pow_rational(-1); }

    Expr diff(const std::string& v) const;
    /// Antiderivative in v within the class, nullopt when it would leave
    /// it (logarithms, incomplete gamma functions).
    std::optional<Expr> integrate(const std::string& v) const;

    /// Substitute variables by expressions. Each replacement must keep the
    /// result in the class: multi-term replacements need nonnegative integer
    /// powers, and variables under exp need variable-linear replacements.
    Expr substitute(const std::map<std::string, Expr>& assignments) const;

    /// Floating evaluation; symbols are variables or parameters.
    double eval(const std::map<std::string, double>& point) const;

    friend bool operator==(const Expr& a, const Expr& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
    friend bool operator<(const Expr& a, const Expr& b);

private:
    void add_term(const Monomial& m, const Coefficient& c);
    TermMap terms_;
};

/// Checks that `e` only uses the given symbols; throws DeclarationError.
void check_declared(const Expr& e, const std::set<std::string>& variables,
                    const std::set<std::string>& parameters, const std::string& context);

using ExprVec = std::vector<Expr>;
/// Row-major dense matrix of expressions.
using ExprMat = std::vector<std::vector<Expr>>;

ExprMat zero_matrix(std::size_t rows, std::size_t cols);
ExprMat identity_matrix(std::size_t n);
ExprMat transpose(const ExprMat& a);
ExprMat operator*(const ExprMat& a, const ExprMat& b);
ExprVec operator*(const ExprMat& a, const ExprVec& v);
ExprMat operator+(const ExprMat& a, const ExprMat& b);
ExprMat operator-(const ExprMat& a, const ExprMat& b);
ExprMat scale(const ExprMat& a, const Expr& s);
ExprVec operator+(const ExprVec& a, const ExprVec& b);
ExprVec operator-(const ExprVec& a, const ExprVec& b);
ExprVec scale(const ExprVec& v, const Expr& s);
bool is_zero(const ExprMat& a);
bool is_zero(const ExprVec& v);

/// Exact inverse through the adjugate; the determinant must be single-term.
/// Returns nullopt when the determinant is zero or not invertible in class.
std::optional<ExprMat> inverse_adjugate(const ExprMat& a);
Expr determinant(const ExprMat& a);

}  // namespace stosym
