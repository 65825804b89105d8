#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stosym {

using Rational = mpq_class;

/// Power product of parameter symbols, sorted by name, exponents > 0.
using ParamExponents = std::vector<std::pair<std::string, int>>;

/// Multivariate polynomial with exact rational coefficients in the model
/// parameters (a, b, sigma0, ...). Zero terms are never stored.
class ParamPoly {
public:
    using TermMap = std::map<ParamExponents, Rational>;

    ParamPoly() = default;
    ParamPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
    ParamPoly(long c) : ParamPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

    static ParamPoly symbol(const std::string& name);
    static ParamPoly monomial(const Rational& c, ParamExponents exps);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_one() const;
    /// Coefficient of the empty power product.
    Rational constant_term() const;
    bool is_single_term() const { return terms_.size() == 1; }

    int total_degree() const;
    int degree(const std::string& symbol) const;
    std::set<std::string> symbols() const;

    ParamPoly operator-() const;
    ParamPoly& operator+=(const ParamPoly& o);
    ParamPoly& operator-=(const ParamPoly& o);
    ParamPoly& operator*=(const ParamPoly& o);
    ParamPoly& operator*=(const Rational& c);
    friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
    friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b);
    friend ParamPoly operator*(ParamPoly a, const Rational& c) { return a *= c; }

    ParamPoly pow(unsigned k) const;

    /// Exact quotient if `divisor` divides this polynomial, nullopt otherwise.
    std::optional<ParamPoly> divide_exact(const ParamPoly& divisor) const;

    /// Coefficient of the largest power product in map order.
    const Rational& leading_coefficient() const;
    /// Scaled so that the leading coefficient is 1 (zero stays zero).
    ParamPoly monic() const;

    /// View as a polynomial in `symbol` with coefficients in the others.
    std::map<int, ParamPoly> as_univariate(const std::string& symbol) const;
    static ParamPoly from_univariate(const std::string& symbol,
                                     const std::map<int, ParamPoly>& coeffs);

    double eval(const std::map<std::string, double>& values) const;

    friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const ParamPoly& a, const ParamPoly& b) { return !(a == b); }
    friend bool operator<(const ParamPoly& a, const ParamPoly& b) { return a.terms_ < b.terms_; }

private:
    void add_term(const ParamExponents& e, const Rational& c);
    TermMap terms_;
};

/// Monic greatest common divisor over Q[params].
ParamPoly gcd(const ParamPoly& a, const ParamPoly& b);

/// Reduced rational function num/den of parameters. The denominator is
/// monic and shares no factor with the numerator.
class Coefficient {
public:
    Coefficient() : num_(), den_(1) {}
    Coefficient(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
    Coefficient(long c) : num_(c), den_(1) {}             // NOLINT(google-explicit-constructor)
    Coefficient(const ParamPoly& p) : num_(p), den_(1) {}  // NOLINT(google-explicit-constructor)
    Coefficient(ParamPoly num, ParamPoly den);

    const ParamPoly& num() const { return num_; }
    const ParamPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_rational_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational as_rational() const;  // requires is_rational_constant()
    std::set<std::string> symbols() const;

    Coefficient operator-() const;
    Coefficient& operator+=(const Coefficient& o);
    Coefficient& operator-=(const Coefficient& o);
    Coefficient& operator*=(const Coefficient& o);
    Coefficient& operator/=(const Coefficient& o);
    friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
    friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
    friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
    friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }

    Coefficient inverse() const;
    Coefficient pow(long k) const;
    /// Exact rational power; nullopt when the root is not a rational
    /// monomial (e.g. sqrt(a + b) or sqrt(2)).
    std::optional<Coefficient> pow_rational(const Rational& q) const;

    double eval(const std::map<std::string, double>& values) const;

    friend bool operator==(const Coefficient& a, const Coefficient& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }

private:
    void normalize();
    ParamPoly num_;
    ParamPoly den_;
};

}  // namespace stosym
