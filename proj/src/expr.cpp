#include "stosym/expr.hpp"

#include "stosym/errors.hpp"

#include <cmath>

namespace stosym {

std::set<std::string> Monomial::variables() const {
    std::set<std::string> out;
    for (const auto& [v, p] : powers) out.insert(v);
    for (const auto& [v, s] : exp_slopes) out.insert(v);
    return out;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r = *this;
    for (const auto& [v, p] : o.powers) {
        auto [it, inserted] = r.powers.emplace(v, p);
        if (!inserted) {
            it->second += p;
            if (it->second == 0) r.powers.erase(it);
        }
    }
    for (const auto& [v, s] : o.exp_slopes) {
        auto [it, inserted] = r.exp_slopes.emplace(v, s);
        if (!inserted) {
            it->second += s;
            if (it->second.is_zero()) r.exp_slopes.erase(it);
        }
    }
    return r;
}

Expr::Expr(const Coefficient& c) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

Expr Expr::var(const std::string& name) {
    Monomial m;
    m.powers.emplace(name, 1);
    return term(1, m);
}

Expr Expr::param(const std::string& name) { return Expr(Coefficient(ParamPoly::symbol(name))); }

Expr Expr::term(const Coefficient& c, const Monomial& m) {
    Expr e;
    e.add_term(m, c);
    return e;
}

Expr Expr::exp_linear(const Expr& arg) {
    Monomial m;
    for (const auto& [mono, c] : arg.terms_) {
        if (mono.is_unit()) throw NotRepresentable("exp argument has a constant part");
        if (!mono.exp_slopes.empty() || mono.powers.size() != 1 || mono.powers.begin()->second != 1) {
            throw NotRepresentable("exp argument is not linear in a single variable per term");
        }
        if (!c.is_polynomial() || c.num().total_degree() > 1) {
            throw NotRepresentable("exp slope must be a parameter polynomial of degree at most one");
        }
        m.exp_slopes.emplace(mono.powers.begin()->first, c.num());
    }
    return term(1, m);
}

void Expr::add_term(const Monomial& m, const Coefficient& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

bool Expr::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

Coefficient Expr::constant_part() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Coefficient() : it->second;
}

std::set<std::string> Expr::variables() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_) {
        const auto v = m.variables();
        out.insert(v.begin(), v.end());
    }
    return out;
}

std::set<std::string> Expr::parameters() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_) {
        const auto s = c.symbols();
        out.insert(s.begin(), s.end());
        for (const auto& [v, slope] : m.exp_slopes) {
            const auto ss = slope.symbols();
            out.insert(ss.begin(), ss.end());
        }
    }
    return out;
}

bool Expr::depends_on(const std::string& v) const {
    for (const auto& [m, c] : terms_) {
        if (m.powers.count(v) || m.exp_slopes.count(v)) return true;
    }
    return false;
}

Expr Expr::operator-() const {
    Expr e = *this;
    for (auto& [m, c] : e.terms_) c = -c;
    return e;
}

Expr& Expr::operator+=(const Expr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Expr& Expr::operator-=(const Expr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
    Expr out;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    }
    return out;
}

Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }

Expr& Expr::operator*=(const Coefficient& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DivisionByZero("division by the zero expression");
    if (!b.is_single_term()) throw NotRepresentable("division by a multi-term expression");
    return a * b.inverse();
}

Expr Expr::pow_rational(const Rational& exponent) const {
    Rational q = exponent;
    q.canonicalize();
    if (q == 0) return Expr(1);
    if (is_zero()) {
        if (q < 0) throw DivisionByZero("zero raised to a negative power");
        return Expr();
    }
    if (q > 0 && q.get_den() == 1 && !is_single_term()) {
        unsigned long k = q.get_num().get_ui();
        Expr result(1);
        Expr base = *this;
        while (k > 0) {
            if (k & 1UL) result *= base;
            k >>= 1;
            if (k > 0) base *= base;
        }
        return result;
    }
    if (!is_single_term()) throw NotRepresentable("multi-term expression raised to a non-integer or negative power");
    const auto& [m, c] = *terms_.begin();
    auto cq = c.pow_rational(q);
    if (!cq) throw NotRepresentable("coefficient has no exact rational power");
    Monomial r;
    for (const auto& [v, p] : m.powers) r.powers.emplace(v, p * q);
    for (const auto& [v, s] : m.exp_slopes) r.exp_slopes.emplace(v, s * q);
    return term(*cq, r);
}

Expr Expr::diff(const std::string& v) const {
    Expr out;
    for (const auto& [m, c] : terms_) {
        if (auto it = m.powers.find(v); it != m.powers.end()) {
            Monomial d = m;
            const Rational p = it->second;
            if (p == 1) {
                d.powers.erase(v);
            } else {
                d.powers[v] = p - 1;
            }
            out.add_term(d, c * Coefficient(p));
        }
        if (auto it = m.exp_slopes.find(v); it != m.exp_slopes.end()) {
            out.add_term(m, c * Coefficient(it->second));
        }
    }
    return out;
}

std::optional<Expr> Expr::integrate(const std::string& v) const {
    Expr out;
    for (const auto& [m, c] : terms_) {
        Monomial rest = m;
        Rational p = 0;
        if (auto it = rest.powers.find(v); it != rest.powers.end()) {
            p = it->second;
            rest.powers.erase(it);
        }
        std::optional<ParamPoly> slope;
        if (auto it = rest.exp_slopes.find(v); it != rest.exp_slopes.end()) {
            slope = it->second;
            rest.exp_slopes.erase(it);
        }
        if (!slope) {
            if (p == -1) return std::nullopt;
            Monomial r = rest;
            r.powers[v] = p + 1;
            out.add_term(r, c * Coefficient(Rational(1 / (p + 1))));
            continue;
        }
        if (p < 0 || p.get_den() != 1) return std::nullopt;
        // int v^P e^{s v} dv = e^{s v} sum_j (-1)^j P!/(P-j)! v^{P-j} / s^{j+1}
        const long P = p.get_num().get_si();
        const Coefficient inv_s = Coefficient(*slope).inverse();
        Coefficient falling(1);
        Coefficient s_pow = inv_s;
        for (long j = 0; j <= P; ++j) {
            Monomial r = rest;
            r.exp_slopes[v] = *slope;
            if (P - j != 0) r.powers[v] = P - j;
            Coefficient factor = falling * s_pow;
            if (j % 2 == 1) factor = -factor;
            out.add_term(r, c * factor);
            falling *= Coefficient(P - j);
            s_pow *= inv_s;
        }
    }
    return out;
}

Expr Expr::substitute(const std::map<std::string, Expr>& assignments) const {
    Expr out;
    for (const auto& [m, c] : terms_) {
        Monomial kept;
        Expr factor(1);
        for (const auto& [v, p] : m.powers) {
            auto it = assignments.find(v);
            if (it == assignments.end()) {
                kept.powers.emplace(v, p);
            } else {
                factor *= it->second.pow_rational(p);
            }
        }
        for (const auto& [v, s] : m.exp_slopes) {
            auto it = assignments.find(v);
            if (it == assignments.end()) {
                kept.exp_slopes.emplace(v, s);
            } else {
                factor *= exp_linear(it->second * Coefficient(s));
            }
        }
        out += term(c, kept) * factor;
    }
    return out;
}

double Expr::eval(const std::map<std::string, double>& point) const {
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c.eval(point);
        for (const auto& [v, p] : m.powers) {
            auto it = point.find(v);
            if (it == point.end()) throw DeclarationError("no value for variable " + v);
            const double x = it->second;
            if (p.get_den() == 1) {
                if (x == 0.0 && p < 0) throw DivisionByZero("negative power of zero in variable " + v);
                t *= std::pow(x, static_cast<double>(p.get_num().get_si()));
            } else {
                if (x < 0.0) throw DomainError("fractional power of negative value in variable " + v);
                if (x == 0.0 && p < 0) throw DivisionByZero("negative power of zero in variable " + v);
                t *= std::pow(x, p.get_d());
            }
        }
        double arg = 0.0;
        for (const auto& [v, s] : m.exp_slopes) {
            auto it = point.find(v);
            if (it == point.end()) throw DeclarationError("no value for variable " + v);
            arg += s.eval(point) * it->second;
        }
        if (arg != 0.0) t *= std::exp(arg);
        total += t;
    }
    return total;
}

bool operator<(const Expr& a, const Expr& b) {
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    for (; i != a.terms_.end() && j != b.terms_.end(); ++i, ++j) {
        if (i->first < j->first) return true;
        if (j->first < i->first) return false;
        if (i->second.num() != j->second.num()) return i->second.num() < j->second.num();
        if (i->second.den() != j->second.den()) return i->second.den() < j->second.den();
    }
    return i == a.terms_.end() && j != b.terms_.end();
}

void check_declared(const Expr& e, const std::set<std::string>& variables,
                    const std::set<std::string>& parameters, const std::string& context) {
    for (const auto& v : e.variables()) {
        if (!variables.count(v)) throw DeclarationError("undeclared variable '" + v + "' in " + context);
    }
    for (const auto& p : e.parameters()) {
        if (!parameters.count(p)) throw DeclarationError("undeclared parameter '" + p + "' in " + context);
    }
}

// ---------------------------------------------------------------------------

ExprMat zero_matrix(std::size_t rows, std::size_t cols) {
    return ExprMat(rows, ExprVec(cols));
}

ExprMat identity_matrix(std::size_t n) {
    ExprMat m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Expr(1);
    return m;
}

ExprMat transpose(const ExprMat& a) {
    if (a.empty()) return {};
    ExprMat t = zero_matrix(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    }
    return t;
}

ExprMat operator*(const ExprMat& a, const ExprMat& b) {
    const std::size_t inner = b.size();
    const std::size_t cols = inner ? b[0].size() : 0;
    ExprMat c = zero_matrix(a.size(), cols);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (!b[k][j].is_zero()) c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return c;
}

ExprVec operator*(const ExprMat& a, const ExprVec& v) {
    ExprVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!a[i][k].is_zero() && !v[k].is_zero()) out[i] += a[i][k] * v[k];
        }
    }
    return out;
}

ExprMat operator+(const ExprMat& a, const ExprMat& b) {
    ExprMat c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] += b[i][j];
    }
    return c;
}

ExprMat operator-(const ExprMat& a, const ExprMat& b) {
    ExprMat c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] -= b[i][j];
    }
    return c;
}

ExprMat scale(const ExprMat& a, const Expr& s) {
    ExprMat c = a;
    for (auto& row : c) {
        for (auto& e : row) e = e * s;
    }
    return c;
}

ExprVec operator+(const ExprVec& a, const ExprVec& b) {
    ExprVec c = a;
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += b[i];
    return c;
}

ExprVec operator-(const ExprVec& a, const ExprVec& b) {
    ExprVec c = a;
    for (std::size_t i = 0; i < a.size(); ++i) c[i] -= b[i];
    return c;
}

ExprVec scale(const ExprVec& v, const Expr& s) {
    ExprVec c = v;
    for (auto& e : c) e = e * s;
    return c;
}

bool is_zero(const ExprMat& a) {
    for (const auto& row : a) {
        for (const auto& e : row) {
            if (!e.is_zero()) return false;
        }
    }
    return true;
}

bool is_zero(const ExprVec& v) {
    for (const auto& e : v) {
        if (!e.is_zero()) return false;
    }
    return true;
}

namespace {

ExprMat minor_of(const ExprMat& a, std::size_t row, std::size_t col) {
    ExprMat m;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i == row) continue;
        ExprVec r;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (j != col) r.push_back(a[i][j]);
        }
        m.push_back(std::move(r));
    }
    return m;
}

}  // namespace

Expr determinant(const ExprMat& a) {
    const std::size_t n = a.size();
    if (n == 0) return Expr(1);
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Expr det;
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        Expr t = a[0][j] * determinant(minor_of(a, 0, j));
        if (j % 2 == 0) {
            det += t;
        } else {
            det -= t;
        }
    }
    return det;
}

std::optional<ExprMat> inverse_adjugate(const ExprMat& a) {
    const std::size_t n = a.size();
    const Expr det = determinant(a);
    if (det.is_zero() || !det.is_single_term()) return std::nullopt;
    const Expr inv_det = det.inverse();
    ExprMat inv = zero_matrix(n, n);
    if (n == 1) {
        inv[0][0] = inv_det;
        return inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Expr cof = determinant(minor_of(a, j, i));
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = cof * inv_det;
        }
    }
    return inv;
}

}  // namespace stosym
