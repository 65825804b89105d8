#include "stosym/param_poly.hpp"

#include "stosym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stosym {

namespace {

ParamExponents multiply_exponents(const ParamExponents& a, const ParamExponents& b) {
    ParamExponents out;
    out.reserve(a.size() + b.size());
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            out.push_back(*i++);
        } else if (i == a.end() || j->first < i->first) {
            out.push_back(*j++);
        } else {
            out.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    return out;
}

int exponent_of(const ParamExponents& e, const std::string& s) {
    for (const auto& [name, k] : e) {
        if (name == s) return k;
    }
    return 0;
}

int max_degree(const std::map<int, ParamPoly>& u) { return u.empty() ? -1 : u.rbegin()->first; }

void trim(std::map<int, ParamPoly>& u) {
    for (auto it = u.begin(); it != u.end();) {
        if (it->second.is_zero()) {
            it = u.erase(it);
        } else {
            ++it;
        }
    }
}

// Pseudo-remainder of a by b as polynomials in one symbol.
std::map<int, ParamPoly> pseudo_remainder(std::map<int, ParamPoly> r, const std::map<int, ParamPoly>& b) {
    const int db = max_degree(b);
    const ParamPoly& lcb = b.rbegin()->second;
    while (!r.empty() && max_degree(r) >= db) {
        const int dr = max_degree(r);
        const ParamPoly lcr = r.rbegin()->second;
        for (auto& [d, c] : r) c *= lcb;
        for (const auto& [d, c] : b) r[d + dr - db] -= lcr * c;
        trim(r);
    }
    return r;
}

ParamPoly content_in(const std::map<int, ParamPoly>& u) {
    ParamPoly g;
    for (const auto& [d, c] : u) {
        g = gcd(g, c);
        if (g.is_one()) break;
    }
    return g;
}

std::map<int, ParamPoly> primitive_part(const std::map<int, ParamPoly>& u) {
    const ParamPoly c = content_in(u);
    std::map<int, ParamPoly> out;
    for (const auto& [d, p] : u) out[d] = *p.divide_exact(c);
    return out;
}

// gcd when one side is a single power product: the result is the common
// power product of that term and the minimal exponents of the other side.
ParamPoly monomial_gcd(const ParamPoly& mono, const ParamPoly& other) {
    ParamExponents common = mono.terms().begin()->first;
    for (const auto& [e, c] : other.terms()) {
        ParamExponents next;
        for (const auto& [name, k] : common) {
            const int m = std::min(k, exponent_of(e, name));
            if (m > 0) next.emplace_back(name, m);
        }
        common = std::move(next);
        if (common.empty()) break;
    }
    return ParamPoly::monomial(1, common);
}

}  // namespace

ParamPoly::ParamPoly(const Rational& c) {
    // mpq_class(n, d) is not reduced on construction.
    Rational r = c;
    r.canonicalize();
    if (r != 0) terms_.emplace(ParamExponents{}, r);
}

ParamPoly ParamPoly::symbol(const std::string& name) { return monomial(1, {{name, 1}}); }

ParamPoly ParamPoly::monomial(const Rational& c, ParamExponents exps) {
    ParamPoly p;
    std::sort(exps.begin(), exps.end());
    exps.erase(std::remove_if(exps.begin(), exps.end(), [](const auto& e) { return e.second == 0; }),
               exps.end());
    Rational r = c;
    r.canonicalize();
    p.add_term(exps, r);
    return p;
}

void ParamPoly::add_term(const ParamExponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

bool ParamPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

bool ParamPoly::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1;
}

Rational ParamPoly::constant_term() const {
    auto it = terms_.find(ParamExponents{});
    return it == terms_.end() ? Rational(0) : it->second;
}

int ParamPoly::total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (const auto& [name, k] : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

int ParamPoly::degree(const std::string& symbol) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, exponent_of(e, symbol));
    return d;
}

std::set<std::string> ParamPoly::symbols() const {
    std::set<std::string> out;
    for (const auto& [e, c] : terms_) {
        for (const auto& [name, k] : e) out.insert(name);
    }
    return out;
}

ParamPoly ParamPoly::operator-() const {
    ParamPoly p = *this;
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
}

ParamPoly& ParamPoly::operator+=(const ParamPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

ParamPoly& ParamPoly::operator-=(const ParamPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
    ParamPoly out;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) out.add_term(multiply_exponents(ea, eb), ca * cb);
    }
    return out;
}

ParamPoly& ParamPoly::operator*=(const ParamPoly& o) { return *this = *this * o; }

ParamPoly& ParamPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

ParamPoly ParamPoly::pow(unsigned k) const {
    ParamPoly out(1);
    for (unsigned i = 0; i < k; ++i) out *= *this;
    return out;
}

const Rational& ParamPoly::leading_coefficient() const { return terms_.rbegin()->second; }

ParamPoly ParamPoly::monic() const {
    if (is_zero()) return *this;
    return *this * Rational(1 / leading_coefficient());
}

std::map<int, ParamPoly> ParamPoly::as_univariate(const std::string& symbol) const {
    std::map<int, ParamPoly> out;
    for (const auto& [e, c] : terms_) {
        ParamExponents rest;
        int d = 0;
        for (const auto& [name, k] : e) {
            if (name == symbol) {
                d = k;
            } else {
                rest.emplace_back(name, k);
            }
        }
        out[d].add_term(rest, c);
    }
    trim(out);
    return out;
}

ParamPoly ParamPoly::from_univariate(const std::string& symbol, const std::map<int, ParamPoly>& coeffs) {
    ParamPoly out;
    for (const auto& [d, c] : coeffs) {
        const ParamExponents power = d == 0 ? ParamExponents{} : ParamExponents{{symbol, d}};
        for (const auto& [e, v] : c.terms_) out.add_term(multiply_exponents(e, power), v);
    }
    return out;
}

std::optional<ParamPoly> ParamPoly::divide_exact(const ParamPoly& divisor) const {
    if (divisor.is_zero()) throw DivisionByZero("polynomial division by zero");
    if (is_zero()) return ParamPoly();
    if (divisor.is_constant()) return *this * Rational(1 / divisor.constant_term());
    const std::string v = *divisor.symbols().rbegin();
    auto r = as_univariate(v);
    const auto b = divisor.as_univariate(v);
    const int db = max_degree(b);
    const ParamPoly& lcb = b.rbegin()->second;
    std::map<int, ParamPoly> q;
    while (!r.empty() && max_degree(r) >= db) {
        const int dr = max_degree(r);
        auto qc = r.rbegin()->second.divide_exact(lcb);
        if (!qc) return std::nullopt;
        q[dr - db] += *qc;
        for (const auto& [d, c] : b) r[d + dr - db] -= *qc * c;
        trim(r);
    }
    if (!r.empty()) return std::nullopt;
    return from_univariate(v, q);
}

double ParamPoly::eval(const std::map<std::string, double>& values) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.get_d();
        for (const auto& [name, k] : e) {
            auto it = values.find(name);
            if (it == values.end()) throw DeclarationError("no value for parameter " + name);
            t *= std::pow(it->second, k);
        }
        s += t;
    }
    return s;
}

ParamPoly gcd(const ParamPoly& a, const ParamPoly& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return ParamPoly(1);
    if (a.is_single_term()) return monomial_gcd(a, b);
    if (b.is_single_term()) return monomial_gcd(b, a);

    auto syms = a.symbols();
    const auto sb = b.symbols();
    syms.insert(sb.begin(), sb.end());
    const std::string v = *syms.rbegin();

    const auto ua = a.as_univariate(v);
    const auto ub = b.as_univariate(v);
    if (max_degree(ua) == 0) return gcd(a, content_in(ub));
    if (max_degree(ub) == 0) return gcd(content_in(ua), b);

    const ParamPoly content = gcd(content_in(ua), content_in(ub));
    auto pa = primitive_part(ua);
    auto pb = primitive_part(ub);
    if (max_degree(pa) < max_degree(pb)) std::swap(pa, pb);
    while (true) {
        auto r = pseudo_remainder(pa, pb);
        if (r.empty()) break;
        if (max_degree(r) == 0) {
            pb = {{0, ParamPoly(1)}};
            break;
        }
        pa = std::move(pb);
        pb = primitive_part(r);
    }
    return (content * ParamPoly::from_univariate(v, primitive_part(pb))).monic();
}

// ---------------------------------------------------------------------------

Coefficient::Coefficient(ParamPoly num, ParamPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero("coefficient with zero denominator");
    normalize();
}

void Coefficient::normalize() {
    if (num_.is_zero()) {
        den_ = ParamPoly(1);
        return;
    }
    if (den_.is_constant()) {
        num_ *= Rational(1 / den_.constant_term());
        den_ = ParamPoly(1);
        return;
    }
    const ParamPoly g = gcd(num_, den_);
    if (!g.is_one()) {
        num_ = *num_.divide_exact(g);
        den_ = *den_.divide_exact(g);
    }
    const Rational lc = den_.leading_coefficient();
    if (lc != 1) {
        const Rational inv = 1 / lc;
        num_ *= inv;
        den_ *= inv;
    }
}

Rational Coefficient::as_rational() const { return num_.constant_term() / den_.constant_term(); }

std::set<std::string> Coefficient::symbols() const {
    auto s = num_.symbols();
    const auto d = den_.symbols();
    s.insert(d.begin(), d.end());
    return s;
}

Coefficient Coefficient::operator-() const {
    Coefficient c = *this;
    c.num_ = -c.num_;
    return c;
}

Coefficient& Coefficient::operator+=(const Coefficient& o) {
    if (o.is_zero()) return *this;
    if (den_ == o.den_) {
        num_ += o.num_;
        if (!den_.is_one()) normalize();
        else if (num_.is_zero()) den_ = ParamPoly(1);
        return *this;
    }
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o) { return *this += -o; }

Coefficient& Coefficient::operator*=(const Coefficient& o) {
    if (is_zero()) return *this;
    if (o.is_zero()) return *this = Coefficient();
    num_ *= o.num_;
    if (den_.is_one() && o.den_.is_one()) return *this;
    den_ *= o.den_;
    normalize();
    return *this;
}

Coefficient Coefficient::inverse() const {
    if (is_zero()) throw DivisionByZero("inverse of zero coefficient");
    return Coefficient(den_, num_);
}

Coefficient& Coefficient::operator/=(const Coefficient& o) { return *this *= o.inverse(); }

Coefficient Coefficient::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    Coefficient out(1);
    for (long i = 0; i < k; ++i) out *= *this;
    return out;
}

namespace {

std::optional<mpz_class> exact_root(const mpz_class& v, unsigned long s) {
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), s) == 0) return std::nullopt;
    return r;
}

// c * params^e raised to p/s with s > 1; nullopt unless exact.
std::optional<ParamPoly> monomial_root_power(const ParamPoly& m, const Rational& q) {
    if (!m.is_single_term()) return std::nullopt;
    const auto& [exps, c] = *m.terms().begin();
    if (c <= 0) return std::nullopt;
    const mpz_class p = q.get_num();
    const mpz_class s = q.get_den();
    const auto num_root = exact_root(c.get_num(), s.get_ui());
    const auto den_root = exact_root(c.get_den(), s.get_ui());
    if (!num_root || !den_root) return std::nullopt;
    if (!p.fits_slong_p()) return std::nullopt;
    const long pe = p.get_si();
    Rational base(*num_root, *den_root);
    Rational value(1);
    for (long i = 0; i < std::labs(pe); ++i) value *= base;
    if (pe < 0) value = 1 / value;
    ParamExponents out;
    for (const auto& [name, k] : exps) {
        const Rational e = Rational(k) * q;
        if (e.get_den() != 1) return std::nullopt;
        out.emplace_back(name, static_cast<int>(e.get_num().get_si()));
    }
    for (const auto& [name, k] : out) {
        if (k < 0) return std::nullopt;  // handled by the caller through inversion
    }
    return ParamPoly::monomial(value, out);
}

}  // namespace

std::optional<Coefficient> Coefficient::pow_rational(const Rational& q) const {
    if (q.get_den() == 1) {
        if (!q.get_num().fits_slong_p()) return std::nullopt;
        if (is_zero() && q < 0) throw DivisionByZero("zero raised to a negative power");
        return pow(q.get_num().get_si());
    }
    if (is_zero()) {
        if (q < 0) throw DivisionByZero("zero raised to a negative power");
        return Coefficient();
    }
    const Rational aq = q < 0 ? Rational(-q) : q;
    auto n = monomial_root_power(num_, aq);
    auto d = monomial_root_power(den_, aq);
    if (!n || !d) return std::nullopt;
    Coefficient out(*n, *d);
    return q < 0 ? out.inverse() : out;
}

double Coefficient::eval(const std::map<std::string, double>& values) const {
    const double d = den_.eval(values);
    if (d == 0.0) throw DivisionByZero("coefficient denominator vanishes at the evaluation point");
    return num_.eval(values) / d;
}

}  // namespace stosym
