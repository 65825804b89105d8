#include "stosym/io.hpp"

#include "stosym/errors.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace stosym {

namespace {

// ---------------------------------------------------------------- parser

struct Token {
    enum Kind { Number, Symbol, Op, End } kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            out.push_back({Token::Number, s.substr(i, j - i), i});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::Symbol, s.substr(i, j - i), i});
            i = j;
        } else if (std::string("+-*/^()").find(c) != std::string::npos) {
            out.push_back({Token::Op, std::string(1, c), i});
            ++i;
        } else {
            throw SyntaxError(std::string("unexpected character '") + c + "'", i);
        }
    }
    out.push_back({Token::End, "", s.size()});
    return out;
}

Rational parse_number(const Token& t) {
    const auto dot = t.text.find('.');
    if (dot == std::string::npos) return Rational(t.text);
    if (t.text.find('.', dot + 1) != std::string::npos) throw SyntaxError("malformed number", t.pos);
    const std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
    Rational r(digits.empty() ? "0" : digits);
    mpz_class scale = 1;
    for (std::size_t k = dot + 1; k < t.text.size(); ++k) scale *= 10;
    r /= scale;
    r.canonicalize();
    return r;
}

class Parser {
public:
    Parser(const std::string& text, const std::set<std::string>& vars, const std::set<std::string>& params)
        : toks_(tokenize(text)), vars_(vars), params_(params) {}

    Expr parse() {
        Expr e = expr();
        if (peek().kind != Token::End) throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    bool accept(const std::string& op) {
        if (peek().kind == Token::Op && peek().text == op) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(const std::string& op) {
        if (!accept(op)) throw SyntaxError("expected '" + op + "'", peek().pos);
    }

    template <typename F>
    Expr guarded(std::size_t pos, F&& f) {
        try {
            return f();
        } catch (const NotRepresentable& e) {
            throw NotRepresentable(std::string(e.what()) + " at position " + std::to_string(pos));
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept("+")) {
                e += term();
            } else if (accept("-")) {
                e -= term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept("*")) {
                e *= unary();
            } else if (peek().kind == Token::Op && peek().text == "/") {
                const std::size_t pos = peek().pos;
                ++i_;
                const Expr d = unary();
                e = guarded(pos, [&] { return e / d; });
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (accept("-")) return -unary();
        if (accept("+")) return unary();
        return power();
    }

    Rational exponent() {
        if (accept("(")) {
            bool neg = accept("-");
            Rational q = integer();
            if (accept("/")) q /= integer();
            expect(")");
            q.canonicalize();
            return neg ? Rational(-q) : q;
        }
        bool neg = accept("-");
        Rational q = integer();
        return neg ? Rational(-q) : q;
    }

    Rational integer() {
        const Token& t = peek();
        if (t.kind != Token::Number || t.text.find('.') != std::string::npos) {
            throw SyntaxError("expected an integer", t.pos);
        }
        ++i_;
        return Rational(t.text);
    }

    Expr power() {
        const std::size_t pos = peek().pos;
        Expr base = atom();
        if (accept("^")) {
            const Rational q = exponent();
            return guarded(pos, [&] { return base.pow_rational(q); });
        }
        return base;
    }

    Expr atom() {
        const Token t = peek();
        if (t.kind == Token::Number) {
            ++i_;
            return Expr(parse_number(t));
        }
        if (t.kind == Token::Symbol) {
            ++i_;
            if (t.text == "exp" || t.text == "sqrt") {
                expect("(");
                const Expr arg = expr();
                expect(")");
                return guarded(t.pos, [&] {
                    return t.text == "exp" ? Expr::exp_linear(arg) : arg.pow_rational(Rational(1, 2));
                });
            }
            if (vars_.count(t.text)) return Expr::var(t.text);
            if (params_.count(t.text)) return Expr::param(t.text);
            throw DeclarationError("undeclared symbol '" + t.text + "' at position " + std::to_string(t.pos));
        }
        if (accept("(")) {
            Expr e = expr();
            expect(")");
            return e;
        }
        throw SyntaxError(t.kind == Token::End ? "unexpected end of input" : "unexpected '" + t.text + "'", t.pos);
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    const std::set<std::string>& vars_;
    const std::set<std::string>& params_;
};

// --------------------------------------------------------------- printer

std::string rational_text(const Rational& q) { return q.get_str(); }

// Power product of parameters with coefficient magnitude 1 dropped.
std::string param_monomial(const ParamExponents& e) {
    std::string out;
    for (const auto& [s, k] : e) {
        if (!out.empty()) out += "*";
        out += s;
        if (k != 1) out += "^" + std::to_string(k);
    }
    return out;
}

std::string poly_text(const ParamPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        const bool neg = sgn(c) < 0;
        const Rational mag = neg ? Rational(-c) : c;
        std::string t;
        if (e.empty()) {
            t = rational_text(mag);
        } else if (mag == 1) {
            t = param_monomial(e);
        } else {
            t = rational_text(mag) + "*" + param_monomial(e);
        }
        if (first) {
            out = neg ? "-" + t : t;
        } else {
            out += neg ? " - " + t : " + " + t;
        }
        first = false;
    }
    return out;
}

bool is_bare_symbol(const ParamPoly& p) {
    if (!p.is_single_term()) return false;
    const auto& [e, c] = *p.terms().begin();
    return c == 1 && e.size() == 1 && e.front().second == 1;
}

// Text of a coefficient known to be "positive" (see split_sign).
std::string magnitude_text(const Coefficient& c) {
    std::string num = poly_text(c.num());
    if (c.den().is_one()) return num;
    if (!c.num().is_single_term()) num = "(" + num + ")";
    const std::string den = poly_text(c.den());
    if (is_bare_symbol(c.den()) || c.den().is_constant()) return num + "/" + den;
    return num + "/(" + den + ")";
}

// Pulls a leading minus out of single-term numerators.
std::pair<bool, Coefficient> split_sign(const Coefficient& c) {
    if (c.num().is_single_term() && sgn(c.num().terms().begin()->second) < 0) return {true, -c};
    return {false, c};
}

std::string monomial_text(const Monomial& m) {
    std::string out;
    auto add = [&](const std::string& f) {
        if (!out.empty()) out += "*";
        out += f;
    };
    for (const auto& [v, p] : m.powers) {
        if (p == 1) {
            add(v);
        } else if (p.get_den() == 1 && sgn(p) > 0) {
            add(v + "^" + p.get_str());
        } else {
            add(v + "^(" + p.get_str() + ")");
        }
    }
    if (!m.exp_slopes.empty()) {
        Expr arg;
        for (const auto& [v, s] : m.exp_slopes) arg += Expr(Coefficient(s)) * Expr::var(v);
        add("exp(" + to_string(arg) + ")");
    }
    return out;
}

// ------------------------------------------------------------ model file

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Section {
    std::string header;
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;

    const std::string* get(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (l.empty()) continue;
        if (l.front() == '[' && l.back() == ']' && l.find('=') == std::string::npos) {
            out.push_back({trim(l.substr(1, l.size() - 2)), {}, line});
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw SyntaxError("expected key = value on line " + std::to_string(line), 0);
        if (out.empty()) throw SyntaxError("entry before the first section on line " + std::to_string(line), 0);
        out.back().entries.emplace_back(trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
    }
    return out;
}

std::vector<std::string> name_list(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') return split_list(t);
    std::vector<std::string> out;
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw SyntaxError("expected a number, got '" + t + "'", 0);
    }
    if (used != t.size()) throw SyntaxError("expected a number, got '" + t + "'", used);
    return v;
}

std::string double_text(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

class ModelReader {
public:
    explicit ModelReader(const Sde& sde) : vars_(sde.var_set()), params_(sde.param_set()) {}

    Expr expr(const std::string& s) const { return parse_expr(s, vars_, params_); }
    ExprVec vec(const std::string& s) const {
        ExprVec out;
        for (const auto& item : split_list(s)) out.push_back(expr(item));
        return out;
    }
    ExprMat mat(const std::string& s) const {
        ExprMat out;
        for (const auto& row : split_list(s)) out.push_back(vec(row));
        return out;
    }

private:
    std::set<std::string> vars_;
    std::set<std::string> params_;
};

const std::string& required(const Section& s, const std::string& key) {
    const std::string* v = s.get(key);
    if (!v) throw SyntaxError("section [" + s.header + "] lacks '" + key + "'", 0);
    return *v;
}

}  // namespace

Expr parse_expr(const std::string& text, const std::set<std::string>& vars, const std::set<std::string>& params) {
    return Parser(text, vars, params).parse();
}

std::string to_string(const Coefficient& c) {
    const auto [neg, mag] = split_sign(c);
    return (neg ? "-" : "") + magnitude_text(mag);
}

std::string to_string(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, c] : e.terms()) {
        const auto [neg, mag] = split_sign(c);
        std::string t;
        if (mono.is_unit()) {
            t = magnitude_text(mag);
        } else if (mag.is_one()) {
            t = monomial_text(mono);
        } else {
            std::string coef = magnitude_text(mag);
            if (mag.den().is_one() && !mag.num().is_single_term()) coef = "(" + coef + ")";
            t = coef + "*" + monomial_text(mono);
        }
        if (first) {
            out = neg ? "-" + t : t;
        } else {
            out += neg ? " - " + t : " + " + t;
        }
        first = false;
    }
    return out;
}

std::string to_string(const ExprVec& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + to_string(v[i]);
    return out + "]";
}

std::string to_string(const ExprMat& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.size(); ++i) out += (i ? ", " : "") + to_string(m[i]);
    return out + "]";
}

std::string to_string(const InfTransform& v) {
    return "(Y = " + to_string(v.Y) + ", C = " + to_string(v.C) + ", tau = " + to_string(v.tau) +
           ", H = " + to_string(v.H) + ")";
}

std::vector<std::string> split_list(const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw SyntaxError("expected a bracketed list: " + t, 0);
    t = t.substr(1, t.size() - 2);
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : t) {
        if (c == '[' || c == '(') ++depth;
        if (c == ']' || c == ')') --depth;
        if (depth < 0) throw SyntaxError("unbalanced brackets in " + text, 0);
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw SyntaxError("unbalanced brackets in " + text, 0);
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

const NamedSymmetry& ModelFile::symmetry(const std::string& name) const {
    for (const auto& s : symmetries) {
        if (s.name == name) return s;
    }
    throw Error("no symmetry named " + name);
}

const NamedTransform& ModelFile::transform(const std::string& name) const {
    for (const auto& t : transforms) {
        if (t.name == name) return t;
    }
    throw Error("no transformation named " + name);
}

ModelFile parse_model(const std::string& text) {
    const auto sections = split_sections(text);
    const Section* model = nullptr;
    for (const auto& s : sections) {
        if (s.header == "model") model = &s;
    }
    if (!model) throw SyntaxError("missing [model] section", 0);

    ModelFile f;
    Sde& sde = f.sde;
    if (const auto* v = model->get("name")) sde.name = *v;
    sde.vars = name_list(required(*model, "vars"));
    if (const auto* v = model->get("params")) sde.params = name_list(*v);
    if (const auto* v = model->get("time_var")) sde.time_var = trim(*v);
    if (const auto* v = model->get("nonexplosive")) sde.nonexplosive = trim(*v) == "true";
    for (const auto& [k, v] : model->entries) {
        if (k.rfind("domain.", 0) != 0) continue;
        const std::string var = k.substr(7);
        std::string t = trim(v);
        if (t.size() < 2 || t.front() != '(' || t.back() != ')') throw SyntaxError("domain must be (lo, hi)", 0);
        const auto comma = t.find(',');
        if (comma == std::string::npos) throw SyntaxError("domain must be (lo, hi)", 0);
        sde.domain[var] = Interval{parse_double(t.substr(1, comma - 1)), parse_double(t.substr(comma + 1, t.size() - comma - 2))};
    }
    const ModelReader r(sde);
    sde.drift = r.vec(required(*model, "drift"));
    {
        const auto rows = split_list(required(*model, "sigma"));
        const bool nested = !rows.empty() && !rows.front().empty() && rows.front().front() == '[';
        if (nested) {
            sde.diffusion = r.mat(required(*model, "sigma"));
        } else {
            for (const auto& e : rows) sde.diffusion.push_back({r.expr(e)});
        }
    }
    sde.validate();

    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();
    for (const auto& s : sections) {
        if (s.header.rfind("symmetry.", 0) == 0) {
            NamedSymmetry ns{s.header.substr(9), InfTransform::zero(n, m), std::nullopt};
            ns.V.Y = r.vec(required(s, "Y"));
            if (const auto* v = s.get("C")) ns.V.C = r.mat(*v);
            if (const auto* v = s.get("tau")) ns.V.tau = r.expr(*v);
            if (const auto* v = s.get("H")) ns.V.H = r.vec(*v);
            if (const auto* v = s.get("k")) ns.k = r.expr(*v);
            validate(sde, ns.V);
            f.symmetries.push_back(std::move(ns));
        } else if (s.header.rfind("transform.", 0) == 0) {
            NamedTransform nt{s.header.substr(10), identity_transform(sde.vars, m)};
            nt.T.phi = r.vec(required(s, "phi"));
            nt.T.phi_inv.reset();
            if (const auto* v = s.get("phi_inv")) nt.T.phi_inv = r.vec(*v);
            if (const auto* v = s.get("B")) nt.T.B = r.mat(*v);
            if (const auto* v = s.get("eta")) nt.T.eta = r.expr(*v);
            if (const auto* v = s.get("h")) nt.T.h = r.vec(*v);
            validate(sde, nt.T);
            f.transforms.push_back(std::move(nt));
        } else if (s.header.rfind("pde.", 0) == 0) {
            NamedPde np{s.header.substr(4), {}};
            np.xi.m = r.expr(required(s, "m"));
            np.xi.phi = r.vec(required(s, "phi"));
            np.xi.k = r.expr(required(s, "k"));
            if (np.xi.phi.size() != sde.spatial_vars().size()) throw Error("PDE symmetry " + np.name + " has the wrong length");
            f.pdes.push_back(std::move(np));
        } else if (s.header == "ansatz") {
            AnsatzBasis b;
            for (const auto& [k, v] : s.entries) {
                if (k == "basis") {
                    b.functions = r.vec(v);
                } else if (k.rfind("basis.", 0) == 0) {
                    b.overrides[k.substr(6)] = r.vec(v);
                } else {
                    throw SyntaxError("unknown ansatz key " + k, 0);
                }
            }
            f.ansatz = std::move(b);
        } else if (s.header == "mc") {
            McConfig c;
            c.x0.clear();
            for (const auto& [k, v] : s.entries) {
                if (k == "paths") {
                    c.n_paths = static_cast<std::size_t>(std::stoull(v));
                } else if (k == "dt") {
                    c.dt = parse_double(v);
                } else if (k == "horizon") {
                    c.horizon = parse_double(v);
                } else if (k == "seed") {
                    c.seed = std::stoull(v);
                } else if (k == "degree") {
                    c.degree = std::stoi(v);
                } else if (k == "threads") {
                    c.threads = std::stoi(v);
                } else if (k == "x0") {
                    for (const auto& e : split_list(v)) c.x0.push_back(parse_double(e));
                } else if (k == "eval_times") {
                    c.eval_times.clear();
                    for (const auto& e : split_list(v)) c.eval_times.push_back(parse_double(e));
                } else if (k.rfind("param.", 0) == 0) {
                    c.param_values[k.substr(6)] = parse_double(v);
                } else {
                    throw SyntaxError("unknown mc key " + k, 0);
                }
            }
            f.mc = std::move(c);
        } else if (s.header != "model") {
            throw SyntaxError("unknown section [" + s.header + "]", 0);
        }
    }
    return f;
}

std::string print_model(const ModelFile& f) {
    std::ostringstream os;
    const Sde& sde = f.sde;
    auto names = [](const std::vector<std::string>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
        return out;
    };
    os << "[model]\n";
    if (!sde.name.empty()) os << "name = " << sde.name << "\n";
    os << "vars = " << names(sde.vars) << "\n";
    if (sde.time_var) os << "time_var = " << *sde.time_var << "\n";
    if (!sde.params.empty()) os << "params = " << names(sde.params) << "\n";
    for (const auto& [v, iv] : sde.domain) {
        os << "domain." << v << " = (" << double_text(iv.lo) << ", " << double_text(iv.hi) << ")\n";
    }
    os << "drift = " << to_string(sde.drift) << "\n";
    os << "sigma = " << to_string(sde.diffusion) << "\n";
    os << "nonexplosive = " << (sde.nonexplosive ? "true" : "false") << "\n";

    for (const auto& s : f.symmetries) {
        os << "\n[symmetry." << s.name << "]\n";
        os << "Y = " << to_string(s.V.Y) << "\n";
        os << "C = " << to_string(s.V.C) << "\n";
        os << "tau = " << to_string(s.V.tau) << "\n";
        os << "H = " << to_string(s.V.H) << "\n";
        if (s.k) os << "k = " << to_string(*s.k) << "\n";
    }
    for (const auto& t : f.transforms) {
        os << "\n[transform." << t.name << "]\n";
        os << "phi = " << to_string(t.T.phi) << "\n";
        if (t.T.phi_inv) os << "phi_inv = " << to_string(*t.T.phi_inv) << "\n";
        os << "B = " << to_string(t.T.B) << "\n";
        os << "eta = " << to_string(t.T.eta) << "\n";
        os << "h = " << to_string(t.T.h) << "\n";
    }
    for (const auto& p : f.pdes) {
        os << "\n[pde." << p.name << "]\n";
        os << "m = " << to_string(p.xi.m) << "\n";
        os << "phi = " << to_string(p.xi.phi) << "\n";
        os << "k = " << to_string(p.xi.k) << "\n";
    }
    if (f.ansatz) {
        os << "\n[ansatz]\n";
        os << "basis = " << to_string(f.ansatz->functions) << "\n";
        for (const auto& [k, v] : f.ansatz->overrides) os << "basis." << k << " = " << to_string(v) << "\n";
    }
    if (f.mc) {
        const McConfig& c = *f.mc;
        auto doubles = [](const std::vector<double>& v) {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + double_text(v[i]);
            return out + "]";
        };
        os << "\n[mc]\n";
        os << "paths = " << c.n_paths << "\n";
        os << "dt = " << double_text(c.dt) << "\n";
        os << "horizon = " << double_text(c.horizon) << "\n";
        os << "seed = " << c.seed << "\n";
        os << "x0 = " << doubles(c.x0) << "\n";
        os << "eval_times = " << doubles(c.eval_times) << "\n";
        os << "degree = " << c.degree << "\n";
        if (c.threads) os << "threads = " << c.threads << "\n";
        for (const auto& [p, v] : c.param_values) os << "param." << p << " = " << double_text(v) << "\n";
    }
    return os.str();
}

ModelFile read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace stosym
