#include "stosym/catalog.hpp"

#include "stosym/errors.hpp"
#include "stosym/pde_bridge.hpp"

#include <algorithm>

namespace stosym {

namespace {

// Symmetry lists, PDE generators and default transformations of the four
// built-in models. Family members are appended in code.

const char* const kBm1d = R"(
[model]
name = bm1d
vars = x, z
time_var = z
drift = [0, 1]
sigma = [1, 0]
nonexplosive = true

[symmetry.V1]
Y = [z, 0]
H = [-1]
k = -x

[symmetry.V2]
Y = [2*x*z, 2*z^2]
tau = 4*z
H = [-2*x]
k = z - x^2

[symmetry.V3]
Y = [x, 2*z]
tau = 2
H = [0]
k = 0

[symmetry.V4]
Y = [1, 0]
k = 0

[symmetry.V5]
Y = [0, 1]
k = 0

[pde.Xi1]
m = 0
phi = [z]
k = -x

[pde.Xi2]
m = 2*z^2
phi = [2*x*z]
k = z - x^2

[pde.Xi3]
m = 2*z
phi = [x]
k = 0

[pde.Xi4]
m = 0
phi = [1]
k = 0

[pde.Xi5]
m = 1
phi = [0]
k = 0

[pde.Xi6]
m = 0
phi = [0]
k = -1

[transform.shear_a1]
phi = [x + z, z]
phi_inv = [x - z, z]
B = [[1]]
eta = 1
h = [-1]

[transform.girsanov_h1]
phi = [x, z]
phi_inv = [x, z]
B = [[1]]
eta = 1
h = [1]

[mc]
paths = 100000
dt = 0.001
horizon = 1
seed = 42
x0 = [0, 0]
eval_times = [1]
)";

const char* const kOu = R"(
[model]
name = ou
vars = x, z
time_var = z
params = a, b
drift = [a*x + b, 1]
sigma = [1, 0]
nonexplosive = true

[symmetry.V1]
Y = [1/2*exp(-a*z), 0]
H = [a*exp(-a*z)]
k = (a*x + b)*exp(-a*z)

[symmetry.V2]
Y = [1/(2*a)*exp(-2*a*z)*(a*x + b), -1/(2*a)*exp(-2*a*z)]
tau = exp(-2*a*z)
H = [2*(a*x + b)*exp(-2*a*z)]
k = exp(-2*a*z)*(a*x^2 + 2*b*x + (a + 2*b^2)/(2*a))

[symmetry.V3]
Y = [1/(2*a)*exp(2*a*z)*(a*x + b), 1/(2*a)*exp(2*a*z)]
tau = exp(2*a*z)
k = 0

[symmetry.V4]
Y = [exp(a*z), 0]
k = 0

[symmetry.V5]
Y = [0, 1]
k = 0

[symmetry.Vt1]
Y = [1/2*(1/a + exp(2*a*z))*x - b/(2*a^2) + b/(2*a)*exp(2*a*z), z/a + 1/(2*a)*exp(2*a*z)]
tau = 1/a + exp(2*a*z)
H = [x]
k = 1/2*x^2

[symmetry.Vt2]
Y = [x/(2*a) - b/(2*a^2) + exp(a*z), z/a]
tau = 1/a
H = [x]
k = 1/2*x^2

[pde.Xi1]
m = 0
phi = [1/2*exp(-a*z)]
k = (a*x + b)*exp(-a*z)

[pde.Xi2]
m = -1/(2*a)*exp(-2*a*z)
phi = [1/(2*a)*exp(-2*a*z)*(a*x + b)]
k = exp(-2*a*z)*(a*x^2 + 2*b*x + (a + 2*b^2)/(2*a))

[pde.Xi3]
m = 1/(2*a)*exp(2*a*z)
phi = [1/(2*a)*exp(2*a*z)*(a*x + b)]
k = 0

[pde.Xi4]
m = 0
phi = [exp(a*z)]
k = 0

[pde.Xi5]
m = 1
phi = [0]
k = 0

[pde.Xi6]
m = 0
phi = [0]
k = -1

[transform.doob_pair]
phi = [x, z]
phi_inv = [x, z]
B = [[1]]
eta = 1
h = [a*exp(-a*z)]

[mc]
paths = 100000
dt = 0.001
horizon = 1
seed = 42
x0 = [0, 0]
eval_times = [1]
param.a = -1
param.b = 0
)";

const char* const kCir = R"(
[model]
name = cir
vars = x, z
time_var = z
params = a, b, sigma0
domain.x = (0, inf)
drift = [a*x + b, 1]
sigma = [sigma0*sqrt(x), 0]
nonexplosive = true

[symmetry.V1]
Y = [sigma0^2/2*x*exp(-a*z), -sigma0^2/(2*a)*exp(-a*z)]
tau = sigma0^2/2*exp(-a*z)
H = [sigma0*a*sqrt(x)*exp(-a*z)]
k = (a*x + b)*exp(-a*z)

[symmetry.V2]
Y = [x*exp(a*z), 1/a*exp(a*z)]
tau = exp(a*z)
k = 0

[symmetry.V3]
Y = [0, 1]
k = 0

[symmetry.Vt1]
Y = [sqrt(x), 0]
H = [sigma0/(8*x) - b/(2*sigma0*x) + a/(2*sigma0)]
k = -1/4*x^(-1/2) + b/sigma0^2*x^(-1/2) + a/sigma0^2*x^(1/2)

[symmetry.Vt2]
Y = [sigma0/a*x, sigma0/a*z]
tau = sigma0/a
H = [sqrt(x)]
k = x/sigma0

[pde.Xi1]
m = -sigma0^2/(2*a)*exp(-a*z)
phi = [sigma0^2/2*x*exp(-a*z)]
k = (a*x + b)*exp(-a*z)

[pde.Xi2]
m = 1/a*exp(a*z)
phi = [x*exp(a*z)]
k = 0

[pde.Xi3]
m = 1
phi = [0]
k = 0

[pde.Xi4]
m = 0
phi = [0]
k = -1

[mc]
paths = 100000
dt = 0.001
horizon = 1
seed = 42
x0 = [1, 0]
eval_times = [1]
param.a = -1
param.b = 1
param.sigma0 = 0.5
)";

const char* const kBm2d = R"(
[model]
name = bm2d
vars = x, y, z
time_var = z
drift = [0, 0, 1]
sigma = [[1, 0], [0, 1], [0, 0]]
nonexplosive = true

[symmetry.V1]
Y = [-z, 0, 0]
H = [1, 0]
k = x

[symmetry.V2]
Y = [0, -z, 0]
H = [0, 1]
k = y

[symmetry.V3]
Y = [-2*x*z, -2*y*z, -2*z^2]
tau = -4*z
H = [2*x, 2*y]
k = x^2 + y^2 - 2*z

[symmetry.V4]
Y = [1/2*x, 1/2*y, z]
tau = 1
k = 0

[symmetry.V5]
Y = [y, -x, 0]
C = [[0, 1], [-1, 0]]
k = 0

[symmetry.V6]
Y = [1, 0, 0]
k = 0

[symmetry.V7]
Y = [0, 1, 0]
k = 0

[symmetry.V8]
Y = [0, 0, 1]
k = 0

[pde.Xi1]
m = 0
phi = [z, 0]
k = -x

[pde.Xi2]
m = 0
phi = [0, z]
k = -y

[pde.Xi3]
m = 2*z^2
phi = [2*x*z, 2*y*z]
k = 2*z - x^2 - y^2

[pde.Xi4]
m = z
phi = [1/2*x, 1/2*y]
k = 0

[pde.Xi5]
m = 0
phi = [y, -x]
k = 0

[pde.Xi6]
m = 0
phi = [1, 0]
k = 0

[pde.Xi7]
m = 0
phi = [0, 1]
k = 0

[pde.Xi8]
m = 1
phi = [0, 0]
k = 0

[pde.Xi9]
m = 0
phi = [0, 0]
k = -1

[transform.girsanov_h1]
phi = [x, y, z]
phi_inv = [x, y, z]
B = [[1, 0], [0, 1]]
eta = 1
h = [1, 0]

[mc]
paths = 100000
dt = 0.001
horizon = 1
seed = 42
x0 = [0, 0, 0]
eval_times = [1]
)";

ExprVec product_basis(const ExprVec& a, const ExprVec& b) {
    ExprVec out;
    for (const auto& f : a) {
        for (const auto& g : b) out.push_back(f * g);
    }
    return out;
}

ExprVec total_degree_basis(const std::vector<std::string>& vars, int degree) {
    ExprVec out{Expr(1)};
    std::size_t start = 0;
    for (int d = 1; d <= degree; ++d) {
        const std::size_t end = out.size();
        std::vector<Expr> next;
        for (std::size_t i = start; i < end; ++i) {
            for (const auto& v : vars) {
                const Expr e = out[i] * Expr::var(v);
                if (std::find(next.begin(), next.end(), e) == next.end()) next.push_back(e);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        start = end;
    }
    return out;
}

Expr param(const char* p) { return Expr::param(p); }
Expr var(const char* v) { return Expr::var(v); }

void add_doob_classes(CatalogEntry& e, std::initializer_list<const char*> names) {
    for (const char* n : names) e.classes.push_back({n, SymmetryKind::Doob, std::nullopt});
}

void add_pde_map(CatalogEntry& e, std::initializer_list<ExpectedPde> items) {
    e.pde_map.insert(e.pde_map.end(), items.begin(), items.end());
}

CatalogEntry make_bm1d() {
    CatalogEntry e{"bm1d", parse_model(kBm1d), {}, {}, {}};
    e.file.symmetries.push_back(bm_alpha_family(e.sde(), "Valpha_z", var("z")));
    e.file.symmetries.push_back(bm_alpha_family(e.sde(), "Valpha_1", Expr(1)));
    e.file.symmetries.push_back(bm_alpha_family(e.sde(), "Valpha_z2", var("z") * var("z")));
    e.file.ansatz = AnsatzBasis{total_degree_basis({"x", "z"}, 2), {}};
    add_doob_classes(e, {"V1", "V2", "V3", "V4", "V5", "Valpha_z", "Valpha_1"});
    e.classes.push_back({"Valpha_z2", SymmetryKind::AlmostDoob, std::nullopt});
    add_pde_map(e, {{"Xi1", "V1", 1}, {"Xi2", "V2", 1}, {"Xi3", "V3", 1}, {"Xi4", "V4", 1}, {"Xi5", "V5", 1},
                    {"Xi6", "", -1}});
    e.notes.push_back("Valpha: k = -x^2 alpha'/4 + g(z) is space-time harmonic for some g only when alpha'' = 0; "
                      "Valpha_z equals V2/4");
    return e;
}

CatalogEntry make_ou() {
    CatalogEntry e{"ou", parse_model(kOu), {}, {}, {}};
    const Expr a = param("a");
    const Expr z = var("z");
    ExprVec modes{Expr(1), Expr::exp_linear(a * z), Expr::exp_linear(-a * z), Expr::exp_linear(Expr(2) * a * z),
                  Expr::exp_linear(Expr(-2) * a * z)};
    e.file.ansatz = AnsatzBasis{product_basis(modes, {Expr(1), var("x"), z, var("x") * var("x")}), {}};
    add_doob_classes(e, {"V1", "V2", "V3", "V4", "V5"});
    e.classes.push_back({"Vt1", SymmetryKind::AlmostDoob, std::nullopt});
    e.classes.push_back({"Vt2", SymmetryKind::AlmostDoob, std::nullopt});
    add_pde_map(e, {{"Xi1", "V1", 1}, {"Xi2", "V2", 1}, {"Xi3", "V3", 1}, {"Xi4", "V4", 1}, {"Xi5", "V5", 1},
                    {"Xi6", "", -1}});
    e.notes.push_back("Vt1, Vt2: k = x^2/2 + k1(z) for any k1; stored with k1 = 0");
    return e;
}

CatalogEntry make_cir() {
    CatalogEntry e{"cir", parse_model(kCir), {}, {}, {}};
    const Expr a = param("a");
    const Expr x = var("x");
    const Expr z = var("z");
    ExprVec powers{Expr(1), x, z, x.pow_rational(Rational(1, 2)), x.pow_rational(-1)};
    ExprVec modes{Expr(1), Expr::exp_linear(a * z), Expr::exp_linear(-a * z)};
    e.file.ansatz = AnsatzBasis{product_basis(modes, powers), {}};
    add_doob_classes(e, {"V1", "V2", "V3"});
    e.classes.push_back({"Vt1", SymmetryKind::AlmostDoob, std::nullopt});
    e.classes.push_back({"Vt2", SymmetryKind::AlmostDoob, std::nullopt});
    add_pde_map(e, {{"Xi1", "V1", 1}, {"Xi2", "V2", 1}, {"Xi3", "V3", 1}, {"Xi4", "", -1}});
    e.notes.push_back("default MC parameters a = -1, b = 1, sigma0 = 1/2 satisfy 2b > sigma0^2");
    return e;
}

CatalogEntry make_bm2d() {
    CatalogEntry e{"bm2d", parse_model(kBm2d), {}, {}, {}};
    e.file.symmetries.push_back(bm_alpha_family(e.sde(), "Valpha_z", var("z")));
    e.file.symmetries.push_back(bm_alpha_family(e.sde(), "Valpha_z2", var("z") * var("z")));
    e.file.symmetries.push_back(bm2d_beta_family(e.sde(), "Vbeta_z", var("z")));
    e.file.ansatz = AnsatzBasis{total_degree_basis({"x", "y", "z"}, 2), {}};
    add_doob_classes(e, {"V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "Valpha_z"});
    e.classes.push_back({"Valpha_z2", SymmetryKind::AlmostDoob, std::nullopt});
    e.classes.push_back({"Vbeta_z", SymmetryKind::NonDoob, std::make_pair(std::string("x"), std::string("y"))});
    // The printed V1..V3 carry the opposite sign of Xi1..Xi3.
    add_pde_map(e, {{"Xi1", "V1", -1}, {"Xi2", "V2", -1}, {"Xi3", "V3", -1}, {"Xi4", "V4", 1}, {"Xi5", "V5", 1},
                    {"Xi6", "V6", 1}, {"Xi7", "V7", 1}, {"Xi8", "V8", 1}, {"Xi9", "", -1}});
    return e;
}

PdeSymmetry scaled(const PdeSymmetry& xi, const Rational& s) {
    PdeSymmetry out = xi;
    const Expr f(s);
    out.m = out.m * f;
    for (auto& p : out.phi) p = p * f;
    out.k = out.k * f;
    return out;
}

}  // namespace

const PdeSymmetry& CatalogEntry::pde(const std::string& name) const {
    for (const auto& p : file.pdes) {
        if (p.name == name) return p.xi;
    }
    throw Error("no PDE generator named " + name + " in " + this->name);
}

std::vector<std::string> catalog_names() { return {"bm1d", "ou", "cir", "bm2d"}; }

CatalogEntry load(const std::string& name) {
    if (name == "bm1d") return make_bm1d();
    if (name == "ou") return make_ou();
    if (name == "cir") return make_cir();
    if (name == "bm2d") return make_bm2d();
    throw UnknownModel("unknown catalog model '" + name + "'");
}

NamedSymmetry bm_alpha_family(const Sde& sde, const std::string& name, const Expr& alpha) {
    const std::string& t = *sde.time_var;
    const auto integral = alpha.integrate(t);
    if (!integral) throw NotRepresentable("antiderivative of alpha leaves the expression class");
    const Expr da = alpha.diff(t);
    const auto spatial = sde.spatial_vars();
    NamedSymmetry s{name, InfTransform::zero(sde.dim(), sde.noise_dim()), std::nullopt};
    Expr sq;
    for (std::size_t a = 0; a < spatial.size(); ++a) {
        const Expr v = Expr::var(spatial[a]);
        s.V.Y[sde.index_of(spatial[a])] = Expr(Rational(1, 2)) * alpha * v;
        s.V.H[a] = Expr(Rational(-1, 2)) * v * da;
        sq += v * v;
    }
    s.V.Y[sde.index_of(t)] = *integral;
    s.V.tau = alpha;
    s.k = Expr(Rational(-1, 4)) * da * sq;
    // With alpha'' = 0 a linear clock term makes k space-time harmonic.
    if (da.diff(t).is_zero()) *s.k += Expr(Rational(static_cast<long>(spatial.size()), 4)) * da * Expr::var(t);
    return s;
}

NamedSymmetry bm2d_beta_family(const Sde& sde, const std::string& name, const Expr& beta) {
    const Expr x = Expr::var(sde.vars.at(0));
    const Expr y = Expr::var(sde.vars.at(1));
    const Expr db = beta.diff(*sde.time_var);
    NamedSymmetry s{name, InfTransform::zero(sde.dim(), sde.noise_dim()), std::nullopt};
    s.V.Y[0] = beta * y;
    s.V.Y[1] = -(beta * x);
    s.V.C[0][1] = beta;
    s.V.C[1][0] = -beta;
    s.V.H[0] = -(y * db);
    s.V.H[1] = x * db;
    return s;
}

VerifyReport verify_all(const CatalogEntry& entry, int probes) {
    VerifyReport r;
    r.model = entry.name;
    const Sde& sde = entry.sde();
    auto fail = [&](const std::string& what) { r.failures.push_back(entry.name + "/" + what); };

    auto expected_kind = [&](const std::string& name) -> std::optional<SymmetryKind> {
        for (const auto& c : entry.classes) {
            if (c.symmetry == name) return c.kind;
        }
        return std::nullopt;
    };

    for (const auto& s : entry.file.symmetries) {
        SymmetryCheck c;
        c.symmetry = s.name;
        c.residual = sde_residual(sde, s.V);
        c.probe_max = probe_sde_residual(sde, s.V, probes);
        if (s.k && expected_kind(s.name) == SymmetryKind::Doob) c.doob = doob_residual(sde, s.V, *s.k);
        c.pass = c.residual.all_zero() && c.probe_max < 1e-9 && (!c.doob || c.doob->all_zero());
        for (const auto& l : c.residual.failing()) fail(s.name + " " + l);
        if (c.doob) {
            for (const auto& l : c.doob->failing()) fail(s.name + " " + l);
        }
        if (!(c.probe_max < 1e-9)) fail(s.name + " probe");
        r.symmetries.push_back(std::move(c));
    }

    for (const auto& ex : entry.classes) {
        const NamedSymmetry& s = entry.symmetry(ex.symmetry);
        ClassCheck c;
        c.symmetry = ex.symmetry;
        c.expected = ex.kind;
        c.actual = classify(sde, s.V);
        c.pass = c.actual.kind == ex.kind && c.actual.is_symmetry;
        if (ex.witness) c.pass = c.pass && c.actual.witness == ex.witness;
        // The recovered potential agrees with the stored one up to a constant.
        if (c.pass && ex.kind == SymmetryKind::Doob && s.k && c.actual.k) {
            c.pass = (*c.actual.k - *s.k).is_constant();
        }
        if (!c.pass) fail(ex.symmetry + " class " + to_string(c.actual.kind));
        r.classes.push_back(std::move(c));
    }

    for (const auto& ex : entry.pde_map) {
        BridgeCheck c;
        c.generator = ex.generator;
        c.source = ex.source;
        c.scale = ex.scale;
        InfTransform v = InfTransform::zero(sde.dim(), sde.noise_dim());
        Expr k(1);
        if (!ex.source.empty()) {
            const NamedSymmetry& s = entry.symmetry(ex.source);
            v = s.V;
            k = s.k.value_or(Expr());
        }
        try {
            const PdeSymmetry image = sde_to_pde(sde, v, k);
            c.match = image == scaled(entry.pde(ex.generator), ex.scale);
            c.pde_symmetry = is_pde_symmetry(sde, image);
            c.round_trip = round_trip_check(sde, v, k);
        } catch (const Error& err) {
            fail(ex.generator + " " + err.what());
        }
        c.pass = c.match && c.pde_symmetry && c.round_trip;
        if (!c.pass) fail(ex.generator + " bridge");
        r.bridges.push_back(std::move(c));
    }

    for (const auto& ex : entry.classes) {
        const NamedSymmetry& s = entry.symmetry(ex.symmetry);
        if (ex.kind != SymmetryKind::AlmostDoob || !s.k) continue;
        RemarkCheck c;
        c.symmetry = s.name;
        ExprVec grad(sde.noise_dim());
        for (std::size_t a = 0; a < sde.noise_dim(); ++a) {
            for (std::size_t i = 0; i < sde.dim(); ++i) grad[a] += sde.diffusion[i][a] * s.k->diff(sde.vars[i]);
        }
        c.gradient = grad == s.V.H;
        c.not_harmonic = !generator_apply(sde, *s.k).is_zero();
        c.pass = c.gradient && c.not_harmonic;
        if (!c.pass) fail(s.name + " potential remark");
        r.remarks.push_back(c);
    }

    r.pass = r.failures.empty();
    return r;
}

void catalog_self_test() {
    for (const auto& name : catalog_names()) {
        const CatalogEntry e = load(name);
        for (const auto& s : e.file.symmetries) {
            const auto bad = sde_residual(e.sde(), s.V).failing();
            if (!bad.empty()) throw Error("catalog self-test failed: " + name + "/" + s.name + " " + bad.front());
        }
    }
}

}  // namespace stosym
