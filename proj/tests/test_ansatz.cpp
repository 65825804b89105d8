#include "stosym/ansatz.hpp"
#include "stosym/catalog.hpp"
#include "stosym/determining.hpp"
#include "stosym/transform.hpp"

#include <gmpxx.h>
#include <gtest/gtest.h>

#include <map>
#include <utility>
#include <vector>

using namespace stosym;

namespace {

const Expr x = Expr::var("x");
const Expr z = Expr::var("z");

// Dense polynomials in (x, z) with exact coefficients; independent of Expr.
using Poly = std::map<std::pair<int, int>, mpq_class>;

Poly dx(const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p) {
        if (m.first > 0) out[{m.first - 1, m.second}] += c * m.first;
    }
    return out;
}

Poly dz(const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p) {
        if (m.second > 0) out[{m.first, m.second - 1}] += c * m.second;
    }
    return out;
}

Poly add(Poly l, const Poly& r, const mpq_class& s = 1) {
    for (const auto& [m, c] : r) l[m] += s * c;
    return l;
}

// 1D Brownian motion with clock: L = d_xx / 2 + d_z.
Poly generator(const Poly& p) { return add(dz(p), dx(dx(p)), mpq_class(1, 2)); }

Poly constant(const mpq_class& c) { return Poly{{{0, 0}, c}}; }

std::size_t rank(std::vector<std::vector<mpq_class>> rows) {
    std::size_t r = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const mpq_class f = rows[i][c] / rows[r][c];
            for (std::size_t k = c; k < cols; ++k) rows[i][k] -= f * rows[r][k];
        }
        ++r;
    }
    return r;
}

// Nullity of the determining system for 1D Brownian motion when every
// unknown (Y^x, Y^z, tau, H[, k]) is a polynomial of total degree <= 2.
std::size_t brute_force_dimension(bool doob) {
    std::vector<std::pair<int, int>> monos;
    for (int d = 0; d <= 2; ++d) {
        for (int i = d; i >= 0; --i) monos.push_back({i, d - i});
    }
    const std::size_t components = doob ? 5 : 4;
    const std::size_t unknowns = components * monos.size();

    // Residual polynomials of each unit coefficient vector; the system is linear.
    std::vector<std::map<std::pair<int, std::pair<int, int>>, mpq_class>> columns;
    for (std::size_t u = 0; u < unknowns; ++u) {
        std::vector<Poly> c(components);
        c[u / monos.size()] = Poly{{monos[u % monos.size()], 1}};
        const Poly& yx = c[0];
        const Poly& yz = c[1];
        const Poly& tau = c[2];
        const Poly& h = c[3];
        // mu = (0, 1), sigma = (1, 0): Y(mu) = Y(sigma) = 0.
        std::vector<Poly> eq;
        eq.push_back(add(add(Poly{}, generator(yx), -1), h, -1));  // drift[x]
        eq.push_back(add(add(Poly{}, generator(yz), -1), tau));     // drift[z]
        eq.push_back(add(add(Poly{}, dx(yx), -1), tau, mpq_class(1, 2)));  // diff[x][1]
        eq.push_back(add(Poly{}, dx(yz), -1));                               // diff[z][1]
        if (doob) {
            const Poly& k = c[4];
            eq.push_back(add(h, dx(k), -1));  // H = sigma^T grad k
            eq.push_back(generator(k));        // L(k) = 0
        }
        std::map<std::pair<int, std::pair<int, int>>, mpq_class> col;
        for (std::size_t e = 0; e < eq.size(); ++e) {
            for (const auto& [m, v] : eq[e]) {
                if (v != 0) col[{static_cast<int>(e), m}] = v;
            }
        }
        columns.push_back(col);
    }
    std::map<std::pair<int, std::pair<int, int>>, std::size_t> row_of;
    for (const auto& col : columns) {
        for (const auto& [key, v] : col) row_of.emplace(key, row_of.size());
    }
    std::vector<std::vector<mpq_class>> rows(row_of.size(), std::vector<mpq_class>(unknowns));
    for (std::size_t u = 0; u < unknowns; ++u) {
        for (const auto& [key, v] : columns[u]) rows[row_of.at(key)][u] = v;
    }
    return unknowns - rank(rows);
}

AnsatzBasis catalog_basis(const CatalogEntry& e) {
    if (!e.file.ansatz) throw std::runtime_error("no ansatz basis for " + e.name);
    return *e.file.ansatz;
}

SymmetryGenerator gen(const NamedSymmetry& s) { return {s.V, s.k}; }

}  // namespace

TEST(BruteForceOracle, PolynomialHelpers) {
    const Poly p{{{2, 0}, 1}, {{0, 1}, -1}};  // x^2 - z
    for (const auto& [m, c] : generator(p)) EXPECT_EQ(c, 0);
    EXPECT_EQ(dx(p).at({1, 0}), 2);
    EXPECT_EQ(generator(constant(3)).size(), 0u);
}

TEST(Ansatz, BrownianDoobDimensionMatchesBruteForce) {
    const auto e = load("bm1d");
    const auto space = solve(e.sde(), catalog_basis(e), SolveMode::Doob);
    EXPECT_EQ(brute_force_dimension(true), 6u);
    EXPECT_EQ(space.dimension(), brute_force_dimension(true));
}

TEST(Ansatz, BrownianGeneralDimensionMatchesBruteForce) {
    const auto e = load("bm1d");
    const auto space = solve(e.sde(), catalog_basis(e), SolveMode::General);
    EXPECT_EQ(space.dimension(), brute_force_dimension(false));
}

TEST(Ansatz, BrownianSpacesContainTheCatalog) {
    const auto e = load("bm1d");
    const auto doob = solve(e.sde(), catalog_basis(e), SolveMode::Doob);
    const auto general = solve(e.sde(), catalog_basis(e), SolveMode::General);
    for (const auto& name : {"V1", "V2", "V3", "V4", "V5"}) {
        EXPECT_TRUE(contains(doob, gen(e.symmetry(name)))) << name;
        EXPECT_TRUE(contains(general, {e.symmetry(name).V, std::nullopt})) << name;
    }
    EXPECT_TRUE(contains(general, {e.symmetry("Valpha_1").V, std::nullopt}));
    EXPECT_TRUE(contains(general, {e.symmetry("Valpha_z").V, std::nullopt}));
    // alpha = z^2 integrates to z^3, outside the degree-two basis.
    EXPECT_FALSE(contains(general, {e.symmetry("Valpha_z2").V, std::nullopt}));
}

TEST(Ansatz, EmptyBasisGivesNothing) {
    const auto e = load("bm1d");
    EXPECT_EQ(solve(e.sde(), AnsatzBasis{}, SolveMode::General).dimension(), 0u);
    EXPECT_EQ(solve(e.sde(), AnsatzBasis{}, SolveMode::Doob).dimension(), 0u);
}

TEST(Ansatz, LargerBasisNeverShrinksTheSpace) {
    const auto e = load("bm1d");
    AnsatzBasis small{{Expr(1), x, z}, {}};
    const auto big = catalog_basis(e);
    for (const auto mode : {SolveMode::General, SolveMode::Doob}) {
        EXPECT_LE(solve(e.sde(), small, mode).dimension(), solve(e.sde(), big, mode).dimension());
    }
}

TEST(Ansatz, EveryGeneratorPassesTheDeterminingEquations) {
    for (const auto& name : catalog_names()) {
        const auto e = load(name);
        for (const auto mode : {SolveMode::General, SolveMode::Doob}) {
            const auto space = solve(e.sde(), catalog_basis(e), mode);
            for (const auto& g : space.generators) {
                EXPECT_TRUE(is_symmetry(e.sde(), g.V)) << name;
                if (mode == SolveMode::Doob) {
                    ASSERT_TRUE(g.k);
                    EXPECT_TRUE(is_doob_symmetry(e.sde(), g.V, *g.k)) << name;
                }
                // Solutions hold for every parameter value.
                for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                    EXPECT_LT(probe_sde_residual(e.sde(), g.V, 5, seed), 1e-9) << name;
                }
            }
        }
    }
}

TEST(Ansatz, CatalogDimensions) {
    const std::map<std::string, std::pair<std::size_t, std::size_t>> expected{
        {"bm1d", {6, 6}}, {"ou", {6, 16}}, {"cir", {4, 7}}, {"bm2d", {9, 11}}};
    for (const auto& [name, dims] : expected) {
        const auto e = load(name);
        EXPECT_EQ(solve(e.sde(), catalog_basis(e), SolveMode::Doob).dimension(), dims.first) << name;
        EXPECT_EQ(solve(e.sde(), catalog_basis(e), SolveMode::General).dimension(), dims.second) << name;
    }
}

TEST(Ansatz, OuAndCirSpacesContainTheirSymmetries) {
    for (const auto& name : {"ou", "cir"}) {
        const auto e = load(name);
        const auto doob = solve(e.sde(), catalog_basis(e), SolveMode::Doob);
        const auto general = solve(e.sde(), catalog_basis(e), SolveMode::General);
        for (const auto& s : e.file.symmetries) {
            EXPECT_TRUE(contains(general, {s.V, std::nullopt})) << name << " " << s.name;
            const bool doob_type = s.k && is_doob_symmetry(e.sde(), s.V, *s.k);
            EXPECT_EQ(contains(doob, gen(s)), doob_type) << name << " " << s.name;
        }
    }
}

TEST(Ansatz, PlanarBrownianDoobSpaceContainsAllEight) {
    const auto e = load("bm2d");
    const auto doob = solve(e.sde(), catalog_basis(e), SolveMode::Doob);
    for (int i = 1; i <= 8; ++i) {
        const auto& s = e.symmetry("V" + std::to_string(i));
        EXPECT_TRUE(contains(doob, gen(s))) << s.name;
    }
    EXPECT_FALSE(contains(doob, {e.symmetry("Vbeta_z").V, std::nullopt}));
}

TEST(Closure, BrownianDoobAlgebraIsClosed) {
    const auto e = load("bm1d");
    std::vector<InfTransform> gens;
    for (const auto& name : {"V1", "V2", "V3", "V4", "V5"}) gens.push_back(e.symmetry(name).V);
    const auto r = closure_check(e.sde(), gens);
    EXPECT_TRUE(r.closed);
    // Stored for i < j: [V1, V5] = -V4, i.e. [V5, V1] = V4.
    bool found = false;
    for (const auto& c : r.constants) {
        if (c.i != 0 || c.j != 4) continue;
        found = true;
        const std::vector<Coefficient> minus_v4{Coefficient(0), Coefficient(0), Coefficient(0), Coefficient(-1),
                                                Coefficient(0)};
        EXPECT_EQ(c.coefficients, minus_v4);
    }
    EXPECT_TRUE(found);
}

TEST(Closure, SolvedSpacesAreClosed) {
    for (const auto& name : catalog_names()) {
        const auto e = load(name);
        EXPECT_TRUE(closure_check(e.sde(), solve(e.sde(), catalog_basis(e), SolveMode::Doob)).closed) << name;
    }
}

TEST(Closure, SmallSubsets) {
    const auto e = load("bm1d");
    EXPECT_TRUE(closure_check(e.sde(), std::vector<InfTransform>{e.symmetry("V4").V}).closed);
    // [V1, V3] = -V1 stays inside.
    EXPECT_TRUE(closure_check(e.sde(), std::vector<InfTransform>{e.symmetry("V1").V, e.symmetry("V3").V}).closed);
    // [V5, V2] = 2 V3 leaves the span.
    const auto r = closure_check(e.sde(), std::vector<InfTransform>{e.symmetry("V2").V, e.symmetry("V5").V});
    EXPECT_FALSE(r.closed);
    ASSERT_TRUE(r.offending);
    EXPECT_EQ(*r.offending, (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(Closure, BracketImagesComputedDirectly) {
    const auto e = load("bm1d");
    const auto& vars = e.sde().vars;
    EXPECT_EQ(bracket(vars, e.symmetry("V1").V, e.symmetry("V3").V), e.symmetry("V1").V * Coefficient(-1));
    EXPECT_EQ(bracket(vars, e.symmetry("V5").V, e.symmetry("V2").V), e.symmetry("V3").V * Coefficient(2));
}
