#include "stosym/catalog.hpp"
#include "stosym/determining.hpp"
#include "stosym/doob.hpp"
#include "stosym/errors.hpp"
#include "stosym/pde_bridge.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace stosym;

namespace {

const Expr x = Expr::var("x");
const Expr y = Expr::var("y");
const Expr z = Expr::var("z");
const Expr a = Expr::param("a");
const Expr s0 = Expr::param("sigma0");

Expr q(long n, long d) { return Expr(Rational(n, d)); }

const CatalogEntry& entry(const std::string& name) {
    static std::map<std::string, CatalogEntry> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load(name)).first;
    return it->second;
}

const NamedSymmetry& sym(const std::string& model, const std::string& name) { return entry(model).symmetry(name); }

Expr residual(const ResidualReport& r, const std::string& label) {
    const auto* e = r.find(label);
    if (!e) throw std::runtime_error("no residual labeled " + label);
    return e->residual;
}

// k is only defined up to an additive constant.
bool same_up_to_constant(const Expr& l, const Expr& r) { return (l - r).is_constant(); }

}  // namespace

TEST(Determining, TranslationOfBrownianMotion) {
    EXPECT_TRUE(sde_residual(entry("bm1d").sde(), sym("bm1d", "V4").V).all_zero());
}

TEST(Determining, PureGirsanovIsNotASymmetry) {
    const Sde& s = entry("bm1d").sde();
    InfTransform v = InfTransform::zero(2, 1);
    v.H = {Expr(1)};
    const auto r = sde_residual(s, v);
    EXPECT_EQ(residual(r, "drift[x]"), Expr(-1));
    EXPECT_TRUE(residual(r, "drift[z]").is_zero());
    EXPECT_EQ(r.failing(), (std::vector<std::string>{"drift[x]"}));
}

TEST(Determining, NonDoobSymmetriesOfOuAndCir) {
    EXPECT_TRUE(is_symmetry(entry("ou").sde(), sym("ou", "Vt2").V));
    EXPECT_TRUE(is_symmetry(entry("cir").sde(), sym("cir", "Vt1").V));
}

TEST(Determining, WrongTimeScalingFailsTheDiffusionBlock) {
    InfTransform v = sym("bm1d", "V4").V;
    v.tau = Expr(1);
    const auto r = sde_residual(entry("bm1d").sde(), v);
    EXPECT_FALSE(r.all_zero());
    EXPECT_EQ(residual(r, "diff[x][1]"), q(1, 2));
}

TEST(Determining, CorruptedTauIsCaughtOnEveryCatalogSymmetry) {
    // Mutation test: tau + 1 always breaks the tau sigma / 2 term.
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        for (const auto& s : e.file.symmetries) {
            InfTransform v = s.V;
            v.tau += Expr(1);
            const auto r = sde_residual(e.sde(), v);
            EXPECT_FALSE(r.all_zero()) << name << " " << s.name;
            bool diffusion_fails = false;
            for (const auto& label : r.failing()) diffusion_fails = diffusion_fails || label.rfind("diff[", 0) == 0;
            EXPECT_TRUE(diffusion_fails) << name << " " << s.name;
        }
    }
}

TEST(Determining, ResidualsAreLinear) {
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        const auto& syms = e.file.symmetries;
        for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
            InfTransform u = syms[i].V;
            u.H[0] += x;  // off the symmetry set so residuals are nonzero
            const InfTransform& v = syms[i + 1].V;
            const auto ru = sde_residual(e.sde(), u);
            const auto rv = sde_residual(e.sde(), v);
            const auto sum = sde_residual(e.sde(), u + v);
            ASSERT_EQ(sum.entries.size(), ru.entries.size());
            for (std::size_t j = 0; j < sum.entries.size(); ++j) {
                EXPECT_EQ(sum.entries[j].residual, ru.entries[j].residual + rv.entries[j].residual)
                    << name << " " << sum.entries[j].label;
            }
        }
    }
}

TEST(Determining, DoobConditionsOnQuadraticPotential) {
    const auto& v = sym("bm1d", "V2");
    EXPECT_TRUE(doob_residual(entry("bm1d").sde(), v.V, z - x * x).all_zero());
    EXPECT_TRUE(doob_residual(entry("bm1d").sde(), InfTransform::zero(2, 1), Expr(0)).all_zero());
}

TEST(Determining, TimeChangeFamilyFailsHarmonicity) {
    // alpha = z: k = -x^2/4 is a gradient potential, L(k) = -1/4.
    const auto& v = sym("bm1d", "Valpha_z");
    const auto r = doob_residual(entry("bm1d").sde(), v.V, q(-1, 4) * x * x);
    EXPECT_EQ(residual(r, "doob.k"), q(-1, 4));
    EXPECT_TRUE(residual(r, "doob.H[1]").is_zero());
}

TEST(Determining, DoobImpliesSymmetry) {
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        for (const auto& s : e.file.symmetries) {
            if (!s.k || !is_doob_symmetry(e.sde(), s.V, *s.k)) continue;
            EXPECT_TRUE(is_symmetry(e.sde(), s.V)) << name << " " << s.name;
        }
    }
}

TEST(Determining, HeatEquationScaling) {
    const Sde& s = entry("bm1d").sde();
    EXPECT_TRUE(is_pde_symmetry(s, PdeSymmetry{Expr(2) * z, {x}, Expr(0)}));
    EXPECT_TRUE(is_pde_symmetry(s, PdeSymmetry{Expr(0), {Expr(0)}, Expr(-1)}));
}

TEST(Determining, GalileanBoostNeedsItsMultiplier) {
    const Sde& s = entry("bm1d").sde();
    EXPECT_FALSE(pde_residual(s, PdeSymmetry{Expr(0), {z}, Expr(0)}).all_zero());
    EXPECT_TRUE(pde_residual(s, PdeSymmetry{Expr(0), {z}, -x}).all_zero());
}

TEST(Determining, NumericProbesAgreeWithExactZeros) {
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        for (const auto& s : e.file.symmetries) {
            EXPECT_LT(probe_sde_residual(e.sde(), s.V, 100), 1e-9) << name << " " << s.name;
        }
    }
    InfTransform bad = sym("bm1d", "V4").V;
    bad.tau = Expr(1);
    EXPECT_GT(probe_sde_residual(entry("bm1d").sde(), bad, 10), 0.1);
}

TEST(Doob, RecoverQuadraticPotential) {
    const auto r = recover_k(entry("bm1d").sde(), {Expr(-2) * x});
    ASSERT_EQ(r.status, PotentialRecovery::Status::Found);
    EXPECT_EQ(r.particular, -(x * x));
    EXPECT_EQ(r.free_vars, (std::vector<std::string>{"z"}));
}

TEST(Doob, RotationGeneratorIsNotAGradient) {
    const auto r = recover_k(entry("bm2d").sde(), {-y, x});
    ASSERT_EQ(r.status, PotentialRecovery::Status::NotClosed);
    ASSERT_TRUE(r.witness);
    const std::set<std::string> pair{r.witness->first, r.witness->second};
    EXPECT_EQ(pair, (std::set<std::string>{"x", "y"}));
}

TEST(Doob, ZeroGeneratorHasZeroPotential) {
    const auto r = recover_k(entry("ou").sde(), {Expr(0)});
    ASSERT_EQ(r.status, PotentialRecovery::Status::Found);
    EXPECT_TRUE(r.particular.is_zero());
}

TEST(Doob, RecoveredPotentialsAreSound) {
    // sigma^T grad k == H whenever a potential is returned.
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        const Sde& s = e.sde();
        for (const auto& sy : e.file.symmetries) {
            const auto r = recover_k(s, sy.V.H);
            if (r.status != PotentialRecovery::Status::Found) continue;
            for (std::size_t al = 0; al < s.noise_dim(); ++al) {
                Expr g;
                for (std::size_t i = 0; i < s.dim(); ++i) g += s.diffusion[i][al] * r.particular.diff(s.vars[i]);
                EXPECT_EQ(g, sy.V.H[al]) << name << " " << sy.name;
            }
        }
    }
}

TEST(Doob, ClassifyExamples) {
    auto c = classify(entry("bm1d").sde(), sym("bm1d", "V1").V);
    EXPECT_EQ(c.kind, SymmetryKind::Doob);
    ASSERT_TRUE(c.k);
    EXPECT_TRUE(same_up_to_constant(*c.k, -x));

    c = classify(entry("bm1d").sde(), sym("bm1d", "Valpha_z2").V);
    EXPECT_EQ(c.kind, SymmetryKind::AlmostDoob);

    c = classify(entry("cir").sde(), sym("cir", "Vt2").V);
    EXPECT_EQ(c.kind, SymmetryKind::AlmostDoob);
    ASSERT_TRUE(c.k);
    EXPECT_TRUE(same_up_to_constant(*c.k, x / s0));

    c = classify(entry("bm2d").sde(), sym("bm2d", "Vbeta_z").V);
    EXPECT_EQ(c.kind, SymmetryKind::NonDoob);
    EXPECT_TRUE(c.witness);
}

TEST(Doob, ClassificationAgreesWithDoobResidual) {
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        for (const auto& sy : e.file.symmetries) {
            const auto c = classify(e.sde(), sy.V);
            if (e.sde().noise_dim() == 1) EXPECT_NE(c.kind, SymmetryKind::NonDoob) << name << " " << sy.name;
            if (c.kind == SymmetryKind::Doob) {
                ASSERT_TRUE(c.k);
                EXPECT_TRUE(is_doob_symmetry(e.sde(), sy.V, *c.k)) << name << " " << sy.name;
            }
            if (c.kind == SymmetryKind::AlmostDoob) {
                ASSERT_TRUE(c.k);
                EXPECT_FALSE(generator_apply(e.sde(), *c.k).is_zero()) << name << " " << sy.name;
            }
        }
    }
}

TEST(Doob, FiniteDoobPairConditions) {
    const Sde& s = entry("bm1d").sde();
    EXPECT_TRUE(doob_condition_residual(s, {Expr(1)}, x - q(1, 2) * z).all_zero());
    EXPECT_TRUE(doob_condition_residual(s, {Expr(0)}, Expr(0)).all_zero());
    const auto r = doob_condition_residual(s, {Expr(1)}, x);
    EXPECT_EQ(r.failing().size(), 1u);
    EXPECT_EQ(r.entries.back().residual, q(1, 2));
}

TEST(Doob, RecoverDoobPotential) {
    const Sde& s = entry("bm1d").sde();
    auto p = recover_doob_potential(s, {Expr(1)});
    ASSERT_TRUE(p);
    EXPECT_TRUE(same_up_to_constant(*p, x - q(1, 2) * z));
    p = recover_doob_potential(s, {-Expr(1)});
    ASSERT_TRUE(p);
    EXPECT_TRUE(same_up_to_constant(*p, -x - q(1, 2) * z));
}

TEST(Doob, DensityRecipes) {
    const Sde& s = entry("bm1d").sde();
    auto d = density_recipe(s, {Expr(0)});
    EXPECT_TRUE(d.theta[0].is_zero());
    EXPECT_TRUE(d.half_norm.is_zero());

    d = density_recipe(s, {Expr(1)}, x - q(1, 2) * z);
    EXPECT_EQ(d.half_norm, q(1, 2));
    EXPECT_TRUE(d.doob_potential);
    d = density_recipe(s, {Expr(1)}, x);
    EXPECT_FALSE(d.doob_potential);

    const Expr e = Expr::exp_linear(-(a * z));
    d = density_recipe(entry("ou").sde(), {a * e});
    EXPECT_EQ(d.half_norm, q(1, 2) * a * a * e * e);
}

TEST(Doob, DensityNeedsNonExplosiveModel) {
    Sde s = entry("bm1d").sde();
    s.nonexplosive = false;
    EXPECT_THROW(density_recipe(s, {Expr(1)}), NonExplosiveRequired);
}

TEST(Bridge, SdeToPdeExamples) {
    const Sde& s = entry("bm1d").sde();
    EXPECT_EQ(sde_to_pde(s, sym("bm1d", "V3").V, Expr(0)), (PdeSymmetry{Expr(2) * z, {x}, Expr(0)}));
    EXPECT_EQ(sde_to_pde(s, sym("bm1d", "V2").V, z - x * x),
              (PdeSymmetry{Expr(2) * z * z, {Expr(2) * x * z}, z - x * x}));
    EXPECT_EQ(sde_to_pde(s, InfTransform::zero(2, 1), Expr(-1)), (PdeSymmetry{Expr(0), {Expr(0)}, Expr(-1)}));
}

TEST(Bridge, SdeToPdeRejectsAlmostDoob) {
    const auto& v = sym("bm1d", "Valpha_z2");
    ASSERT_TRUE(v.k);
    EXPECT_THROW(sde_to_pde(entry("bm1d").sde(), v.V, *v.k), DoobResidualNonzero);
}

TEST(Bridge, PdeToSdeExamples) {
    const Sde& s = entry("bm1d").sde();
    auto [v, k] = pde_to_sde(s, PdeSymmetry{Expr(2) * z, {x}, Expr(0)});
    EXPECT_EQ(v, sym("bm1d", "V3").V);
    EXPECT_TRUE(k.is_zero());

    const Sde& s2 = entry("bm2d").sde();
    auto [v5, k5] = pde_to_sde(s2, PdeSymmetry{Expr(0), {y, -x}, Expr(0)});
    EXPECT_EQ(v5.C, (ExprMat{{Expr(0), Expr(1)}, {Expr(-1), Expr(0)}}));
    EXPECT_TRUE(v5.tau.is_zero());
    EXPECT_EQ(v5, sym("bm2d", "V5").V);

    auto [v0, k0] = pde_to_sde(s, PdeSymmetry{Expr(0), {Expr(0)}, Expr(-1)});
    EXPECT_TRUE(v0.is_zero());
    EXPECT_EQ(k0, Expr(-1));
}

TEST(Bridge, PdeToSdeErrors) {
    const Sde& s = entry("bm1d").sde();
    EXPECT_THROW(pde_to_sde(s, PdeSymmetry{Expr(0), {z}, Expr(0)}), PdeResidualNonzero);

    Sde deterministic = s;
    deterministic.diffusion = {{Expr(0)}, {Expr(0)}};
    EXPECT_THROW(pde_to_sde(deterministic, PdeSymmetry{Expr(0), {Expr(0)}, Expr(-1)}), SingularSigma);
}

TEST(Bridge, RoundTripAndAntisymmetryOnCatalog) {
    for (const auto& name : catalog_names()) {
        const auto& e = entry(name);
        EXPECT_TRUE(round_trip_check(e.sde(), InfTransform::zero(e.sde().dim(), e.sde().noise_dim()), Expr(0)));
        for (const auto& sy : e.file.symmetries) {
            if (!sy.k || !is_doob_symmetry(e.sde(), sy.V, *sy.k)) continue;
            EXPECT_TRUE(round_trip_check(e.sde(), sy.V, *sy.k)) << name << " " << sy.name;
            const auto xi = sde_to_pde(e.sde(), sy.V, *sy.k);
            EXPECT_TRUE(is_pde_symmetry(e.sde(), xi)) << name << " " << sy.name;
            const auto back = pde_to_sde(e.sde(), xi).first;
            EXPECT_TRUE(is_zero(back.C + transpose(back.C))) << name << " " << sy.name;
        }
    }
}

TEST(Bridge, GeneratorCounts) {
    // Lie point symmetries of the backward equations, trivial scaling included.
    const std::map<std::string, std::size_t> expected{{"bm1d", 6}, {"bm2d", 9}, {"ou", 6}, {"cir", 4}};
    for (const auto& [name, count] : expected) EXPECT_EQ(entry(name).file.pdes.size(), count) << name;
}
