#include "stosym/catalog.hpp"
#include "stosym/doob.hpp"
#include "stosym/errors.hpp"
#include "stosym/montecarlo.hpp"
#include "stosym/transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace stosym;

namespace {

const Expr x = Expr::var("x");
const Expr z = Expr::var("z");

McConfig small_config(const CatalogEntry& e, std::size_t paths, double dt = 0.01) {
    McConfig cfg = e.file.mc.value_or(McConfig{});
    cfg.n_paths = paths;
    cfg.dt = dt;
    if (cfg.x0.empty()) cfg.x0.assign(e.sde().dim(), 0.0);
    return cfg;
}

void expect_identical(const PathBundle& l, const PathBundle& r) {
    EXPECT_EQ(l.X, r.X);
    EXPECT_EQ(l.W, r.W);
    EXPECT_EQ(l.logw, r.logw);
    EXPECT_EQ(l.clock, r.clock);
    EXPECT_EQ(l.x_initial, r.x_initial);
    EXPECT_EQ(l.x_final, r.x_final);
}

double first(const double* v, const double*) { return v[0]; }

}  // namespace

TEST(PairwiseSum, MatchesExactSums) {
    std::vector<double> v(1001);
    std::iota(v.begin(), v.end(), 0.0);
    EXPECT_EQ(pairwise_sum(v.data(), v.size()), 500500.0);
    EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
    EXPECT_EQ(pairwise_sum(v.data() + 7, 1), 7.0);
}

TEST(KolmogorovTail, TabulatedQuantiles) {
    EXPECT_NEAR(kolmogorov_tail(1.3581), 0.05, 1e-4);
    EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(kolmogorov_tail(1.2238), 0.10, 1e-4);
    EXPECT_EQ(kolmogorov_tail(0.0), 1.0);
    EXPECT_LT(kolmogorov_tail(5.0), 1e-20);
}

TEST(Simulate, ParallelMatchesSerialReference) {
    for (const auto& name : {"bm1d", "ou", "cir", "bm2d"}) {
        const auto e = load(name);
        const McConfig cfg = small_config(e, 64);
        expect_identical(simulate(e.sde(), cfg), simulate_serial(e.sde(), cfg));
    }
}

TEST(Simulate, TransformParallelMatchesSerialReference) {
    for (const auto& name : {"bm1d", "ou", "bm2d"}) {
        const auto e = load(name);
        McConfig cfg = small_config(e, 64);
        cfg.eval_times = {0.25, 0.5, 1.0};
        const auto base = simulate(e.sde(), cfg);
        for (const auto& t : e.file.transforms) {
            expect_identical(transform_paths(base, t.T), transform_paths_serial(base, t.T));
        }
    }
}

TEST(Simulate, IndependentOfThreadCount) {
    const auto e = load("bm2d");
    McConfig cfg = small_config(e, 200);
    cfg.threads = 1;
    const auto one = simulate(e.sde(), cfg);
    const auto t = e.file.transform("girsanov_h1").T;
    const auto one_t = transform_paths(one, t);
    for (int threads : {2, 8}) {
        cfg.threads = threads;
        const auto many = simulate(e.sde(), cfg);
        expect_identical(one, many);
        expect_identical(one_t, transform_paths(many, t));
        EXPECT_EQ(mean_weight(one_t).mean, mean_weight(transform_paths(many, t)).mean);
    }
}

TEST(Simulate, SeedChangesPaths) {
    const auto e = load("bm1d");
    McConfig cfg = small_config(e, 16);
    const auto l = simulate(e.sde(), cfg);
    cfg.seed += 1;
    EXPECT_NE(l.X, simulate(e.sde(), cfg).X);
}

TEST(Simulate, BrownianMoments) {
    const auto e = load("bm1d");
    const auto b = simulate(e.sde(), small_config(e, 20000));
    const auto m = weighted_mean(b, 0, first, false);
    EXPECT_LT(std::abs(m.mean), 4.0 * std::sqrt(1.0 / 20000));
    const auto v = weighted_mean(b, 0, [](const double* s, const double*) { return s[0] * s[0]; }, false);
    // Var(X^2) = 2 for a standard normal.
    EXPECT_LT(std::abs(v.mean - 1.0), 4.0 * std::sqrt(2.0 / 20000));
    EXPECT_NEAR(b.x(0, 0)[1], 1.0, 1e-12);  // clock coordinate
}

TEST(Simulate, OrnsteinUhlenbeckMean) {
    // a = -1, b = 0, x0 = 1: E X_1 = exp(-1), Var X_1 = (1 - exp(-2)) / 2.
    const auto e = load("ou");
    McConfig cfg = small_config(e, 20000, 0.001);
    cfg.x0 = {1.0, 0.0};
    const auto b = simulate(e.sde(), cfg);
    const auto m = weighted_mean(b, 0, first, false);
    const double sd = std::sqrt((1.0 - std::exp(-2.0)) / 2.0 / 20000);
    EXPECT_LT(std::abs(m.mean - std::exp(-1.0)), 4.0 * sd);
}

TEST(Simulate, DomainExitReportsThePath) {
    const auto e = load("bm1d");
    Sde s = e.sde();
    s.domain["x"] = Interval{-0.05, 0.05};
    try {
        simulate(s, small_config(e, 10));
        FAIL() << "expected DomainExit";
    } catch (const DomainExit& ex) {
        EXPECT_LT(ex.path_index, 10u);
    }
}

TEST(Transform, IdentityKeepsBundle) {
    const auto e = load("bm1d");
    const auto b = simulate(e.sde(), small_config(e, 32));
    const auto t = transform_paths(b, identity_transform(e.sde().vars, 1));
    EXPECT_EQ(t.X, b.X);
    for (double w : t.logw) EXPECT_EQ(w, 0.0);
}

TEST(Transform, GirsanovRemovesTheDrift) {
    // Under the weights W' = W - t is a Brownian motion.
    const auto e = load("bm1d");
    const auto b = simulate(e.sde(), small_config(e, 20000));
    const auto t = transform_paths(b, e.file.transform("girsanov_h1").T);
    const auto m = weighted_mean(t, 0, [](const double*, const double* w) { return w[0]; });
    EXPECT_LT(std::abs(m.mean), 4.0 * m.se);
    const auto w = mean_weight(t);
    EXPECT_LT(std::abs(w.mean - 1.0), 4.0 * w.se);
    EXPECT_GT(effective_sample_size(t), 0.2 * 20000);
}

TEST(Transform, ShortTransformedClock) {
    const auto e = load("bm1d");
    FiniteTransform slow = identity_transform(e.sde().vars, 1);
    slow.eta = Expr(Rational(1, 4));
    const auto b = simulate(e.sde(), small_config(e, 8));
    EXPECT_THROW(transform_paths(b, slow), ClockTooShort);
}

TEST(WeakCompare, SameLawPasses) {
    const auto e = load("bm1d");
    McConfig cfg = small_config(e, 5000);
    const auto l = simulate(e.sde(), cfg);
    cfg.seed += 1;
    const auto r = simulate(e.sde(), cfg);
    const auto rep = weak_compare(transform_paths(l, identity_transform(e.sde().vars, 1)), r);
    EXPECT_TRUE(rep.pass) << rep.max_abs_z << " " << rep.min_p;
}

TEST(WeakCompare, UnweightedShearFails) {
    // Without the weight the shear moves the mean to 1: z ~ sqrt(N) = 70.
    const auto e = load("bm1d");
    McConfig cfg = small_config(e, 5000);
    const auto base = simulate(e.sde(), cfg);
    cfg.seed += 1;
    const auto direct = simulate(e.sde(), cfg);
    const auto t = transform_paths(base, e.file.transform("shear_a1").T);
    EXPECT_TRUE(weak_compare(t, direct).pass);
    const auto bad = weak_compare(t, direct, {}, false);
    EXPECT_FALSE(bad.pass);
    EXPECT_GT(bad.max_abs_z, 10.0);
}

TEST(DoobPathwise, ExactForBrownianMotion) {
    const auto e = load("bm1d");
    const auto b = simulate(e.sde(), small_config(e, 500));
    const auto recipe = density_recipe(e.sde(), {Expr(1)}, x - Expr(Rational(1, 2)) * z);
    EXPECT_LT(doob_pathwise_check(b, recipe).max_discrepancy, 1e-12);
    const auto zero = density_recipe(e.sde(), {Expr(0)}, Expr(0));
    EXPECT_EQ(doob_pathwise_check(b, zero).max_discrepancy, 0.0);
    EXPECT_THROW(doob_pathwise_check(b, density_recipe(e.sde(), {Expr(1)}, x)), PotentialMissing);
}

TEST(Csv, HeaderAndRows) {
    const auto e = load("bm1d");
    McConfig cfg = small_config(e, 3);
    cfg.eval_times = {0.5, 1.0};
    std::ostringstream os;
    write_csv(os, simulate(e.sde(), cfg));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "path_id,t,X_1,X_2,logw");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    }
    EXPECT_EQ(rows, 6);
}
