#include "stosym/catalog.hpp"
#include "stosym/errors.hpp"
#include "stosym/io.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace stosym;

namespace {

const std::set<std::string> kVars{"x", "y", "z"};
const std::set<std::string> kParams{"a", "b", "sigma0"};

Expr parse(const std::string& s) { return parse_expr(s, kVars, kParams); }

const Expr x = Expr::var("x");
const Expr y = Expr::var("y");
const Expr z = Expr::var("z");
const Expr a = Expr::param("a");
const Expr b = Expr::param("b");

// Random expressions in the representable class: polynomial and half-integer
// powers of x, y, z, parameter coefficients and exponentials of a*z.
Expr random_expr(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> small(-3, 3);
    std::uniform_int_distribution<int> pick(0, 5);
    Expr out;
    const int terms = 1 + pick(rng) % 4;
    for (int t = 0; t < terms; ++t) {
        Expr term(Rational(small(rng), 1 + pick(rng)));
        switch (pick(rng)) {
            case 0: term *= x.pow_rational(Rational(small(rng), 2)); break;
            case 1: term *= y * y * z; break;
            case 2: term *= Expr::exp_linear(Expr(small(rng)) * a * z); break;
            case 3: term *= (a + b) / (a * a); break;
            case 4: term *= x.pow_rational(Rational(small(rng))) * b; break;
            default: break;
        }
        out += term;
    }
    return out;
}

}  // namespace

TEST(Parse, ModelDrifts) {
    EXPECT_EQ(parse("a*x + b"), a * x + b);
    EXPECT_EQ(parse("sigma0*sqrt(x)"), Expr::param("sigma0") * x.pow_rational(Rational(1, 2)));
    EXPECT_EQ(parse("x^(-1/2) - 2*x^2*exp(-a*z)"),
              x.pow_rational(Rational(-1, 2)) - Expr(2) * x * x * Expr::exp_linear(-(a * z)));
    EXPECT_EQ(parse("0.5*x"), Expr(Rational(1, 2)) * x);
    EXPECT_EQ(parse("(x + 1)^2 / a"), (x * x + Expr(2) * x + Expr(1)) / a);
}

TEST(Parse, ExponentialOfNonLinearArgument) {
    try {
        parse("1 + exp(x^2)");
        FAIL() << "expected NotRepresentable";
    } catch (const NotRepresentable& e) {
        EXPECT_NE(std::string(e.what()).find("position"), std::string::npos) << e.what();
    }
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
    try {
        parse("a*x + ");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position, 6u);
    }
    EXPECT_THROW(parse("x + )"), SyntaxError);
    EXPECT_THROW(parse("x ^ y"), SyntaxError);
}

TEST(Parse, UndeclaredSymbol) { EXPECT_THROW(parse("x + w"), DeclarationError); }

TEST(Parse, MultiTermDivisorIsNotRepresentable) { EXPECT_THROW(parse("1/(x + 1)"), NotRepresentable); }

TEST(Print, RandomExpressionsRoundTrip) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const Expr e = random_expr(rng);
        EXPECT_EQ(parse(to_string(e)), e) << to_string(e);
    }
}

TEST(Print, CanonicalForms) {
    EXPECT_EQ(to_string(Expr(0)), "0");
    EXPECT_EQ(to_string(Expr(Rational(-3, 4))), "-3/4");
    EXPECT_EQ(parse(to_string(x.pow_rational(Rational(1, 2)))), x.pow_rational(Rational(1, 2)));
}

TEST(ModelFile, CatalogRoundTrip) {
    for (const auto& name : catalog_names()) {
        const auto e = load(name);
        const std::string text = print_model(e.file);
        const ModelFile back = parse_model(text);
        EXPECT_EQ(print_model(back), text) << name;
        EXPECT_EQ(back.sde.drift, e.sde().drift) << name;
        EXPECT_EQ(back.sde.diffusion, e.sde().diffusion) << name;
        ASSERT_EQ(back.symmetries.size(), e.file.symmetries.size()) << name;
        for (std::size_t i = 0; i < back.symmetries.size(); ++i) {
            EXPECT_EQ(back.symmetries[i].V, e.file.symmetries[i].V) << name << " " << back.symmetries[i].name;
            EXPECT_EQ(back.symmetries[i].k, e.file.symmetries[i].k) << name;
        }
        ASSERT_EQ(back.pdes.size(), e.file.pdes.size());
        for (std::size_t i = 0; i < back.pdes.size(); ++i) EXPECT_EQ(back.pdes[i].xi, e.file.pdes[i].xi) << name;
    }
}

TEST(ModelFile, SmallModel) {
    const ModelFile f = parse_model(R"(# scaled Brownian motion
[model]
name = sbm
vars = [x, z]
time_var = z
params = [c]
nonexplosive = true
drift = [0, 1]
sigma = [c, 0]

[symmetry.shift]
Y = [1, 0]
)");
    EXPECT_EQ(f.sde.vars, (std::vector<std::string>{"x", "z"}));
    EXPECT_EQ(f.sde.diffusion[0][0], Expr::param("c"));
    EXPECT_TRUE(f.sde.nonexplosive);
    EXPECT_EQ(f.symmetry("shift").V.Y[0], Expr(1));
    EXPECT_TRUE(f.symmetry("shift").V.tau.is_zero());
}

TEST(ModelFile, SplitList) {
    EXPECT_EQ(split_list("[a, b, [c, d]]"), (std::vector<std::string>{"a", "b", "[c, d]"}));
    EXPECT_EQ(split_list("[]"), (std::vector<std::string>{}));
}
