#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include <ricci_forge/exprs.hpp>

namespace ex = ricci_forge::exprs;
using ricci_forge::DomainError;
using ricci_forge::ParseError;
using ricci_forge::Rational;

namespace {

const char* const kProfileF = "r*(1+r^2)^(-1/4)";

double central_fd(const ex::Expr& e, double r, double h) {
    return (ex::eval(e, r + h) - ex::eval(e, r - h)) / (2 * h);
}

// Random trees whose derivatives stay well conditioned on (0.1, 10): function
// arguments are bounded and denominators are bounded away from zero.
class TameGen {
  public:
    explicit TameGen(std::uint64_t seed) : rng_(seed) {}

    ex::Expr tree(int depth) {
        if (depth <= 1) return leaf();
        switch (pick(9)) {
            case 0: return ex::add(tree(depth - 1), tree(depth - 1));
            case 1: return ex::sub(tree(depth - 1), tree(depth - 1));
            case 2: return ex::mul(tree(depth - 1), tree(depth - 1));
            case 3: return ex::div(tree(depth - 1), safe_den(depth - 1));
            case 4: return ex::neg(tree(depth - 1));
            case 5: return ex::pow(ex::add(ex::constant(Rational(1)), ex::pow(bounded(depth - 1), Rational(2))),
                                   Rational(static_cast<std::int64_t>(pick(7)) - 3, 1 + pick(4)));
            case 6: return ex::sin(tree(depth - 1));
            case 7: return ex::cos(tree(depth - 1));
            default: return ex::exp(bounded(depth - 1));
        }
    }

  private:
    ex::Expr leaf() {
        switch (pick(4)) {
            case 0: return ex::constant(Rational(static_cast<std::int64_t>(pick(9)) - 4, 1 + pick(3)));
            case 1: return ex::constant(0.25 + 0.5 * static_cast<double>(pick(5)));
            default: return ex::variable();
        }
    }
    ex::Expr bounded(int depth) { return ex::sin(tree(depth)); }
    ex::Expr safe_den(int depth) {
        if (pick(2) == 0) return ex::add(ex::constant(Rational(2)), ex::cos(tree(depth)));
        return ex::add(ex::constant(Rational(1)), ex::pow(bounded(depth), Rational(2)));
    }
    std::int64_t pick(int n) { return static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(n)); }

    std::mt19937_64 rng_;
};

}  // namespace

TEST(Parse, ReferenceProfileShape) {
    const auto f = ex::parse(kProfileF);
    ASSERT_EQ(f.kind(), ex::Kind::Mul);
    EXPECT_EQ(f.lhs().kind(), ex::Kind::Variable);
    ASSERT_EQ(f.rhs().kind(), ex::Kind::Pow);
    EXPECT_EQ(f.rhs().exponent(), Rational(-1, 4));
    EXPECT_EQ(ex::parse("r").kind(), ex::Kind::Variable);
}

TEST(Parse, Precedence) {
    EXPECT_EQ(ex::to_string(ex::parse("-r^2")), "-r^2");
    EXPECT_EQ(ex::parse("-r^2").kind(), ex::Kind::Neg);
    EXPECT_EQ(ex::parse("2^3^2"), ex::constant(Rational(512)));
    EXPECT_EQ(ex::parse("r^-1").exponent(), Rational(-1));
    EXPECT_EQ(ex::parse("1-2-3"), ex::constant(Rational(-4)));
    EXPECT_EQ(ex::parse("r-(r-r)"), ex::sub(ex::variable(), ex::sub(ex::variable(), ex::variable())));
    EXPECT_DOUBLE_EQ(ex::eval(ex::parse("2*r^2/4"), 3.0), 4.5);
}

TEST(Parse, ConstantFoldingIsExactButSkipsZeroDivision) {
    EXPECT_EQ(ex::parse("1/3+1/6"), ex::constant(Rational(1, 2)));
    EXPECT_EQ(ex::parse("(2/3)^-2"), ex::constant(Rational(9, 4)));
    const auto z = ex::parse("1/0");
    EXPECT_EQ(z.kind(), ex::Kind::Div);
    EXPECT_THROW(ex::eval(z, 1.0), DomainError);
    EXPECT_EQ(ex::parse("0.5").value().index(), 1U);
}

TEST(Parse, ErrorsCarryOffsets) {
    try {
        ex::parse("r + foo(r)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 4U);
        EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
    }
    try {
        ex::parse("(r+1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 4U);
    }
    try {
        ex::parse("r^r");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 2U);
    }
    EXPECT_THROW(ex::parse("r*"), ParseError);
    EXPECT_THROW(ex::parse("r r"), ParseError);
    EXPECT_THROW(ex::parse(""), ParseError);
}

TEST(Eval, Examples) {
    EXPECT_DOUBLE_EQ(ex::eval(ex::parse("(1+r^2)^(-1)"), 1.0), 0.5);
    EXPECT_DOUBLE_EQ(ex::eval(ex::parse("(1+r^2)^(-1)"), 2.0), 0.2);
    EXPECT_NEAR(ex::eval(ex::parse(kProfileF), 1.0), std::pow(2.0, -0.25), 1e-15);
    EXPECT_THROW(ex::eval(ex::parse("1/r"), 0.0), DomainError);
    EXPECT_THROW(ex::eval(ex::parse("r^(-1/2)"), 0.0), DomainError);
    EXPECT_THROW(ex::eval(ex::parse("sqrt(r)"), -1.0), DomainError);
    EXPECT_THROW(ex::eval(ex::parse("r^(1/2)"), -1.0), DomainError);
    EXPECT_DOUBLE_EQ(ex::eval(ex::parse("r^(1/3)"), -8.0), -2.0);
    EXPECT_DOUBLE_EQ(ex::eval(ex::parse("r^(2/3)"), -8.0), 4.0);
}

TEST(Eval, DomainErrorNamesNode) {
    try {
        ex::eval(ex::parse("r+1/(r-1)"), 1.0);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("1/(r-1)"), std::string::npos);
    }
}

TEST(Diff, Examples) {
    EXPECT_EQ(ex::to_string(ex::diff(ex::parse("r^2"), 1)), "2*r");
    EXPECT_EQ(ex::to_string(ex::diff(ex::parse("sin(r)"), 2)), "-sin(r)");
    EXPECT_DOUBLE_EQ(ex::eval(ex::diff(ex::parse(kProfileF), 1), 0.0), 1.0);
    EXPECT_THROW(ex::diff(ex::parse("r"), 3), ricci_forge::SpecError);
}

TEST(Diff, ReferenceProfileMatchesFiniteDifferences) {
    const auto f = ex::parse(kProfileF);
    const auto d1 = ex::diff(f, 1);
    const auto d2 = ex::diff(f, 2);
    EXPECT_NEAR(ex::eval(d1, 0.0), central_fd(f, 0.0, 1e-5), 1e-9);
    for (double r : {0.01, 0.5, 1.0, 3.0, 20.0, 50.0}) {
        EXPECT_NEAR(ex::eval(d1, r), central_fd(f, r, 1e-5), 1e-7 * (1 + std::abs(ex::eval(d1, r))));
        EXPECT_NEAR(ex::eval(d2, r), central_fd(d1, r, 1e-5), 1e-7 * (1 + std::abs(ex::eval(d2, r))));
    }
}

TEST(Diff, EvaluationIsBitDeterministic) {
    const auto d = ex::diff(ex::parse("exp(sin(r))*(1+r^2)^(-3/4)"), 2);
    const double a = ex::eval(d, 1.2345);
    const double b = ex::eval(ex::parse(ex::to_string(d)), 1.2345);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
}

TEST(Property, DerivativeMatchesCentralDifferences) {
    TameGen gen(20241016);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pick_r(0.1, 10.0);
    int compared = 0;
    for (int t = 0; t < 100; ++t) {
        const auto e = gen.tree(1 + t % 6);
        const auto d = ex::diff(e, 1);
        for (int k = 0; k < 20; ++k) {
            const double r = pick_r(rng);
            double exact = 0.0;
            double fd = 0.0;
            try {
                exact = ex::eval(d, r);
                fd = central_fd(e, r, 1e-5);
            } catch (const DomainError&) {
                continue;
            }
            if (!std::isfinite(exact) || !std::isfinite(fd)) continue;
            ++compared;
            EXPECT_LE(std::abs(exact - fd), 1e-6 * (1 + std::abs(exact)))
                << ex::to_string(e) << " at r=" << r;
        }
    }
    EXPECT_GT(compared, 1500);
}

TEST(Property, PrintParseRoundTrip) {
    TameGen gen(99);
    for (int t = 0; t < 300; ++t) {
        const auto e = gen.tree(1 + t % 6);
        const auto text = ex::to_string(e);
        EXPECT_EQ(ex::parse(text), e) << text;
        const auto d = ex::diff(e, 2);
        EXPECT_EQ(ex::parse(ex::to_string(d)), d) << ex::to_string(d);
    }
}

TEST(Print, Minimal) {
    EXPECT_EQ(ex::to_string(ex::parse(kProfileF)), kProfileF);
    EXPECT_EQ(ex::to_string(ex::parse("(r^2)^3")), "(r^2)^3");
    EXPECT_EQ(ex::to_string(ex::parse("r/(2*r)")), "r/(2*r)");
    EXPECT_EQ(ex::to_string(ex::parse("2.0*r")), "2.0*r");
    EXPECT_EQ(ex::to_string(ex::parse("r*(1/3)")), "r*(1/3)");
    EXPECT_EQ(ex::to_string(ex::parse("1e-20+r")), "1e-20+r");
}
