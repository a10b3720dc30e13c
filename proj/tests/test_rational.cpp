#include <gtest/gtest.h>

#include <ricci_forge/rational.hpp>

using ricci_forge::Rational;

TEST(Rational, NormalizesSignAndGcd) {
    Rational a(6, -4);
    EXPECT_EQ(a.num(), -3);
    EXPECT_EQ(a.den(), 2);
    EXPECT_EQ(a.str(), "-3/2");
    EXPECT_EQ(Rational(0, -5).den(), 1);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(1, 2) - Rational(1, 3), Rational(1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
    EXPECT_EQ(Rational(2, 3).pow(-2), Rational(9, 4));
    EXPECT_EQ(Rational(-7, 2).floor(), -4);
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
}

TEST(Rational, OverflowAndZeroDivisionThrow) {
    const Rational big(INT64_MAX);
    EXPECT_THROW(big + Rational(1), std::overflow_error);
    EXPECT_THROW(big * big, std::overflow_error);
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, ParsesLiterals) {
    EXPECT_EQ(Rational::parse("-1/4"), Rational(-1, 4));
    EXPECT_EQ(Rational::parse("1.25"), Rational(5, 4));
    EXPECT_EQ(Rational::parse("2e-3"), Rational(1, 500));
    EXPECT_EQ(Rational::parse("3e+2"), Rational(300));
    EXPECT_THROW(Rational::parse("x"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("1e"), std::invalid_argument);
    EXPECT_EQ(ricci_forge::rational_from_double(0.1), Rational(1, 10));
}
