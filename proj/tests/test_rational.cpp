#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "resdn/rational.hpp"

using resdn::Rational;

TEST(Rational, NormalizesSignAndGcd) {
    Rational r(6, -8);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, ParsesDecimalsExactly) {
    EXPECT_EQ(Rational::parse("7.79"), Rational(779, 100));
    EXPECT_EQ(Rational::parse("0.31"), Rational(31, 100));
    EXPECT_EQ(Rational::parse("-2.5"), Rational(-5, 2));
    EXPECT_EQ(Rational::parse("1e-3"), Rational(1, 1000));
    EXPECT_EQ(Rational::parse("3/9"), Rational(1, 3));
    EXPECT_EQ(Rational::parse("100"), Rational(100));
}

TEST(Rational, RejectsGarbage) {
    for (const char* bad : {"", "abc", "1.2.3", "--1", "1/0", "0x10", " "}) {
        EXPECT_THROW((void)Rational::parse(bad), std::invalid_argument) << bad;
    }
}

TEST(Rational, ArithmeticAndOrder) {
    Rational a(1, 3);
    Rational b(1, 6);
    EXPECT_EQ(a + b, Rational(1, 2));
    EXPECT_EQ(a - b, Rational(1, 6));
    EXPECT_EQ(a * b, Rational(1, 18));
    EXPECT_EQ(a / b, Rational(2));
    EXPECT_LT(b, a);
    EXPECT_TRUE(Rational(0).is_zero());
    EXPECT_THROW(a / Rational(0), std::domain_error);
}

TEST(Rational, OverflowIsReported) {
    Rational big(INT64_MAX / 2 + 1);
    EXPECT_THROW(big * Rational(4), std::overflow_error);
}

// a/b + c/d == (ad + bc)/bd checked against long double for small values
TEST(Rational, RandomSumsMatchFloatingPoint) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(-1000, 1000);
    std::uniform_int_distribution<int> den(1, 1000);
    for (int i = 0; i < 1000; ++i) {
        int a = num(rng), b = den(rng), c = num(rng), d = den(rng);
        Rational s = Rational(a, b) + Rational(c, d);
        long double expect = static_cast<long double>(a) / b + static_cast<long double>(c) / d;
        EXPECT_NEAR(static_cast<double>(expect), s.to_double(), 1e-12);
        EXPECT_EQ(s, Rational(static_cast<std::int64_t>(a) * d + static_cast<std::int64_t>(c) * b,
                              static_cast<std::int64_t>(b) * d));
    }
}
