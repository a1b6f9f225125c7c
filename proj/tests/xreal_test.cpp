#include "bts/xreal.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bts {
namespace {

XReal random_xreal(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 9), num(-12, 12), den(1, 4);
  int k = kind(rng);
  Rational q(num(rng), den(rng));
  if (k == 0) return XReal::infinity();
  if (k < 5) return XReal::plus(q);
  return XReal(q);
}

TEST(XReal, Examples) {
  EXPECT_EQ(XReal::plus(0) + XReal(1), XReal::plus(1));
  EXPECT_LT(XReal(0), XReal::plus(0));
  EXPECT_LT(XReal::plus(0), XReal(Rational(1, 100)));
  const long e = 4;
  EXPECT_TRUE((XReal::plus(0) + XReal(e)).satisfied_by(e + 1));
  EXPECT_FALSE((XReal::plus(0) + XReal(e)).satisfied_by(e));
  EXPECT_TRUE(XReal(e).satisfied_by(e));
  EXPECT_FALSE(XReal::infinity().satisfied_by(1000));
  EXPECT_TRUE(XReal::infinity().satisfied_by(kInfiniteValuation));
}

TEST(XReal, MinIntegerAndMaxShift) {
  EXPECT_EQ(XReal::plus(0).min_integer(), 1);
  EXPECT_EQ(XReal(Rational(1, 2)).min_integer(), 1);
  EXPECT_EQ(XReal::plus(Rational(1, 2)).min_integer(), 1);
  EXPECT_EQ(XReal(-2).min_integer(), -2);
  // 27 = 3^3 lies in the level 0+ + n exactly for n <= 2
  EXPECT_EQ(XReal::plus(0).max_shift(3), 2);
  EXPECT_EQ(XReal(1).max_shift(3), 2);
  EXPECT_EQ(XReal(0).max_shift(3), 3);
}

TEST(XReal, MonoidLawsAndTotalOrder) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    XReal a = random_xreal(rng), b = random_xreal(rng), c = random_xreal(rng);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + XReal(0), a);
    if (a <= b) {
      EXPECT_LE(a + c, b + c);
    }
    // totality and transitivity
    EXPECT_TRUE(a < b || a == b || b < a);
    if (a <= b && b <= c) {
      EXPECT_LE(a, c);
    }
  }
}

TEST(XReal, SatisfiedByAgreesWithOrder) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    XReal a = random_xreal(rng);
    for (long v = -4; v <= 4; ++v) EXPECT_EQ(a.satisfied_by(v), XReal(v) >= a);
  }
}

TEST(XReal, Rendering) {
  for (const char* s : {"3", "-1/2", "0+", "7/3+", "inf"}) EXPECT_EQ(XReal::parse(s).to_string(), s);
}

}  // namespace
}  // namespace bts
