#include "bts/mahler.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bts {
namespace {

const PadicContext ctx3(3, 20);


// Polynomial oracle: evaluates sum a_n x^n exactly.
BigRational poly_eval(const std::vector<BigRational>& a, const BigRational& x) {
  BigRational acc = 0;
  for (std::size_t n = a.size(); n-- > 0;) acc = acc * x + a[n];
  return acc;
}

TEST(MultiIndices, DegreeThenLexOrder) {
  auto idx = multi_indices(2, 2);
  std::vector<MultiIndex> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(idx, want);
  EXPECT_EQ(multi_indices(3, 4).size(), 35u);  // C(4 + 3, 3)
  IndexTable t(2, 3);
  EXPECT_EQ(*t.find({1, 1}), 4u);
  EXPECT_FALSE(t.find({2, 2}));
}

TEST(Mahler, Examples) {
  auto sq = mahler_coeffs(ctx3, 1, 6, [](const MultiIndex& a) { return BigRational(a[0] * a[0]); });
  std::vector<long long> want{0, 1, 2, 0, 0, 0, 0};
  for (long k = 0; k <= 6; ++k) EXPECT_EQ(sq.coeff({k}), ctx3.integer(want[static_cast<std::size_t>(k)])) << k;

  auto one = mahler_coeffs(ctx3, 1, 4, [](const MultiIndex&) { return BigRational(1); });
  EXPECT_EQ(one.coeff({0}), ctx3.one());
  for (long k = 1; k <= 4; ++k) EXPECT_TRUE(one.coeff({k}).is_zero());

  auto c3 = mahler_coeffs(ctx3, 1, 6, [](const MultiIndex& a) {
    BigInt x = a[0];
    return BigRational(x * (x - 1) * (x - 2) / 6);
  });
  for (long k = 0; k <= 6; ++k) EXPECT_EQ(c3.coeff({k}), ctx3.integer(k == 3 ? 1 : 0)) << k;
  EXPECT_EQ(sq.tail.kind, TailBound::Kind::Unknown);
}

TEST(Mahler, EvaluationAgainstRationalOracle) {
  auto sq = mahler_coeffs(ctx3, 1, 4, [](const MultiIndex& a) { return BigRational(a[0] * a[0]); });
  EXPECT_EQ(eval_mahler(sq, {ctx3.integer(4)}), ctx3.integer(16));
  EXPECT_EQ(eval_mahler(sq, {ctx3.zero()}), sq.coeff({0}));
  // a non-integer point of Z_p
  Padic x = ctx3.rational(BigRational(7, 2));
  EXPECT_EQ(eval_mahler(sq, {x}), ctx3.rational(BigRational(49, 4)));
}

TEST(Mahler, RoundTripTwoVariablePolynomial) {
  // f(x, y) = 2x^2 y - 3xy + y^3 - 5 has degree 3
  auto f = [](const BigRational& x, const BigRational& y) { return 2 * x * x * y - 3 * x * y + y * y * y - 5; };
  auto s = mahler_coeffs(ctx3, 2, 5, [&](const MultiIndex& a) { return f(a[0], a[1]); });
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    if (degree(s.index[i]) > 3) {
      EXPECT_TRUE(s.coeffs[i].is_zero());
    }
  }
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-500, 500), den(1, 40);
  for (int i = 0; i < 50; ++i) {
    int d1 = den(rng), d2 = den(rng);
    if (d1 % 3 == 0) ++d1;
    if (d2 % 3 == 0) ++d2;
    BigRational x(num(rng), d1), y(num(rng), d2);
    EXPECT_EQ(eval_mahler(s, {ctx3.rational(x), ctx3.rational(y)}), ctx3.rational(f(x, y)));
  }
}

TEST(Mahler, PadicSamplesMatchRationalSamples) {
  auto r = mahler_coeffs(ctx3, 1, 5, [](const MultiIndex& a) { return BigRational(a[0] * a[0] * a[0] + 1, 4); });
  auto q = mahler_coeffs_padic(ctx3, 1, 5, [](const MultiIndex& a) {
    return ctx3.rational(BigRational(a[0] * a[0] * a[0] + 1, 4));
  });
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) EXPECT_EQ(r.coeffs[i], q.coeffs[i]);
}

TEST(Stirling, SmallValues) {
  for (long n = 1; n <= 10; ++n) {
    EXPECT_EQ(stirling(n, n), 1);
    EXPECT_EQ(stirling(n, 1), 1);
    EXPECT_EQ(stirling(n, 0), 0);
  }
  EXPECT_EQ(stirling(0, 0), 1);
  EXPECT_EQ(stirling(3, 2), 3);
  EXPECT_EQ(stirling(5, 3), 25);
  EXPECT_EQ(stirling(4, 6), 0);
}

TEST(Stirling, PowerIdentitySymbolically) {
  // x^n = sum_k S(n,k) (x)_k as integer polynomials
  for (long n = 0; n <= 12; ++n) {
    std::vector<BigInt> sum(static_cast<std::size_t>(n) + 1, 0);
    for (long k = 0; k <= n; ++k) {
      auto ff = falling_factorial(k);
      for (std::size_t i = 0; i < ff.size(); ++i) sum[i] += stirling(n, k) * ff[i];
    }
    for (long i = 0; i <= n; ++i) EXPECT_EQ(sum[static_cast<std::size_t>(i)], i == n ? 1 : 0) << n << " " << i;
  }
}

TEST(PowerToMahler, AgreesWithFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-30, 30);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigRational> a;
    for (int n = 0; n <= 7; ++n) a.push_back(BigRational(num(rng), n % 3 == 0 ? 1 : 2));
    auto via_stirling = power_to_mahler(ctx3, PowerSeries{a, TailBound::zero()}, 9);
    auto via_samples = mahler_coeffs(ctx3, 1, 9, [&](const MultiIndex& m) { return poly_eval(a, m[0]); });
    for (std::size_t k = 0; k < via_samples.coeffs.size(); ++k) EXPECT_EQ(via_stirling.coeffs[k], via_samples.coeffs[k]);
    EXPECT_TRUE(via_stirling.tail.exact());
  }
  auto x = power_to_mahler_exact({0, 1}, 3);
  EXPECT_EQ(x[1], 1);
  auto x2 = power_to_mahler_exact({0, 0, 1}, 3);
  EXPECT_EQ(x2[1], 1);
  EXPECT_EQ(x2[2], 2);
}

TEST(PowerToMahler, TailBoundsAreValid) {
  // Truncated polynomial: the tail beyond the order must bound the dropped c_k.
  std::vector<BigRational> a;
  for (long n = 0; n <= 12; ++n) a.push_back(BigRational(ipow(3, n)));
  auto full = power_to_mahler_exact(a, 12);
  auto cut = power_to_mahler(ctx3, PowerSeries{a, TailBound::zero()}, 6);
  ASSERT_EQ(cut.tail.kind, TailBound::Kind::Affine);
  for (long k = 7; k <= 12; ++k)
    EXPECT_GE(Rational(valuation_of(full[static_cast<std::size_t>(k)], 3)), cut.tail.offset + cut.tail.slope * Rational(k));

  // An infinite series a_n = 3^n: retained coefficients carry the truncation error.
  auto inf = power_to_mahler(ctx3, PowerSeries{std::vector<BigRational>(a.begin(), a.begin() + 8), TailBound::affine(0, 1)}, 5);
  for (long k = 0; k <= 5; ++k) {
    const Padic& c = inf.coeffs[static_cast<std::size_t>(k)];
    EXPECT_LE(c.abs_precision(), 8);
    // known digits agree with the longer truncation
    EXPECT_EQ(c, ctx3.rational(full[static_cast<std::size_t>(k)]));
  }
  EXPECT_THROW(power_to_mahler(ctx3, PowerSeries{a, TailBound::unknown()}, 3), std::invalid_argument);
}

TEST(DecayCheck, PolynomialAndNegativeControl) {
  // a polynomial has finitely many c_k, so some constant c always works
  auto c = power_to_mahler_exact({1, -2, 5, 7}, 10);
  EXPECT_TRUE(decay_check(3, c, Rational(4), Rational(1)).ok);

  // c_k = 3^(k + v_3(k!)) satisfies v >= k(1/2 + 1/2) with rho = 1/2
  std::vector<BigRational> good;
  for (long k = 0; k <= 30; ++k) good.push_back(BigRational(ipow(3, k + factorial_valuation(k, 3))));
  auto ok = decay_check(3, good, Rational(0), Rational(1, 2));
  EXPECT_TRUE(ok.ok);
  EXPECT_EQ(ok.checked, 31);

  auto bad = good;
  bad[5] /= BigRational(ipow(3, 3));
  auto r = decay_check(3, bad, Rational(0), Rational(1, 2));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.first_violation, 5);
}

TEST(DecayCheck, PrecisionLimitedCoefficientThrows) {
  MahlerSeries s{3, IndexTable(1, 1), {ctx3.one(), Padic::zero_to(3, 20, 4)}, TailBound::zero()};
  EXPECT_THROW(decay_check(s, Rational(0), Rational(1)), PrecisionError);
}

TEST(Mahler, JsonShape) {
  auto s = mahler_coeffs(ctx3, 1, 2, [](const MultiIndex& a) { return BigRational(a[0]); });
  auto j = to_json(s);
  EXPECT_EQ(j["order"], 2);
  EXPECT_EQ(j["coeffs"].size(), 3u);
  EXPECT_EQ(j["tail"], "unknown");
}

}  // namespace
}  // namespace bts
