#include "bts/finite_group.hpp"

#include <gtest/gtest.h>

namespace bts {
namespace {

const TreeFacet x0 = TreeFacet::vertex(TreeVertex{});
const TreeFacet edge01 = TreeFacet::edge(TreeVertex{0, Rational(0)}, TreeVertex{-1, Rational(0)});

// Oracle: every matrix mod p^m with the level constraints on its entries and det 1.
KeySet enumerate_level(int p, long e, long m, bool edge) {
  const std::uint32_t mod = static_cast<std::uint32_t>(detail::pow_u64(p, m));
  const std::uint32_t diag = static_cast<std::uint32_t>(detail::pow_u64(p, e + 1));
  const std::uint32_t up = static_cast<std::uint32_t>(detail::pow_u64(p, edge ? e : e + 1));
  const std::uint32_t lo = static_cast<std::uint32_t>(detail::pow_u64(p, e + 1));
  KeySet out;
  for (std::uint32_t a = 1; a < mod; a += diag)
    for (std::uint32_t b = 0; b < mod; b += up)
      for (std::uint32_t c = 0; c < mod; c += lo)
        for (std::uint32_t d = 1; d < mod; d += diag)
          if ((static_cast<std::uint64_t>(a) * d + mod - (static_cast<std::uint64_t>(b) * c) % mod) % mod == 1)
            out.insert(ModSL2(mod, a, b, c, d).key());
  return out;
}

TEST(ModSL2, ReductionAndGroupLaws) {
  ExactSL2 g(Mat2<BigRational>::of(BigRational(1, 2), 3, BigRational(-1, 2), -1));
  ModSL2 r = ModSL2::reduce(g, 3, 2);
  EXPECT_EQ(r[0], 5u);  // 1/2 = 5 mod 9
  EXPECT_EQ(r * r.inverse(), ModSL2::identity(9));
  EXPECT_EQ(ModSL2::reduce(g * g, 3, 2), r * r);
  EXPECT_EQ(ModSL2::from_key(9, r.key()), r);
  EXPECT_THROW(ModSL2::reduce(ExactSL2::upper(BigRational(1, 3)), 3, 2), std::invalid_argument);
}

TEST(LevelImage, MatchesDirectEnumeration) {
  for (long e : {1L, 2L}) {
    EXPECT_EQ(level_image(3, x0, e, 4), enumerate_level(3, e, 4, false));
    EXPECT_EQ(level_image(3, edge01, e, 4), enumerate_level(3, e, 4, true));
  }
  // |U^(e) mod p^m| = p^(3(m - e - 1)) at a vertex
  EXPECT_EQ(level_image(3, x0, 2, 6).size(), 19683u);
}

TEST(LowerPSeries, VertexLevelTwoModulus3To6) {
  auto r = lower_p_series_check(3, x0, 2, 6);
  EXPECT_TRUE(r.equal);
  EXPECT_TRUE(r.normal);
  EXPECT_EQ(r.index_log, 3);
  EXPECT_EQ(r.order_h, 729u);
}

TEST(LowerPSeries, EdgeGroupAndOtherPrimes) {
  auto r = lower_p_series_check(3, edge01, 2, 6);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.index_log, 3);
  EXPECT_TRUE(lower_p_series_check(5, x0, 2, 4).ok());
  EXPECT_THROW(lower_p_series_check(3, x0, 1, 6), std::invalid_argument);
}

TEST(LowerPSeries, ImagesShrinkToTheIdentity) {
  std::size_t last = level_image(3, x0, 0, 5).size();
  for (long e = 1; e <= 4; ++e) {
    std::size_t now = level_image(3, x0, e, 5).size();
    EXPECT_LT(now, last);
    last = now;
  }
  EXPECT_EQ(last, 1u);
}

TEST(LowerPSeries, ProbeUniformLevel) {
  long e_uni = probe_e_uni(3, x0, 3, 5);
  EXPECT_GE(e_uni, 0);
  EXPECT_LE(e_uni, 2);
}

}  // namespace
}  // namespace bts
