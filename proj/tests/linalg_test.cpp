#include "bts/linalg.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bts {
namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int spread = 3) {
  std::uniform_int_distribution<int> d(-spread, spread);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// Oracle: rank as the largest k with a nonzero k x k minor (Laplace expansion).
BigRational det(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  BigRational s = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Matrix minor(m.rows() - 1, m.cols() - 1);
    for (std::size_t i = 1; i < m.rows(); ++i)
      for (std::size_t k = 0, kk = 0; k < m.cols(); ++k)
        if (k != j) minor(i - 1, kk++) = m(i, k);
    BigRational t = m(0, j) * det(minor);
    s += j % 2 ? -t : t;
  }
  return s;
}

std::size_t rank_by_minors(const Matrix& m) {
  std::size_t best = 0;
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    bool found = false;
    for (unsigned rs = 0; rs < (1u << r) && !found; ++rs) {
      if (static_cast<std::size_t>(__builtin_popcount(rs)) != k) continue;
      for (unsigned cs = 0; cs < (1u << c) && !found; ++cs) {
        if (static_cast<std::size_t>(__builtin_popcount(cs)) != k) continue;
        Matrix sub(k, k);
        for (std::size_t i = 0, ii = 0; i < r; ++i) {
          if (!(rs >> i & 1)) continue;
          for (std::size_t j = 0, jj = 0; j < c; ++j)
            if (cs >> j & 1) sub(ii, jj++) = m(i, j);
          ++ii;
        }
        found = det(sub) != 0;
      }
    }
    if (found) best = k;
  }
  return best;
}

TEST(Linalg, RankAgreesWithMinors) {
  std::mt19937 rng(11);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + t % 4, c = 1 + (t / 4) % 5;
    Matrix m = random_matrix(rng, r, c, t % 3 == 0 ? 1 : 3);
    if (t % 5 == 0 && r > 1)  // force a dependent row
      for (std::size_t j = 0; j < c; ++j) m(r - 1, j) = 2 * m(0, j);
    EXPECT_EQ(rank(m), rank_by_minors(m)) << "trial " << t;
  }
}

TEST(Linalg, NullspaceAndSolve) {
  std::mt19937 rng(5);
  for (int t = 0; t < 40; ++t) {
    Matrix m = random_matrix(rng, 3, 6);
    Matrix n = nullspace(m);
    EXPECT_TRUE((m * n).is_zero());
    EXPECT_EQ(rank(n), n.cols());
    EXPECT_EQ(n.cols() + rank(m), 6u);

    Matrix x = random_matrix(rng, 6, 2);
    auto y = solve(m, m * x);
    ASSERT_TRUE(y.has_value());
    EXPECT_EQ(m * *y, m * x);
  }
  Matrix a = Matrix::from_rows({{1, 2}, {2, 4}});
  EXPECT_FALSE(solve(a, Matrix::from_rows({{1}, {0}})).has_value());
}

TEST(Linalg, QuotientByASpan) {
  std::mt19937 rng(8);
  for (int t = 0; t < 30; ++t) {
    Matrix w = random_matrix(rng, 5, t % 4);
    Quotient q = quotient(w, 5);
    EXPECT_EQ(q.dim(), 5 - rank(w));
    EXPECT_EQ(q.proj * q.section, Matrix::identity(q.dim()));
    if (w.cols()) {
      EXPECT_TRUE((q.proj * w).is_zero());
    }
  }
  Quotient all = quotient(Matrix::identity(3), 3);
  EXPECT_EQ(all.dim(), 0u);
}

TEST(Linalg, InducedMapExistsIffRelationsAreMapped) {
  // V = Q^3 / <e1>,  V' = Q^2 / <e1'>,  f sends e1 to e1' or to e2'
  Quotient a = quotient(Matrix::from_rows({{1}, {0}, {0}}), 3);
  Quotient b = quotient(Matrix::from_rows({{1}, {0}}), 2);
  Matrix good = Matrix::from_rows({{1, 0, 1}, {0, 1, 1}});
  Matrix bad = Matrix::from_rows({{0, 0, 1}, {1, 1, 1}});
  auto m = induced_map(a, b, good);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(*m * a.proj, b.proj * good);
  EXPECT_FALSE(induced_map(a, b, bad).has_value());
}

}  // namespace
}  // namespace bts
