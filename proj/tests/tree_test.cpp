#include "bts/complex.hpp"
#include "bts/tree.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bts {
namespace {

// Oracle: some p^k L(w) sits inside L(v) with index p.  Checked on matrices:
// M_v^-1 p^k M_w integral with determinant of valuation 1.
bool adjacent_by_lattices(int p, const TreeVertex& v, const TreeVertex& w) {
  Mat2<BigRational> mv = lattice_matrix(p, v), mw = lattice_matrix(p, w);
  BigRational dv = mv.det();
  Mat2<BigRational> inv = Mat2<BigRational>::of(mv.d() / dv, -mv.b() / dv, -mv.c() / dv, mv.a() / dv);
  for (long k = -6; k <= 6; ++k) {
    Mat2<BigRational> q = inv * mw;
    BigRational s = pow_p(p, k);
    bool integral = true;
    for (auto& x : q.e) {
      x *= s;
      if (x != 0 && valuation_of(x, p) < 0) integral = false;
    }
    if (integral && valuation_of(q.det(), p) == 1) return true;
  }
  return false;
}

TEST(Tree, ReduceModPower) {
  EXPECT_EQ(reduce_mod_power(BigRational(10), 3, 2), Rational(1));
  EXPECT_EQ(reduce_mod_power(BigRational(-1), 3, 1), Rational(2));
  EXPECT_EQ(reduce_mod_power(BigRational(1, 2), 3, 1), Rational(2));   // 2 * 2 = 4 = 1 mod 3
  EXPECT_EQ(reduce_mod_power(BigRational(5, 3), 3, 0), Rational(2, 3));
  EXPECT_EQ(reduce_mod_power(BigRational(5, 3), 3, -1), Rational(0));
  EXPECT_EQ(reduce_mod_power(BigRational(7, 9), 3, -1), Rational(1, 9));
}

TEST(Tree, NeighborsAreTheIndexPSublattices) {
  for (int p : {3, 5}) {
    TreeVertex x0;
    auto nb = tree_neighbors(p, x0);
    EXPECT_EQ(nb.size(), static_cast<std::size_t>(p + 1));
    EXPECT_EQ(std::set<TreeVertex>(nb.begin(), nb.end()).size(), nb.size());
    for (const auto& f : tree_ball(p, 2)) {
      if (!f.is_vertex()) continue;
      const TreeVertex& v = f.vertices[0];
      for (const auto& w : tree_neighbors(p, v)) {
        EXPECT_TRUE(adjacent_by_lattices(p, v, w)) << v.label(p) << " " << w.label(p);
        auto back = tree_neighbors(p, w);
        EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
      }
    }
  }
}

TEST(Tree, BallSizes) {
  auto count = [](const std::vector<TreeFacet>& fs, std::size_t dim) {
    return std::count_if(fs.begin(), fs.end(), [&](const TreeFacet& f) { return f.dimension() == dim; });
  };
  EXPECT_EQ(tree_ball(3, 0).size(), 1u);
  auto b1 = tree_ball(3, 1);
  EXPECT_EQ(count(b1, 0), 5);
  EXPECT_EQ(count(b1, 1), 4);
  auto b2 = tree_ball(3, 2);
  EXPECT_EQ(count(b2, 0), 1 + 4 + 12);
  EXPECT_EQ(count(b2, 1), 16);
  EXPECT_EQ(count(tree_ball(5, 2), 0), 1 + 6 + 30);
}

Mat2<BigRational> random_gl2(std::mt19937_64& rng, int p) {
  std::uniform_int_distribution<int> num(-20, 20), pw(-2, 2);
  for (;;) {
    Mat2<BigRational> m;
    for (auto& x : m.e) x = BigRational(num(rng)) * pow_p(p, pw(rng));
    if (m.det() != 0) return m;
  }
}

TEST(Tree, ActionIsAGroupActionPreservingAdjacency) {
  const int p = 3;
  std::mt19937_64 rng(11);
  auto ball = tree_ball(p, 2);
  for (int i = 0; i < 60; ++i) {
    auto g = random_gl2(rng, p), h = random_gl2(rng, p);
    for (const auto& f : ball) {
      TreeFacet gh = act(p, g * h, f);
      EXPECT_EQ(gh, act(p, g, act(p, h, f)));
      if (!f.is_vertex()) {
        EXPECT_TRUE(adjacent_by_lattices(p, gh.vertices[0], gh.vertices[1]));
      }
    }
  }
  // SL2(Z_p) fixes x0 and diag(p, 1/p) translates along the apartment by two steps
  TreeVertex x0;
  EXPECT_EQ(act(p, Mat2<BigRational>::of(2, 7, 1, 4), x0), x0);
  EXPECT_EQ(act(p, Mat2<BigRational>::of(3, 0, 0, BigRational(1, 3)), x0), (TreeVertex{2, Rational(0)}));
}

TEST(Tree, StandardizeLandsInTheApartment) {
  const int p = 3;
  for (const auto& f : tree_ball(p, 3)) {
    Standardized st = standardize(p, f);
    TreeFacet moved = act(p, st.h.matrix(), f);
    EXPECT_EQ(moved, tree_facet_of(st.facet));
    for (const auto& v : moved.vertices) EXPECT_EQ(v.b, Rational(0));
  }
  Standardized e = standardize(p, TreeFacet::edge(TreeVertex{0, Rational(0)}, TreeVertex{-1, Rational(0)}));
  EXPECT_EQ(e.facet, (ApartmentFacet({{Rational(0)}, {Rational(1)}})));
}

TEST(Complex, StarOfX0) {
  Complex<TreeFacet> cx(tree_ball(3, 2));
  std::size_t x0 = cx.index(TreeFacet::vertex(TreeVertex{}));
  EXPECT_EQ(cx.star(x0).size(), 1u + 4u);
  for (auto j : cx.star(x0)) EXPECT_TRUE(cx[j] == cx[x0] || cx[j].dimension() == 1);
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx[i].dimension() == 1) {
      EXPECT_EQ(cx.faces(i).size(), 3u);
    }
  }
}

TEST(Complex, DotExportIsWellFormed) {
  Complex<TreeFacet> cx(tree_ball(3, 1));
  std::string dot = to_dot<TreeFacet>(cx, [&](std::size_t i) { return cx[i].label(3); });
  EXPECT_EQ(dot.rfind("graph window {", 0), 0u);
  EXPECT_EQ(dot.substr(dot.size() - 2), "}\n");
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '\n'), 2 + 5 + 4 + 1);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '{'), std::count(dot.begin(), dot.end(), '}'));
  EXPECT_NE(dot.find("[[3^0, 0], [0, 1]]"), std::string::npos);
}

}  // namespace
}  // namespace bts
