#include "bts/sheaf.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

namespace bts {
namespace {

const Window& window() {
  static const Window w = tree_window(3, 2);
  return w;
}

// Oracle: number of orbits of a permutation group, by union-find over the
// images of every listed element.
std::size_t orbit_count(std::size_t n, const std::vector<ModSL2>& elts, const std::function<std::size_t(const ModSL2&, std::size_t)>& act) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& g : elts)
    for (std::size_t y = 0; y < n; ++y) parent[find(y)] = find(act(g, y));
  std::size_t roots = 0;
  for (std::size_t y = 0; y < n; ++y) roots += find(y) == y;
  return roots;
}

// Level-2 test representation: permutations of P^1(Z/9), with points
// [x:1] (x in Z/9) and [1:3y] (y in Z/3).
std::size_t p1_mod9_index(std::uint64_t a, std::uint64_t b) {
  a %= 9;
  b %= 9;
  if (b % 3) {
    std::uint64_t inv = static_cast<std::uint64_t>(boost::integer::mod_inverse(static_cast<long long>(b), 9LL));
    return a * inv % 9;
  }
  std::uint64_t inv = static_cast<std::uint64_t>(boost::integer::mod_inverse(static_cast<long long>(a), 9LL));
  return 9 + (b * inv % 9) / 3;
}

std::size_t p1_mod9_act(const ModSL2& g, std::size_t y) {
  std::uint64_t a = y < 9 ? y : 1, b = y < 9 ? 1 : 3 * (y - 9);
  return p1_mod9_index(g[0] * a + g[1] * b, g[2] * a + g[3] * b);
}

SmoothRep p1_mod9() {
  auto act = [](const ModSL2& g) {
    Matrix m(12, 12);
    for (std::size_t y = 0; y < 12; ++y) m(p1_mod9_act(g, y), y) = 1;
    return m;
  };
  return {"p1-mod-9", 3, 12, 2, 1, act};
}

std::size_t p1_act(const ModSL2& g, std::size_t y) { return detail::p1_image(detail::mod_p(g, 3), y, 3); }

TEST(SmoothRep, LawsForPresetsAndDuals) {
  for (const auto& v : {trivial_rep(3), p1_functions(3), steinberg(3), steinberg(5), p1_mod9()}) {
    EXPECT_TRUE(rep_laws_check(v, 60, 1).ok) << v.name;
    EXPECT_TRUE(rep_laws_check(dual(v), 60, 2).ok) << v.name;
  }
  EXPECT_THROW(p1_functions(3).act(ExactSL2::upper(BigRational(1, 3))), std::domain_error);
  EXPECT_THROW(rep_by_name("adjoint", 3), std::invalid_argument);
}

TEST(SmoothRep, SteinbergSequenceIsEquivariantAndExact) {
  for (int p : {3, 5}) {
    SteinbergSequence s = steinberg_sequence(p);
    EXPECT_TRUE(equivariance_check(s.triv, s.p1, s.iota, 50, 3).ok);
    EXPECT_TRUE(equivariance_check(s.p1, s.st, s.pi, 50, 4).ok);
    EXPECT_TRUE((s.pi * s.iota).is_zero());
    EXPECT_EQ(rank(s.pi), static_cast<std::size_t>(p));
  }
  SteinbergSequence s = steinberg_sequence(3);
  Matrix delta0(4, 1);
  delta0(0, 0) = 1;
  EXPECT_FALSE(equivariance_check(s.triv, s.p1, delta0, 50, 3).ok);
}

TEST(Coinvariants, TrivialAndLevelOneExamples) {
  const TreeFacet x0 = TreeFacet::vertex(TreeVertex{});
  Quotient t = coinvariants(trivial_rep(3), x0, 1);
  EXPECT_EQ(t.proj, Matrix::identity(1));
  // U_{x0}^(1) reduces to the identity mod 3
  EXPECT_EQ(coinvariants(p1_functions(3), x0, 1).dim(), 4u);
  EXPECT_EQ(coinvariants(steinberg(3), x0, 1).dim(), 3u);
}

TEST(Coinvariants, MatchOrbitCountsOnTheWindow) {
  std::map<std::size_t, int> seen;
  for (const auto& f : window().facets()) {
    auto elts = enumerate_image(p1_functions(3), f, 1);
    std::size_t orbits = orbit_count(4, elts, p1_act);
    EXPECT_EQ(coinvariants(p1_functions(3), f, 1).dim(), orbits) << f.id();
    EXPECT_EQ(coinvariants(steinberg(3), f, 1).dim(), orbits - 1) << f.id();
    ++seen[orbits];
  }
  // both regimes occur: level-one facets and facets seeing a full unipotent
  EXPECT_TRUE(seen.count(4));
  EXPECT_TRUE(seen.count(2));
}

TEST(Coinvariants, GeneratorsAgreeWithEnumerationModNine) {
  SmoothRep v = p1_mod9();
  for (long e : {1L, 2L})
    for (const auto& f : window().facets()) {
      Quotient gen = coinvariants(v, f, e), all = coinvariants_enumerated(v, f, e);
      EXPECT_EQ(gen.dim(), all.dim()) << f.id();
      EXPECT_TRUE(detail::same_kernel(gen.proj, all.proj)) << f.id();
      EXPECT_EQ(gen.dim(), orbit_count(12, enumerate_image(v, f, e), p1_mod9_act)) << f.id();
    }
}

TEST(Coinvariants, OutsideTheActionRange) {
  // distance-3 vertices need lower root group elements with negative valuation at e = 1
  Window big = tree_window(3, 3);
  EXPECT_THROW(ss_sheaf(p1_functions(3), 1, big), std::domain_error);
  EXPECT_NO_THROW(ss_sheaf(p1_functions(3), 2, big));
}

TEST(SsSheaf, TrivialRepGivesTheConstantSheaf) {
  ConstructibleSheaf sh = ss_sheaf(trivial_rep(3), 1, window());
  for (std::size_t d : sh.system.dims) EXPECT_EQ(d, 1u);
  for (const auto& [key, m] : sh.system.face) EXPECT_EQ(m, Matrix::identity(1));
  std::vector<std::size_t> all(window().size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(sections(sh.system, all).dim(), 1u);
}

TEST(SsSheaf, LawsStalksAndConstancy) {
  for (const auto& v : {trivial_rep(3), p1_functions(3), steinberg(3), dual(p1_functions(3))})
    for (long e : {1L, 2L}) {
      ConstructibleSheaf sh = ss_sheaf(v, e, window());
      EXPECT_TRUE(laws_check(sh.system).ok) << v.name;
      CheckReport st = stalk_check(sh.system);
      EXPECT_TRUE(st.ok) << st.counterexample;
      for (const auto& r : stalk_coinvariant_check(v, e, sh)) EXPECT_TRUE(r.ok) << r.name << ": " << r.counterexample;
    }
}

TEST(SsSheaf, DimensionsGrowWithTheLevel) {
  ConstructibleSheaf one = ss_sheaf(p1_functions(3), 1, window()), two = ss_sheaf(p1_functions(3), 2, window());
  for (std::size_t i = 0; i < window().size(); ++i) EXPECT_LE(one.system.dims[i], two.system.dims[i]);
  for (std::size_t d : two.system.dims) EXPECT_EQ(d, 4u);
}

TEST(Sections, StarsDisjointUnionsAndGluing) {
  ConstructibleSheaf sh = ss_sheaf(p1_functions(3), 1, window());
  const auto& w = window();
  auto leaves = w.of_dimension(0);
  // two vertices at distance 4 have disjoint stars
  std::size_t a = w.index(TreeFacet::vertex(TreeVertex{-2, Rational(0)}));
  std::size_t b = w.index(TreeFacet::vertex(TreeVertex{2, Rational(0)}));
  EXPECT_EQ(sections(sh.system, w.star_union({a, b})).dim(), sh.system.dims[a] + sh.system.dims[b]);

  std::mt19937 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
  std::vector<std::vector<std::size_t>> covers = {{a, b}, leaves, {w.index(TreeFacet::vertex(TreeVertex{}))}};
  for (int t = 0; t < 12; ++t) covers.push_back({pick(rng), pick(rng), pick(rng)});
  for (const auto& c : covers) {
    CheckReport r = gluing_check(sh.system, c);
    EXPECT_TRUE(r.ok) << r.name << ": " << r.counterexample;
  }
}

TEST(Exactness, SteinbergSequenceAndControls) {
  SteinbergSequence s = steinberg_sequence(3);
  ExactnessReport good = exactness_check(s.triv, s.p1, s.st, s.iota, s.pi, 1, window());
  EXPECT_TRUE(good.check.ok) << good.check.counterexample;
  bool level_one_seen = false;
  for (const auto& row : good.rows) {
    EXPECT_EQ(row.d_sub + row.d_quot, row.d_mid);
    if (row.d_mid == 4) {
      level_one_seen = true;
      EXPECT_EQ(row.d_sub, 1u);
      EXPECT_EQ(row.d_quot, 3u);
    }
  }
  EXPECT_TRUE(level_one_seen);

  // split sequence St -> St + triv -> triv
  SmoothRep sum{"steinberg+trivial", 3, 4, 1, 0, [](const ModSL2& g) {
                  Matrix m(4, 4), st = steinberg(3).act_mod(g);
                  for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 3; ++j) m(i, j) = st(i, j);
                  m(3, 3) = 1;
                  return m;
                }};
  Matrix in(4, 3), out(1, 4);
  for (std::size_t i = 0; i < 3; ++i) in(i, i) = 1;
  out(0, 3) = 1;
  EXPECT_TRUE(exactness_check(s.st, sum, s.triv, in, out, 1, window()).check.ok);

  Matrix delta0(4, 1);
  delta0(0, 0) = 1;
  ExactnessReport bad = exactness_check(s.triv, s.p1, s.st, delta0, s.pi, 1, window());
  EXPECT_FALSE(bad.check.ok);
  EXPECT_NE(bad.check.counterexample.find("composition is not zero"), std::string::npos) << bad.check.counterexample;
}

TEST(Comparison, SquareCommutesInTheSmoothRange) {
  for (const auto& v : {trivial_rep(3), p1_functions(3), steinberg(3)})
    for (Rational rho : {Rational(1), Rational(3, 4)}) {
      ComparisonReport c = comparison_check(v, rho, 1, window());
      EXPECT_TRUE(c.square.ok) << c.square.counterexample;
      EXPECT_TRUE(c.iso.ok) << c.iso.counterexample;
      EXPECT_TRUE(laws_check(c.mr.system).ok);
    }
  ComparisonReport t = comparison_check(trivial_rep(3), Rational(1), 1, window());
  for (const auto& m : t.f) EXPECT_EQ(m, Matrix::identity(1));
}

TEST(Comparison, NaturalAlongTheSteinbergSequence) {
  SteinbergSequence s = steinberg_sequence(3);
  auto ct = comparison_check(s.triv, Rational(1), 1, window());
  auto cp = comparison_check(s.p1, Rational(1), 1, window());
  auto cs = comparison_check(s.st, Rational(1), 1, window());
  EXPECT_TRUE(comparison_naturality(ct, cp, s.iota, "iota").ok);
  EXPECT_TRUE(comparison_naturality(cp, cs, s.pi, "pi").ok);
}

TEST(Comparison, RejectsRadiiOutsideTheSmoothRange) {
  EXPECT_THROW(comparison_check(trivial_rep(3), Rational(1, 2), 1, window()), std::domain_error);
  EXPECT_THROW(comparison_check(trivial_rep(3), Rational(1, 3), 1, window()), std::domain_error);
  EXPECT_THROW(mr_system(trivial_rep(3), Rational(3, 2), 1, window()), std::domain_error);
}

TEST(Export, JsonAndDot) {
  ConstructibleSheaf sh = ss_sheaf(p1_functions(3), 1, window());
  nlohmann::json j = sh.system.to_json();
  EXPECT_EQ(j["facets"].size(), window().size());
  std::size_t proper = 0;
  for (std::size_t i = 0; i < window().size(); ++i) proper += window().faces(i).size() - 1;
  EXPECT_EQ(j["maps"].size(), proper);
  EXPECT_EQ(j["facets"][0]["type"], "vertex");
  std::string dot = sh.system.to_dot();
  EXPECT_EQ(dot.rfind("graph window {", 0), 0u);
  EXPECT_NE(dot.find("fillcolor="), std::string::npos);
  EXPECT_NE(sh.system.dimension_table().find("dim 4"), std::string::npos);
}

}  // namespace
}  // namespace bts
