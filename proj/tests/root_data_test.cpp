#include "bts/root_data.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bts {
namespace {

TEST(RootData, PresetsHaveExpectedShape) {
  auto a1 = RootDatum::preset("A1");
  auto a2 = RootDatum::preset("A2");
  EXPECT_EQ(a1.roots().size(), 2u);
  EXPECT_EQ(a2.roots().size(), 6u);
  EXPECT_EQ(a1.weyl_group().size(), 2u);
  EXPECT_EQ(a2.weyl_group().size(), 6u);
  EXPECT_EQ(a2.positive().size(), 3u);
  EXPECT_THROW(RootDatum::preset("E9"), std::invalid_argument);
}

TEST(RootData, PositiveSystemAndCorootPairing) {
  for (const char* key : {"A1", "A2"}) {
    auto d = RootDatum::preset(key);
    // Phi = Phi+ disjoint union -Phi+
    std::set<IntVec> all(d.roots().begin(), d.roots().end());
    std::set<IntVec> split;
    for (auto i : d.positive()) {
      IntVec neg = d.roots()[i];
      for (auto& c : neg) c = -c;
      split.insert(d.roots()[i]);
      split.insert(neg);
    }
    EXPECT_EQ(all, split);
    EXPECT_EQ(d.positive().size() * 2, d.roots().size());
    for (std::size_t i = 0; i < d.roots().size(); ++i) EXPECT_EQ(d.pairing(d.roots()[i], d.coroots()[i]), 2);
  }
}

TEST(RootData, WeylGroupPermutesRootsAndReflectionsAreInvolutions) {
  for (const char* key : {"A1", "A2"}) {
    auto d = RootDatum::preset(key);
    std::set<Weight> roots;
    for (const auto& r : d.roots()) roots.insert(d.root_weight(r));
    for (const auto& w : d.weyl_group()) {
      std::set<Weight> image;
      for (const auto& r : roots) image.insert(d.apply(w, r));
      EXPECT_EQ(image, roots);
    }
    // simple reflections square to the identity
    for (std::size_t i = 0; i < d.rank(); ++i) {
      const IntMatrix& s = d.weyl_group()[1 + i];
      Weight chi{std::vector<Rational>(d.rank(), Rational(0))};
      for (std::size_t j = 0; j < d.rank(); ++j) chi.coords[j] = Rational(static_cast<long long>(3 * j + 1), 7);
      EXPECT_EQ(d.apply(s, d.apply(s, chi)), chi);
    }
  }
}

TEST(RootData, RhoExamples) {
  auto a1 = RootDatum::preset("A1");
  Weight r1 = rho(a1);
  EXPECT_EQ(a1.evaluate(r1, a1.coroots()[a1.positive()[0]]), Rational(1));
  auto a2 = RootDatum::preset("A2");
  Weight r2 = rho(a2);
  // rho = omega_1 + omega_2
  EXPECT_EQ(r2.coords, (std::vector<Rational>{1, 1}));
  for (std::size_t i = 0; i < 2; ++i) {
    IntVec simple(2, 0);
    simple[i] = 1;
    EXPECT_EQ(a2.evaluate(r2, simple), Rational(1));
  }
  auto torus = RootDatum::preset("torus");
  EXPECT_TRUE(rho(torus).coords.empty());
}

TEST(RootData, DominanceAndRegularity) {
  auto a1 = RootDatum::preset("A1");
  Weight r = rho(a1);
  EXPECT_TRUE(is_dominant(r, a1));
  EXPECT_TRUE(is_regular(r, a1));
  Weight zero{{Rational(0)}};
  EXPECT_TRUE(is_dominant(zero, a1));
  EXPECT_FALSE(is_regular(zero, a1));
  Weight minus_one{{Rational(-1)}};
  EXPECT_FALSE(is_dominant(minus_one, a1));
  Weight half{{Rational(-1, 2)}};
  EXPECT_TRUE(is_dominant(half, a1));
}

TEST(RootData, WeylOrbits) {
  auto a1 = RootDatum::preset("A1");
  auto a2 = RootDatum::preset("A2");
  EXPECT_EQ(weyl_orbit(Weight{{Rational(0)}}, a1).size(), 1u);
  auto o1 = weyl_orbit(rho(a1), a1);
  EXPECT_EQ(o1, (std::set<Weight>{Weight{{Rational(1)}}, Weight{{Rational(-1)}}}));
  EXPECT_EQ(weyl_orbit(rho(a2), a2).size(), 6u);
}

TEST(RootData, RegularIffFullOrbit) {
  auto a2 = RootDatum::preset("A2");
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2);
  for (int i = 0; i < 50; ++i) {
    Weight chi{{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))}};
    auto orbit = weyl_orbit(chi, a2);
    EXPECT_EQ(is_regular(chi, a2), orbit.size() == a2.weyl_group().size());
    EXPECT_EQ(a2.weyl_group().size() % orbit.size(), 0u);
  }
}

TEST(RootData, JsonDump) {
  auto j = RootDatum::preset("A2").to_json();
  EXPECT_EQ(j["rank"], 2);
  EXPECT_EQ(j["roots"].size(), 6u);
  EXPECT_EQ(j["weyl_group"].size(), 6u);
}

}  // namespace
}  // namespace bts
