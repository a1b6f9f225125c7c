#pragma once

// Filtration subgroups U_F^(e) of SL2(Q_p) and their p-valuations.
//
// For a facet F of the standard apartment the group is
//   { u-(c) t(A) u+(a) :  v(c) >= f*_F(-alpha) + e,  v(A - 1) >= e + 1,  v(a) >= f*_F(alpha) + e },
// with u+(a) = [[1,a],[0,1]], u-(c) = [[1,0],[c,1]], t(A) = diag(A, 1/A).
// Facets elsewhere in the tree are moved into the apartment by standardize().

#include "bts/apartment.hpp"
#include "bts/complex.hpp"
#include "bts/sl2.hpp"
#include "bts/tree.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bts {

struct FiltrationGroupSpec {
  ApartmentFacet facet;  // in the A1 apartment
  long e = 0;
  XReal upper;  // level for the root group of alpha (upper triangular)
  XReal lower;  // level for -alpha
  long torus = 1;  // v(A - 1) >= torus

  nlohmann::json to_json() const {
    return {{"facet", facet.label()}, {"e", e}, {"upper", upper.to_string()}, {"lower", lower.to_string()},
            {"torus", "v(t-1) >= " + std::to_string(torus)}};
  }
};

inline FiltrationGroupSpec filtration_spec(const ApartmentFacet& f, long e) {
  if (e < 0) throw std::invalid_argument("level e must be >= 0");
  static const Apartment a1(RootDatum::preset("A1"));
  ConcaveFunction star = star_concave(a1, f);
  const auto& d = a1.datum();
  XReal shift(static_cast<long long>(e));
  return {f, e, star[d.index_of_root({1})] + shift, star[d.index_of_root({-1})] + shift, e + 1};
}

template <class K>
struct Factors {
  K c, t, a;  // g = u-(c) t(t) u+(a)

  SL2<K> product() const { return SL2<K>::lower(c) * SL2<K>::torus(t) * SL2<K>::upper(a); }
};

template <class K>
struct FactorResult {
  bool member = false;
  std::optional<Factors<K>> factors;  // present whenever the top-left entry is invertible
  std::string violated;               // first failed constraint; empty for members

  explicit operator bool() const { return member; }
};

/// The root-space decomposition of g against a facet of the standard apartment.
template <class K>
FactorResult<K> root_space_factor(int p, const SL2<K>& g, const FiltrationGroupSpec& spec) {
  using T = scalar_traits<K>;
  FactorResult<K> out;
  const K& A = g[0];
  if (T::is_zero(A)) {
    out.violated = "top-left entry is not invertible";
    return out;
  }
  Factors<K> f{g[2] / A, A, g[1] / A};
  out.factors = f;
  if (!T::meets(f.c, p, spec.lower)) {
    out.violated = "v(c) >= " + spec.lower.to_string() + " (lower root group)";
  } else if (!T::meets(A - T::one_like(A), p, XReal(static_cast<long long>(spec.torus)))) {
    out.violated = "v(t - 1) >= " + std::to_string(spec.torus) + " (torus)";
  } else if (!T::meets(f.a, p, spec.upper)) {
    out.violated = "v(a) >= " + spec.upper.to_string() + " (upper root group)";
  } else {
    out.member = true;
  }
  return out;
}

template <class K>
SL2<K> lift(const ExactSL2& h, const K& like) {
  using T = scalar_traits<K>;
  return SL2<K>(Mat2<K>::of(T::from_rational(like, h[0]), T::from_rational(like, h[1]), T::from_rational(like, h[2]),
                            T::from_rational(like, h[3])));
}

/// g in U_F^(e) for any tree facet, decided by h g h^-1 in U_{hF}^(e).
template <class K>
FactorResult<K> member_detail(int p, const SL2<K>& g, const TreeFacet& f, long e) {
  Standardized st = standardize(p, f);
  SL2<K> h = lift(st.h, g[0]);
  return root_space_factor(p, g.conjugate_by(h), filtration_spec(st.facet, e));
}

template <class K>
bool membership(int p, const SL2<K>& g, const TreeFacet& f, long e) {
  return member_detail(p, g, f, e).member;
}

struct Omega {
  long omega = 0;        // kInfiniteValuation for g = 1
  long omega_ring = 0;   // omega - (e - 1)

  bool infinite() const { return omega == kInfiniteValuation; }
  std::string to_string() const { return infinite() ? "inf" : std::to_string(omega); }
  std::string ring_string() const { return infinite() ? "inf" : std::to_string(omega_ring); }
};

/// omega_F^(e)(g) = sup{n >= 0 : g in U_F^(n)}, from the factor valuations.
template <class K>
Omega omega(int p, const SL2<K>& g, const TreeFacet& f, long e) {
  using T = scalar_traits<K>;
  if (e < 2) throw std::invalid_argument("omega needs e >= 2");
  Standardized st = standardize(p, f);
  FiltrationGroupSpec base = filtration_spec(st.facet, 0);
  FactorResult<K> r = root_space_factor(p, g.conjugate_by(lift(st.h, g[0])), filtration_spec(st.facet, e));
  if (!r.member) throw std::invalid_argument("element is not in U_F^(" + std::to_string(e) + "): " + r.violated);
  const Factors<K>& fa = *r.factors;
  auto val = [&](const K& x) { return T::valuation(x, p); };
  long n = base.upper.max_shift(val(fa.a));
  n = std::min(n, base.lower.max_shift(val(fa.c)));
  long vt = val(fa.t - T::one_like(fa.t));
  n = std::min(n, vt == kInfiniteValuation ? kInfiniteValuation : vt - 1);
  return {n, n == kInfiniteValuation ? n : n - (e - 1)};
}

/// Ordered basis u-(p^l-), t(1 + p^(e+1)), u+(p^l+) of U_F^(e) for F in the apartment.
inline std::vector<ExactSL2> ordered_basis(int p, const FiltrationGroupSpec& spec) {
  return {ExactSL2::lower(pow_p(p, spec.lower.min_integer())), ExactSL2::torus(1 + pow_p(p, spec.torus)),
          ExactSL2::upper(pow_p(p, spec.upper.min_integer()))};
}

/// Ordered basis of U_F^(e) for any tree facet (conjugated back from the apartment).
inline std::vector<ExactSL2> ordered_basis(int p, const TreeFacet& f, long e) {
  Standardized st = standardize(p, f);
  std::vector<ExactSL2> out;
  for (const auto& b : ordered_basis(p, filtration_spec(st.facet, e))) out.push_back(b.conjugate_by(st.h.inverse()));
  return out;
}

/// Random p-adic integer of valuation >= 0 as a small rational with denominator prime to p.
template <class Rng>
BigRational random_zp(Rng& rng, int p) {
  std::uniform_int_distribution<long long> num(-200, 200), den(1, 12);
  long long d = den(rng);
  while (d % p == 0) d = den(rng);
  return BigRational(num(rng), d);
}

/// Random element of U_F^(e): a product of `length` random factors u-(c) t(A) u+(a)
/// with every factor at its level, so membership holds by construction.
template <class Rng>
ExactSL2 random_member(Rng& rng, int p, const TreeFacet& f, long e, int length = 2) {
  Standardized st = standardize(p, f);
  FiltrationGroupSpec spec = filtration_spec(st.facet, e);
  BigRational lo = pow_p(p, spec.lower.min_integer()), hi = pow_p(p, spec.upper.min_integer()),
              tp = pow_p(p, spec.torus);
  std::uniform_int_distribution<int> coin(0, 3);
  ExactSL2 g = ExactSL2::identity(0);
  for (int i = 0; i < length; ++i) {
    // occasionally drop a factor so that pure root-group and torus elements show up
    int skip = coin(rng);
    BigRational c = skip == 1 ? BigRational(0) : lo * random_zp(rng, p);
    BigRational t = skip == 2 ? BigRational(1) : 1 + tp * random_zp(rng, p);
    BigRational a = skip == 3 ? BigRational(0) : hi * random_zp(rng, p);
    if (t == 0) t = 1;
    g = g * ExactSL2::lower(c) * ExactSL2::torus(t) * ExactSL2::upper(a);
  }
  return g.conjugate_by(st.h.inverse());
}

struct CheckReport {
  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  std::string name;
  bool ok = true;
  long checked = 0;
  std::string counterexample;

  void fail(std::string what) {
    if (ok) counterexample = std::move(what);
    ok = false;
  }
  nlohmann::json to_json() const {
    nlohmann::json j{{"check", name}, {"ok", ok}, {"checked", checked}};
    if (!ok) j["counterexample"] = counterexample;
    return j;
  }
};

/// p-valuation axioms on a sample of U_F^(e):
///   (i)   w(g h^-1) >= min(w(g), w(h))
///   (ii)  w([g, h]) >= w(g) + w(h), with [g, h] in U_F^(w(g) + w(h)) checked by membership
///   (iii) w(g^p) = w(g) + 1
template <class K>
std::vector<CheckReport> check_pvaluation(int p, const std::vector<SL2<K>>& samples, const TreeFacet& f, long e) {
  CheckReport i1{"ultrametric"}, i2{"commutator"}, i3{"p-power"}, cont{"commutator containment"};
  std::vector<Omega> w;
  for (const auto& g : samples) w.push_back(omega(p, g, f, e));
  auto add = [](long a, long b) { return (a == kInfiniteValuation || b == kInfiniteValuation) ? kInfiniteValuation : a + b; };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& g = samples[i];
    ++i3.checked;
    Omega wp = omega(p, g.pow(p), f, e);
    if (wp.omega != add(w[i].omega, 1)) i3.fail("g = " + g.to_string() + ": w(g) = " + w[i].to_string() + ", w(g^p) = " + wp.to_string());
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const auto& h = samples[j];
      ++i1.checked;
      long lo = std::min(w[i].omega, w[j].omega);
      Omega q = omega(p, g * h.inverse(), f, e);
      if (q.omega < lo) i1.fail("g = " + g.to_string() + ", h = " + h.to_string());
      ++i2.checked;
      SL2<K> k = commutator(g, h);
      long want = add(w[i].omega, w[j].omega);
      Omega qc = omega(p, k, f, e);
      if (qc.omega < want) i2.fail("g = " + g.to_string() + ", h = " + h.to_string());
      if (want != kInfiniteValuation) {
        ++cont.checked;
        if (!membership(p, k, f, want)) cont.fail("[g, h] not in U^(" + std::to_string(want) + ") for g = " + g.to_string() + ", h = " + h.to_string());
      }
    }
  }
  return {i1, i2, i3, cont};
}

/// Level constants for L = Q_p: e1 is the least integer > 1/(p-1), and omega is
/// only used from e = 2 on.  e_uni is measured by lower_p_series_check.
struct LevelConstants {
  long e1 = 1;
  long omega_min = 2;
  long safe_level() const { return std::max(e1 + 1, omega_min); }
};

inline LevelConstants level_constants(int p) {
  if (p < 3) throw std::invalid_argument("p must be an odd prime");
  LevelConstants c;
  c.e1 = 1 / (p - 1) + 1;
  return c;
}

}  // namespace bts
