#pragma once

// Finite-level representations: the action factors through SL2(Z/p^level), so
// only p-integral group elements have an action (the window must stay inside
// SL2(Z_p)).  Presets act through SL2(F_p) on functions on P^1(F_p).

#include "bts/finite_group.hpp"
#include "bts/linalg.hpp"

#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace bts {

struct SmoothRep {
  std::string name;
  int p = 3;
  std::size_t dim = 0;
  long level = 1;        // action factors through SL2(Z/p^level)
  long trivial_from = 0; // U_{x0}^(e) acts trivially for e >= trivial_from
  std::function<Matrix(const ModSL2&)> act_mod;

  /// Matrix of g; throws std::domain_error outside SL2(Z_p).
  Matrix act(const ExactSL2& g) const {
    ModSL2 r;
    try {
      r = ModSL2::reduce(g, p, level);
    } catch (const std::invalid_argument&) {
      throw std::domain_error(name + ": " + g.to_string() + " is outside the action range SL2(Z_p)");
    }
    return act_mod(r);
  }
};

namespace detail {

/// [x:1] for x < p, and p for the point at infinity [1:0].
inline std::size_t p1_image(const ModSL2& g, std::size_t y, int p) {
  const std::uint64_t q = static_cast<std::uint64_t>(p);
  std::uint64_t num, den;
  if (y == q) {
    num = g[0];
    den = g[2];
  } else {
    num = (g[0] * y + g[1]) % q;
    den = (g[2] * y + g[3]) % q;
  }
  if (den == 0) return q;
  std::uint64_t inv = static_cast<std::uint64_t>(boost::integer::mod_inverse(static_cast<long long>(den), static_cast<long long>(q)));
  return num * inv % q;
}

inline ModSL2 mod_p(const ModSL2& g, int p) {
  return ModSL2(static_cast<std::uint32_t>(p), g[0], g[1], g[2], g[3]);
}

}  // namespace detail

inline SmoothRep trivial_rep(int p) {
  return {"trivial", p, 1, 1, 0, [](const ModSL2&) { return Matrix::identity(1); }};
}

/// K-valued functions on P^1(F_p) with g.delta_y = delta_{g y}.
inline SmoothRep p1_functions(int p) {
  auto act = [p](const ModSL2& g) {
    const std::size_t n = static_cast<std::size_t>(p) + 1;
    ModSL2 gp = detail::mod_p(g, p);
    Matrix m(n, n);
    for (std::size_t y = 0; y < n; ++y) m(detail::p1_image(gp, y, p), y) = 1;
    return m;
  };
  return {"p1-functions", p, static_cast<std::size_t>(p) + 1, 1, 0, act};
}

/// Functions on P^1(F_p) modulo constants, with basis delta_0..delta_{p-1}
/// (delta_inf = -sum of the others).
inline SmoothRep steinberg(int p) {
  auto act = [p](const ModSL2& g) {
    const std::size_t n = static_cast<std::size_t>(p);
    ModSL2 gp = detail::mod_p(g, p);
    Matrix m(n, n);
    for (std::size_t y = 0; y < n; ++y) {
      std::size_t z = detail::p1_image(gp, y, p);
      if (z == n) {
        for (std::size_t i = 0; i < n; ++i) m(i, y) = -1;
      } else {
        m(z, y) = 1;
      }
    }
    return m;
  };
  return {"steinberg", p, static_cast<std::size_t>(p), 1, 0, act};
}

/// Contragredient: g acts by the transpose of g^-1.
inline SmoothRep dual(const SmoothRep& v) {
  SmoothRep d = v;
  d.name = "dual(" + v.name + ")";
  auto inner = v.act_mod;
  d.act_mod = [inner](const ModSL2& g) { return inner(g.inverse()).transpose(); };
  return d;
}

inline SmoothRep rep_by_name(const std::string& name, int p) {
  if (name == "trivial") return trivial_rep(p);
  if (name == "p1-functions") return p1_functions(p);
  if (name == "steinberg") return steinberg(p);
  throw std::invalid_argument("unknown representation '" + name + "' (trivial | p1-functions | steinberg)");
}

/// The sequence 0 -> trivial -> P^1(F_p)-functions -> Steinberg -> 0.
struct SteinbergSequence {
  SmoothRep triv, p1, st;
  Matrix iota;  // constants
  Matrix pi;    // delta_inf -> -sum delta_x
};

inline SteinbergSequence steinberg_sequence(int p) {
  const std::size_t n = static_cast<std::size_t>(p);
  SteinbergSequence s{trivial_rep(p), p1_functions(p), steinberg(p), Matrix(n + 1, 1), Matrix(n, n + 1)};
  for (std::size_t i = 0; i <= n; ++i) s.iota(i, 0) = 1;
  for (std::size_t i = 0; i < n; ++i) {
    s.pi(i, i) = 1;
    s.pi(i, n) = -1;
  }
  return s;
}

/// Homomorphism on random pairs of SL2(Z/p^level), and triviality of the
/// marked subgroup on its generators.
inline CheckReport rep_laws_check(const SmoothRep& v, int samples, unsigned seed) {
  CheckReport r("representation laws: " + v.name);
  const std::uint32_t mod = static_cast<std::uint32_t>(ipow(v.p, v.level));
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::uint32_t> u(0, mod - 1);
  auto random_elt = [&] {
    // products of unipotents cover SL2(Z/p^level)
    ModSL2 g = ModSL2::identity(mod);
    for (int i = 0; i < 3; ++i) g = g * ModSL2(mod, 1, u(rng), 0, 1) * ModSL2(mod, 1, 0, u(rng), 1);
    return g;
  };
  if (!(v.act_mod(ModSL2::identity(mod)) == Matrix::identity(v.dim))) r.fail("identity does not act trivially");
  for (int i = 0; i < samples; ++i) {
    ModSL2 g = random_elt(), h = random_elt();
    ++r.checked;
    if (!(v.act_mod(g * h) == v.act_mod(g) * v.act_mod(h))) r.fail("not multiplicative at g key " + std::to_string(g.key()) + ", h key " + std::to_string(h.key()));
  }
  for (const auto& g : ordered_basis(v.p, TreeFacet::vertex(TreeVertex{}), v.trivial_from)) {
    ++r.checked;
    if (!(v.act(g) == Matrix::identity(v.dim))) r.fail("generator " + g.to_string() + " of the marked subgroup acts nontrivially");
  }
  return r;
}

/// rho_W(g) M = M rho_V(g) on random elements.
inline CheckReport equivariance_check(const SmoothRep& v, const SmoothRep& w, const Matrix& m, int samples, unsigned seed) {
  CheckReport r("equivariance: " + v.name + " -> " + w.name);
  const std::uint32_t mod = static_cast<std::uint32_t>(ipow(v.p, std::max(v.level, w.level)));
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::uint32_t> u(0, mod - 1);
  for (int i = 0; i < samples; ++i) {
    ModSL2 g = ModSL2(mod, 1, u(rng), 0, 1) * ModSL2(mod, 1, 0, u(rng), 1) * ModSL2(mod, 1, u(rng), 0, 1);
    ++r.checked;
    auto gv = ModSL2(static_cast<std::uint32_t>(ipow(v.p, v.level)), g[0], g[1], g[2], g[3]);
    auto gw = ModSL2(static_cast<std::uint32_t>(ipow(w.p, w.level)), g[0], g[1], g[2], g[3]);
    if (!(w.act_mod(gw) * m == m * v.act_mod(gv))) r.fail("intertwining fails at g key " + std::to_string(g.key()));
  }
  return r;
}

}  // namespace bts
