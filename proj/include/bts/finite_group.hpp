#pragma once

// Finite images in SL2(Z/p^m), with elements packed into 64-bit keys so that
// subgroup closures are plain hash-set searches.

#include "bts/filtration.hpp"

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bts {

class ModSL2 {
 public:
  ModSL2() = default;
  ModSL2(std::uint32_t modulus, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d)
      : m_(modulus), e_{a % modulus, b % modulus, c % modulus, d % modulus} {}

  static ModSL2 identity(std::uint32_t modulus) { return ModSL2(modulus, 1, 0, 0, 1); }

  /// Reduction of a p-integral element.
  static ModSL2 reduce(const ExactSL2& g, int p, long m) {
    BigInt mod = ipow(p, m);
    if (mod > 0xFFFF) throw std::invalid_argument("p^m must stay below 2^16");
    std::uint32_t out[4];
    for (int i = 0; i < 4; ++i) {
      const BigRational& x = g[i];
      if (x != 0 && valuation_of(x, p) < 0) throw std::invalid_argument("element is not p-integral");
      BigInt num = numerator(x), den = denominator(x);
      BigInt r = (num % mod) * boost::integer::mod_inverse(BigInt(den % mod), mod) % mod;
      if (r < 0) r += mod;
      out[i] = static_cast<std::uint32_t>(r);
    }
    return ModSL2(static_cast<std::uint32_t>(mod), out[0], out[1], out[2], out[3]);
  }

  std::uint32_t modulus() const { return m_; }
  std::uint32_t operator[](int i) const { return e_[i]; }

  friend ModSL2 operator*(const ModSL2& x, const ModSL2& y) {
    const std::uint64_t m = x.m_;
    auto dot = [m](std::uint64_t p1, std::uint64_t q1, std::uint64_t p2, std::uint64_t q2) {
      return static_cast<std::uint32_t>((p1 * q1 + p2 * q2) % m);
    };
    return ModSL2(x.m_, dot(x.e_[0], y.e_[0], x.e_[1], y.e_[2]), dot(x.e_[0], y.e_[1], x.e_[1], y.e_[3]),
                  dot(x.e_[2], y.e_[0], x.e_[3], y.e_[2]), dot(x.e_[2], y.e_[1], x.e_[3], y.e_[3]));
  }
  friend bool operator==(const ModSL2&, const ModSL2&) = default;

  ModSL2 inverse() const { return ModSL2(m_, e_[3], m_ - e_[1], m_ - e_[2], e_[0]); }

  ModSL2 pow(long n) const {
    ModSL2 r = identity(m_), b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  std::uint64_t key() const {
    return static_cast<std::uint64_t>(e_[0]) | static_cast<std::uint64_t>(e_[1]) << 16 |
           static_cast<std::uint64_t>(e_[2]) << 32 | static_cast<std::uint64_t>(e_[3]) << 48;
  }
  static ModSL2 from_key(std::uint32_t modulus, std::uint64_t k) {
    return ModSL2(modulus, k & 0xFFFF, (k >> 16) & 0xFFFF, (k >> 32) & 0xFFFF, (k >> 48) & 0xFFFF);
  }

 private:
  std::uint32_t m_ = 1;
  std::uint32_t e_[4] = {0, 0, 0, 1};
};

using KeySet = std::unordered_set<std::uint64_t>;

inline constexpr std::size_t kMaxClosure = 2'000'000;

/// The subgroup generated by `gens` (a finite group, so the generated monoid).
inline KeySet closure(std::uint32_t modulus, const std::vector<ModSL2>& gens, std::size_t bound = kMaxClosure) {
  ModSL2 one = ModSL2::identity(modulus);
  KeySet seen{one.key()};
  std::deque<ModSL2> queue{one};
  while (!queue.empty()) {
    ModSL2 x = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      ModSL2 y = x * g;
      if (seen.insert(y.key()).second) {
        if (seen.size() > bound) throw std::length_error("subgroup closure exceeds the element bound");
        queue.push_back(y);
      }
    }
  }
  return seen;
}

inline std::vector<ModSL2> reduce_all(const std::vector<ExactSL2>& gs, int p, long m) {
  std::vector<ModSL2> out;
  for (const auto& g : gs) out.push_back(ModSL2::reduce(g, p, m));
  return out;
}

/// Image of U_F^(e) in SL2(Z/p^m), generated by its ordered basis.
inline KeySet level_image(int p, const TreeFacet& f, long e, long m) {
  auto gens = reduce_all(ordered_basis(p, f, e), p, m);
  return closure(gens.front().modulus(), gens);
}

/// Subgroup generated by `seeds`, adding a seed only when it is not yet inside.
inline KeySet closure_of_seeds(std::uint32_t modulus, const std::vector<ModSL2>& seeds) {
  std::vector<ModSL2> gens;
  KeySet h{ModSL2::identity(modulus).key()};
  for (const auto& s : seeds) {
    if (h.count(s.key())) continue;
    gens.push_back(s);
    h = closure(modulus, gens);
  }
  return h;
}

/// Smallest normal subgroup of <g_gens> containing `seeds`.
inline KeySet normal_closure(std::uint32_t modulus, std::vector<ModSL2> seeds, const std::vector<ModSL2>& g_gens) {
  for (;;) {
    KeySet h = closure_of_seeds(modulus, seeds);
    bool grown = false;
    for (auto k : h) {
      ModSL2 x = ModSL2::from_key(modulus, k);
      for (const auto& t : g_gens) {
        ModSL2 y = t * x * t.inverse();
        if (!h.count(y.key())) {
          seeds.push_back(y);
          grown = true;
        }
      }
      if (grown) break;
    }
    if (!grown) return h;
  }
}

/// G = <gens> and its second lower p-series term P_2(G) = G^p [G, G].
inline std::pair<KeySet, KeySet> p2_subgroup(int p, const std::vector<ModSL2>& gens) {
  const std::uint32_t mod = gens.front().modulus();
  KeySet g = closure(mod, gens);
  std::vector<ModSL2> seeds;
  for (auto k : g) seeds.push_back(ModSL2::from_key(mod, k).pow(p));
  for (const auto& x : gens)
    for (const auto& y : gens) seeds.push_back(x.inverse() * y.inverse() * x * y);
  return {std::move(g), normal_closure(mod, std::move(seeds), gens)};
}

struct LowerPSeriesReport {
  std::size_t order_g = 0;      // |image of U_F^(e)|
  std::size_t order_h = 0;      // |G^p [G, G]|
  std::size_t order_next = 0;   // |image of U_F^(e+1)|
  bool equal = false;
  bool normal = false;
  long index_log = -1;          // log_p [G : H], -1 if not a power of p

  bool ok() const { return equal && normal; }
  nlohmann::json to_json() const {
    return {{"order_G", order_g}, {"order_P2", order_h}, {"order_next_level", order_next},
            {"images_coincide", equal}, {"normal", normal}, {"log_p_index", index_log}};
  }
};

/// Compares P_2(G) = G^p [G, G] for G the image of U_F^(e) with the image of U_F^(e+1).
inline LowerPSeriesReport lower_p_series_check(int p, const TreeFacet& f, long e, long m) {
  if (e < 2) throw std::invalid_argument("lower p-series check needs e >= 2");
  auto gens = reduce_all(ordered_basis(p, f, e), p, m);
  const std::uint32_t mod = gens.front().modulus();
  auto [g, h] = p2_subgroup(p, gens);
  KeySet next = level_image(p, f, e + 1, m);

  LowerPSeriesReport r;
  r.order_g = g.size();
  r.order_h = h.size();
  r.order_next = next.size();
  r.equal = h == next;
  r.normal = true;
  for (auto k : next) {
    ModSL2 x = ModSL2::from_key(mod, k);
    for (const auto& t : gens)
      if (!next.count((t * x * t.inverse()).key())) r.normal = false;
  }
  if (g.size() % h.size() == 0) {
    std::size_t idx = g.size() / h.size();
    long lg = 0;
    while (idx % static_cast<std::size_t>(p) == 0) {
      idx /= static_cast<std::size_t>(p);
      ++lg;
    }
    r.index_log = idx == 1 ? lg : -1;
  }
  return r;
}

/// Smallest e in [0, e_max] from which P_2 of the image of U_F^(e) equals the
/// image of U_F^(e+1) at every level up to e_max (mod p^m); -1 if none.
inline long probe_e_uni(int p, const TreeFacet& f, long e_max, long m) {
  long best = -1;
  for (long e = e_max; e >= 0; --e) {
    if (p2_subgroup(p, reduce_all(ordered_basis(p, f, e), p, m)).second != level_image(p, f, e + 1, m)) break;
    best = e;
  }
  return best;
}

}  // namespace bts
