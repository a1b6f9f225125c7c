#pragma once

// The Bruhat-Tits tree of SL2(Q_p).  A vertex is the homothety class of the
// lattice spanned by the columns of
//
//     [[p^n, b], [0, 1]],   b in Z[1/p] reduced to [0, p^n),
//
// which is the unique column-Hermite representative of its class.  The
// standard apartment consists of the classes (n, 0); we identify (-k, 0) with
// the apartment point x_k, so the positive root takes the value k there.

#include "bts/apartment.hpp"
#include "bts/sl2.hpp"

#include <boost/integer/mod_inverse.hpp>

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

struct TreeVertex {
  long n = 0;
  Rational b{0};

  friend bool operator==(const TreeVertex& x, const TreeVertex& y) { return x.n == y.n && x.b == y.b; }
  friend bool operator<(const TreeVertex& x, const TreeVertex& y) { return x.n != y.n ? x.n < y.n : x.b < y.b; }

  std::string label(int p) const { return "[[" + std::to_string(p) + "^" + std::to_string(n) + ", " + to_string(b) + "], [0, 1]]"; }
};

/// Canonical representative of q mod p^n Z_p in Z[1/p] cap [0, p^n).
inline Rational reduce_mod_power(const BigRational& q, int p, long n) {
  if (q == 0 || valuation_of(q, p) >= n) return Rational(0);
  BigInt num = numerator(q), den = denominator(q);
  long s = valuation_of(den, p);
  BigInt w = den / ipow(p, s);
  BigInt mod = ipow(p, n + s);
  BigInt winv = boost::integer::mod_inverse(BigInt(w % mod), mod);
  BigInt y = ((num % mod) * winv) % mod;
  if (y < 0) y += mod;
  BigInt scale = ipow(p, s);
  BigInt g = gcd(y, scale);
  BigInt rn = y / g, rd = scale / g;
  if (rn > std::numeric_limits<long long>::max() || rd > std::numeric_limits<long long>::max())
    throw std::overflow_error("tree coordinate too large");
  return Rational(static_cast<long long>(rn), static_cast<long long>(rd));
}

inline BigRational pow_p(int p, long v) { return scalar_traits<BigRational>::power_of_p(0, p, v); }

inline TreeVertex make_vertex(int p, long n, const BigRational& b) { return TreeVertex{n, reduce_mod_power(b, p, n)}; }

inline Mat2<BigRational> lattice_matrix(int p, const TreeVertex& v) {
  return Mat2<BigRational>::of(pow_p(p, v.n), to_big(v.b), 0, 1);
}

/// The p+1 classes of index-p sublattices of a representative of v.
inline std::vector<TreeVertex> tree_neighbors(int p, const TreeVertex& v) {
  std::vector<TreeVertex> out;
  BigRational step = pow_p(p, v.n);
  for (int j = 0; j < p; ++j) out.push_back(make_vertex(p, v.n + 1, to_big(v.b) + step * j));
  out.push_back(make_vertex(p, v.n - 1, to_big(v.b)));
  return out;
}

/// Class of g.L for the lattice L of v: column-reduce g * [[p^n, b], [0, 1]].
inline TreeVertex act(int p, const Mat2<BigRational>& g, const TreeVertex& v) {
  Mat2<BigRational> m = g * lattice_matrix(p, v);
  BigRational top1 = m.a(), bot1 = m.c(), top2 = m.b(), bot2 = m.d();
  auto v_of = [&](const BigRational& x) { return x == 0 ? kInfiniteValuation : valuation_of(x, p); };
  if (v_of(bot1) < v_of(bot2)) {
    std::swap(top1, top2);
    std::swap(bot1, bot2);
  }
  if (bot2 == 0) throw std::invalid_argument("singular matrix");
  top1 -= (bot1 / bot2) * top2;
  if (top1 == 0) throw std::invalid_argument("singular matrix");
  long n = valuation_of(top1, p) - valuation_of(bot2, p);
  return make_vertex(p, n, top2 / bot2);
}

/// A vertex or an edge, known by its (sorted) vertex set.
struct TreeFacet {
  std::vector<TreeVertex> vertices;

  TreeFacet() = default;
  explicit TreeFacet(std::vector<TreeVertex> vs) : vertices(std::move(vs)) {
    std::sort(vertices.begin(), vertices.end());
    if (vertices.empty() || vertices.size() > 2) throw std::invalid_argument("tree facets have 1 or 2 vertices");
    if (vertices.size() == 2 && vertices[1].n != vertices[0].n + 1) throw std::invalid_argument("not an edge");
  }
  static TreeFacet vertex(TreeVertex v) { return TreeFacet({v}); }
  static TreeFacet edge(TreeVertex x, TreeVertex y) { return TreeFacet({x, y}); }

  std::size_t dimension() const { return vertices.size() - 1; }
  bool is_vertex() const { return vertices.size() == 1; }

  friend bool operator==(const TreeFacet&, const TreeFacet&) = default;
  friend bool operator<(const TreeFacet& x, const TreeFacet& y) { return x.vertices < y.vertices; }

  std::string label(int p) const {
    if (is_vertex()) return vertices[0].label(p);
    return "{" + vertices[0].label(p) + ", " + vertices[1].label(p) + "}";
  }
  /// Short id "n:b" or "n:b|n':b'".
  std::string id() const {
    std::string s;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i) s += "|";
      s += std::to_string(vertices[i].n) + ":" + to_string(vertices[i].b);
    }
    return s;
  }
};

inline bool is_face(const TreeFacet& sub, const TreeFacet& f) {
  return std::includes(f.vertices.begin(), f.vertices.end(), sub.vertices.begin(), sub.vertices.end());
}

inline TreeFacet act(int p, const Mat2<BigRational>& g, const TreeFacet& f) {
  std::vector<TreeVertex> vs;
  for (const auto& v : f.vertices) vs.push_back(act(p, g, v));
  return TreeFacet(vs);
}

inline constexpr std::size_t kMaxBallVertices = 200000;

/// All vertices within distance `radius` of `center` and the edges between them.
inline std::vector<TreeFacet> tree_ball(int p, const TreeVertex& center, int radius) {
  if (radius < 0) throw std::invalid_argument("negative radius");
  std::map<TreeVertex, int> dist{{center, 0}};
  std::deque<TreeVertex> queue{center};
  std::vector<TreeFacet> out;
  std::vector<TreeFacet> edges;
  while (!queue.empty()) {
    TreeVertex v = queue.front();
    queue.pop_front();
    out.push_back(TreeFacet::vertex(v));
    int dv = dist[v];
    if (dv == radius) continue;
    for (const auto& w : tree_neighbors(p, v)) {
      if (dist.count(w)) continue;
      dist[w] = dv + 1;
      if (dist.size() > kMaxBallVertices) throw std::length_error("tree window exceeds the vertex bound");
      queue.push_back(w);
      edges.push_back(TreeFacet::edge(v, w));
    }
  }
  out.insert(out.end(), edges.begin(), edges.end());
  return out;
}

inline std::vector<TreeFacet> tree_ball(int p, int radius) { return tree_ball(p, TreeVertex{}, radius); }

/// h with h.F in the standard apartment, and h.F written as an A1 apartment facet.
struct Standardized {
  ExactSL2 h;
  ApartmentFacet facet;
};

/// h.F as an apartment facet for a given h; throws if h.F leaves the apartment.
inline Standardized standardize_with(int p, const TreeFacet& f, const ExactSL2& h) {
  std::vector<Point> pts;
  for (const auto& v : f.vertices) {
    TreeVertex w = act(p, h.matrix(), v);
    if (w.b != Rational(0)) throw std::logic_error("standardization left the apartment");
    pts.push_back({Rational(-w.n)});
  }
  return {h, ApartmentFacet(pts)};
}

inline Standardized standardize(int p, const TreeFacet& f) {
  // u+(-b) fixes p^n e1 and sends b e1 + e2 to e2; for an edge use the far endpoint
  return standardize_with(p, f, ExactSL2::upper(-to_big(f.vertices.back().b)));
}

/// Apartment facet of A1 back to a tree facet.
inline TreeFacet tree_facet_of(const ApartmentFacet& f) {
  std::vector<TreeVertex> vs;
  for (const auto& x : f.vertices) {
    if (x[0].denominator() != 1) throw std::invalid_argument("not a vertex of the tree");
    vs.push_back(TreeVertex{static_cast<long>(-x[0].numerator()), Rational(0)});
  }
  return TreeFacet(vs);
}

}  // namespace bts
