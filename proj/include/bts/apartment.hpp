#pragma once

// The standard apartment of a split group of type A1 or A2, tiled by the affine
// root hyperplanes alpha(x) + k = 0, together with the concave functions of its
// facets.  Points are written by the values of the simple roots, so the origin is
// the special vertex x0 and alpha(x) is an integer combination of coordinates.

#include "bts/root_data.hpp"
#include "bts/xreal.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

using Point = std::vector<Rational>;

/// A relatively open simplex of the apartment, known by the vertices of its closure.
struct ApartmentFacet {
  std::vector<Point> vertices;  // sorted

  ApartmentFacet() = default;
  explicit ApartmentFacet(std::vector<Point> vs) : vertices(std::move(vs)) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  }

  std::size_t dimension() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  friend bool operator==(const ApartmentFacet&, const ApartmentFacet&) = default;
  friend bool operator<(const ApartmentFacet& a, const ApartmentFacet& b) { return a.vertices < b.vertices; }

  std::string label() const {
    std::string s = "{";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i) s += ", ";
      s += "(";
      for (std::size_t j = 0; j < vertices[i].size(); ++j) {
        if (j) s += ",";
        s += to_string(vertices[i][j]);
      }
      s += ")";
    }
    return s + "}";
  }
};

/// F' <= F iff F' lies in the closure of F.
inline bool is_face(const ApartmentFacet& sub, const ApartmentFacet& f) {
  return std::includes(f.vertices.begin(), f.vertices.end(), sub.vertices.begin(), sub.vertices.end());
}

/// Values indexed like RootDatum::roots().
struct ConcaveFunction {
  std::vector<XReal> values;
  const XReal& operator[](std::size_t i) const { return values[i]; }
};

class Apartment {
 public:
  explicit Apartment(RootDatum datum) : datum_(std::move(datum)) {}

  const RootDatum& datum() const { return datum_; }
  std::size_t rank() const { return datum_.rank(); }

  Rational root_value(std::size_t root, const Point& x) const {
    Rational s = 0;
    const IntVec& r = datum_.roots()[root];
    for (std::size_t i = 0; i < rank(); ++i) s += Rational(r[i]) * x[i];
    return s;
  }

  Point origin() const { return Point(rank(), Rational(0)); }

  ApartmentFacet vertex(const Point& x) const { return ApartmentFacet({x}); }

  /// The edge (x0, x1) with alpha(x1) = 1 (rank 1).
  ApartmentFacet standard_edge() const {
    require_rank(1);
    return ApartmentFacet({{Rational(0)}, {Rational(1)}});
  }

  /// Open simplex with vertices x0 and the points where one simple root is 1.
  ApartmentFacet fundamental_alcove() const {
    std::vector<Point> vs{origin()};
    for (std::size_t i = 0; i < rank(); ++i) {
      Point e = origin();
      e[i] = 1;
      vs.push_back(e);
    }
    return ApartmentFacet(vs);
  }

  /// All facets whose closure lies in the box max|coordinate| <= radius.
  std::vector<ApartmentFacet> window(int radius) const {
    if (radius < 0) throw std::invalid_argument("negative radius");
    std::vector<ApartmentFacet> out;
    auto in_box = [&](long long a, long long b) {
      return std::abs(a) <= radius && std::abs(b) <= radius;
    };
    if (datum_.cartan() == IntMatrix{{2}}) {
      for (int k = -radius; k <= radius; ++k) out.push_back(vertex({Rational(k)}));
      for (int k = -radius; k < radius; ++k) out.push_back(ApartmentFacet({{Rational(k)}, {Rational(k + 1)}}));
      return out;
    }
    if (datum_.cartan() == IntMatrix{{2, -1}, {-1, 2}}) {
      auto pt = [](long long a, long long b) { return Point{Rational(a), Rational(b)}; };
      for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b) out.push_back(vertex(pt(a, b)));
      // edges along the three wall directions
      const int dirs[3][2] = {{1, 0}, {0, 1}, {1, -1}};
      for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b)
          for (const auto& d : dirs)
            if (in_box(a + d[0], b + d[1])) out.push_back(ApartmentFacet({pt(a, b), pt(a + d[0], b + d[1])}));
      // two alcove shapes per unit square
      for (int a = -radius; a < radius; ++a)
        for (int b = -radius; b < radius; ++b) {
          out.push_back(ApartmentFacet({pt(a, b), pt(a + 1, b), pt(a, b + 1)}));
          out.push_back(ApartmentFacet({pt(a + 1, b), pt(a, b + 1), pt(a + 1, b + 1)}));
        }
      return out;
    }
    throw std::invalid_argument("apartment windows are implemented for A1 and A2 only");
  }

 private:
  void require_rank(std::size_t l) const {
    if (rank() != l) throw std::invalid_argument("operation needs rank " + std::to_string(l));
  }

  RootDatum datum_;
};

/// f_F(alpha) = -inf_{x in F} alpha(x); the infimum is attained at a closure vertex.
inline ConcaveFunction facet_concave(const Apartment& apt, const ApartmentFacet& f) {
  if (f.vertices.empty()) throw std::invalid_argument("unbounded or empty facet");
  ConcaveFunction out;
  for (std::size_t r = 0; r < apt.datum().roots().size(); ++r) {
    Rational m = apt.root_value(r, f.vertices.front());
    for (const auto& x : f.vertices) m = std::min(m, apt.root_value(r, x));
    out.values.emplace_back(-m);
  }
  return out;
}

/// f*_F(alpha) = f_F(alpha)+ when alpha is constant on F, f_F(alpha) otherwise.
inline ConcaveFunction star_concave(const Apartment& apt, const ApartmentFacet& f) {
  ConcaveFunction base = facet_concave(apt, f);
  for (std::size_t r = 0; r < base.values.size(); ++r) {
    Rational first = apt.root_value(r, f.vertices.front());
    bool constant = std::all_of(f.vertices.begin(), f.vertices.end(),
                                [&](const Point& x) { return apt.root_value(r, x) == first; });
    if (constant) base.values[r] = XReal::plus(base.values[r].value());
  }
  return base;
}

/// JSON rows {facet, root, level} with level = f*_F(alpha) + e.
inline nlohmann::json level_table(const Apartment& apt, const std::vector<ApartmentFacet>& facets, long e) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& f : facets) {
    ConcaveFunction star = star_concave(apt, f);
    for (std::size_t r = 0; r < star.values.size(); ++r) {
      rows.push_back({{"facet", f.label()},
                      {"root", apt.datum().roots()[r]},
                      {"level", (star[r] + XReal(static_cast<long long>(e))).to_string()}});
    }
  }
  return rows;
}

}  // namespace bts
