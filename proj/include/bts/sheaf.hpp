#pragma once

// Coefficient systems on finite tree windows and the sheaves built from
// representations: V_F = coinvariants of U_F^(e), face maps induced by
// U_{F'}^(e) <= U_F^(e).
//
// Sections are computed over unions of stars only.  On those, a section is a
// family (s_F) with s_F = sigma^{F'F}(s_{F'}) for every face pair inside the
// open set: an open set meeting F' meets every cofacet of F', so the local
// data collapses to this finite limit.  Stars of window-boundary facets are
// truncated to the window.

#include "bts/distribution.hpp"
#include "bts/smooth_rep.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bts {

using Window = Complex<TreeFacet>;

inline Window tree_window(int p, int radius) { return Window(tree_ball(p, radius)); }

namespace detail {

inline std::vector<ModSL2> image_generators(const SmoothRep& v, const std::vector<ExactSL2>& basis) {
  std::vector<ModSL2> out;
  for (const auto& g : basis) {
    try {
      out.push_back(ModSL2::reduce(g, v.p, v.level));
    } catch (const std::invalid_argument&) {
      throw std::domain_error(v.name + ": generator " + g.to_string() + " is outside the action range SL2(Z_p)");
    }
  }
  return out;
}

inline Quotient quotient_by_fixing(const SmoothRep& v, const std::vector<ModSL2>& elements) {
  Matrix span(v.dim, 0);
  const Matrix one = Matrix::identity(v.dim);
  for (const auto& g : elements) span = span.hcat(one - v.act_mod(g));
  return quotient(span, v.dim);
}

/// ker a == ker b for two surjections with the same source.
inline bool same_kernel(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return false;
  std::size_t ra = rank(a), rb = rank(b);
  return ra == rb && rank(a.transpose().hcat(b.transpose())) == ra;
}

}  // namespace detail

/// V_U for U = U_F^(e), generated by the ordered basis of U.
inline Quotient coinvariants(const SmoothRep& v, const std::vector<ExactSL2>& basis) {
  return detail::quotient_by_fixing(v, detail::image_generators(v, basis));
}

inline Quotient coinvariants(const SmoothRep& v, const TreeFacet& f, long e) {
  return coinvariants(v, ordered_basis(v.p, f, e));
}

/// Image of U_F^(e) in SL2(Z/p^level), every element listed.
inline std::vector<ModSL2> enumerate_image(const SmoothRep& v, const TreeFacet& f, long e) {
  auto gens = detail::image_generators(v, ordered_basis(v.p, f, e));
  KeySet keys = closure(gens.front().modulus(), gens);
  std::vector<std::uint64_t> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<ModSL2> out;
  for (auto k : sorted) out.push_back(ModSL2::from_key(gens.front().modulus(), k));
  return out;
}

/// V_U with every element of the finite image of U fixed.
inline Quotient coinvariants_enumerated(const SmoothRep& v, const TreeFacet& f, long e) {
  return detail::quotient_by_fixing(v, enumerate_image(v, f, e));
}

/// Per facet a value space and per face pair F' <= F a map V_{F'} -> V_F.
struct CoefficientSystem {
  Window window;
  int p = 3;
  std::string name;
  std::vector<std::size_t> dims;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> face;  // (F', F), F = F' included

  const Matrix& sigma(std::size_t from, std::size_t to) const {
    auto it = face.find({from, to});
    if (it == face.end()) throw std::out_of_range("no face map " + window[from].id() + " -> " + window[to].id());
    return it->second;
  }

  std::string type_of(std::size_t i) const { return window[i].is_vertex() ? "vertex" : "edge"; }

  nlohmann::json to_json() const {
    nlohmann::json facets = nlohmann::json::array(), maps = nlohmann::json::array();
    for (std::size_t i = 0; i < window.size(); ++i)
      facets.push_back({{"id", window[i].id()}, {"dim", dims[i]}, {"type", type_of(i)}});
    for (const auto& [key, m] : face) {
      if (key.first == key.second) continue;
      maps.push_back({{"src", window[key.first].id()}, {"dst", window[key.second].id()}, {"matrix", m.to_json()}});
    }
    return {{"system", name}, {"p", p}, {"facets", facets}, {"maps", maps}};
  }

  std::string dimension_table() const {
    std::ostringstream os;
    os << name << "\n";
    for (std::size_t i = 0; i < window.size(); ++i) os << "  " << type_of(i) << "  " << window[i].id() << "  dim " << dims[i] << "\n";
    return os.str();
  }

  /// DOT overlay: facets coloured by value dimension.
  std::string to_dot() const {
    static const char* palette[] = {"white", "lightblue", "palegreen", "gold", "orange", "tomato", "orchid"};
    auto colour = [&](std::size_t i) {
      std::string c = palette[std::min<std::size_t>(dims[i], 6)];
      return window[i].is_vertex() ? "style=filled, fillcolor=" + c : "color=" + c + ", penwidth=3";
    };
    return bts::to_dot<TreeFacet>(window, [&](std::size_t i) { return window[i].id() + " (" + std::to_string(dims[i]) + ")"; }, colour);
  }
};

/// sigma^{FF} = id and sigma^{F'F} sigma^{F''F'} = sigma^{F''F}.
inline CheckReport laws_check(const CoefficientSystem& s) {
  CheckReport r("coefficient system laws: " + s.name);
  const auto& w = s.window;
  for (std::size_t f = 0; f < w.size(); ++f) {
    ++r.checked;
    if (!(s.sigma(f, f) == Matrix::identity(s.dims[f]))) r.fail("sigma at " + w[f].id() + " is not the identity");
    for (auto f1 : w.faces(f))
      for (auto f2 : w.faces(f1)) {
        ++r.checked;
        if (!(s.sigma(f1, f) * s.sigma(f2, f1) == s.sigma(f2, f)))
          r.fail("cocycle fails for " + w[f2].id() + " <= " + w[f1].id() + " <= " + w[f].id());
      }
  }
  return r;
}

/// A coefficient system whose values are quotients of one ambient space and
/// whose face maps are induced by the identity.
struct ConstructibleSheaf {
  CoefficientSystem system;
  std::vector<Quotient> values;

  const Quotient& stalk(std::size_t i) const { return values[i]; }
};

inline ConstructibleSheaf sheaf_of_quotients(const Window& w, int p, std::string name, std::vector<Quotient> values) {
  ConstructibleSheaf sh{CoefficientSystem{w, p, std::move(name), {}, {}}, std::move(values)};
  for (const auto& q : sh.values) sh.system.dims.push_back(q.dim());
  for (std::size_t f = 0; f < w.size(); ++f)
    for (auto f1 : w.faces(f)) {
      std::size_t n = sh.values[f].ambient();
      auto m = induced_map(sh.values[f1], sh.values[f], Matrix::identity(n));
      if (!m) throw std::logic_error("relations at " + w[f1].id() + " are not contained in those at " + w[f].id());
      sh.system.face[{f1, f}] = std::move(*m);
    }
  return sh;
}

/// F -> V_{U_F^(e)} on the window.
inline ConstructibleSheaf ss_sheaf(const SmoothRep& v, long e, const Window& w) {
  std::vector<Quotient> values;
  for (const auto& f : w.facets()) values.push_back(coinvariants(v, f, e));
  return sheaf_of_quotients(w, v.p, v.name + " at level " + std::to_string(e), std::move(values));
}

/// Sections over an open index set, as a basis of column vectors in the
/// direct sum of the V_F (F in the open set, in index order).
struct SectionSpace {
  std::vector<std::size_t> open;
  std::map<std::size_t, std::size_t> offset;
  std::size_t total = 0;
  Matrix basis;

  std::size_t dim() const { return basis.cols(); }

  /// Rows of the basis belonging to facet f.
  Matrix component(std::size_t f, std::size_t dim_f) const {
    Matrix m(dim_f, basis.cols());
    std::size_t o = offset.at(f);
    for (std::size_t i = 0; i < dim_f; ++i)
      for (std::size_t j = 0; j < basis.cols(); ++j) m(i, j) = basis(o + i, j);
    return m;
  }
};

inline SectionSpace sections(const CoefficientSystem& s, std::vector<std::size_t> open) {
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  SectionSpace out;
  out.open = open;
  for (auto f : open) {
    out.offset[f] = out.total;
    out.total += s.dims[f];
  }
  std::vector<std::vector<BigRational>> rows;
  for (auto f : open)
    for (auto f1 : s.window.faces(f)) {
      if (f1 == f || !out.offset.count(f1)) continue;
      const Matrix& sg = s.sigma(f1, f);
      for (std::size_t i = 0; i < s.dims[f]; ++i) {
        std::vector<BigRational> row(out.total, BigRational(0));
        for (std::size_t j = 0; j < s.dims[f1]; ++j) row[out.offset[f1] + j] = sg(i, j);
        row[out.offset[f] + i] -= 1;
        rows.push_back(std::move(row));
      }
    }
  out.basis = rows.empty() ? Matrix::identity(out.total) : nullspace(Matrix::from_rows(rows, out.total));
  return out;
}

/// Restriction of sections over `from` to the smaller open set `to`, in the
/// coordinates of sections(to).
inline Matrix restriction(const CoefficientSystem& s, const SectionSpace& from, const SectionSpace& to) {
  Matrix coords(to.total, from.dim());
  for (auto f : to.open) {
    if (!from.offset.count(f)) throw std::invalid_argument("restriction to a set that is not smaller");
    Matrix c = from.component(f, s.dims[f]);
    for (std::size_t i = 0; i < s.dims[f]; ++i)
      for (std::size_t j = 0; j < from.dim(); ++j) coords(to.offset.at(f) + i, j) = c(i, j);
  }
  auto x = solve(to.basis, coords);
  if (!x) throw std::logic_error("restricted family is not a section");
  return *x;
}

/// Omega = union of the stars St(c_i), covered by those stars: sections(Omega)
/// is the equalizer of prod sections(St c_i) over the pairwise overlaps.
inline CheckReport gluing_check(const CoefficientSystem& s, const std::vector<std::size_t>& centers) {
  std::string where;
  for (auto c : centers) where += (where.empty() ? "" : ", ") + s.window[c].id();
  CheckReport r("gluing on stars of " + where);
  SectionSpace whole = sections(s, s.window.star_union(centers));
  std::vector<SectionSpace> parts;
  std::vector<std::size_t> start;
  std::size_t unknowns = 0;
  for (auto c : centers) {
    parts.push_back(sections(s, s.window.star(c)));
    start.push_back(unknowns);
    unknowns += parts.back().dim();
  }
  // agreement on overlaps
  std::vector<std::vector<BigRational>> rows;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      for (auto f : parts[i].open) {
        if (!parts[j].offset.count(f)) continue;
        Matrix a = parts[i].component(f, s.dims[f]), b = parts[j].component(f, s.dims[f]);
        for (std::size_t k = 0; k < s.dims[f]; ++k) {
          std::vector<BigRational> row(unknowns, BigRational(0));
          for (std::size_t c = 0; c < a.cols(); ++c) row[start[i] + c] = a(k, c);
          for (std::size_t c = 0; c < b.cols(); ++c) row[start[j] + c] = -b(k, c);
          rows.push_back(std::move(row));
        }
      }
  Matrix agree = rows.empty() ? Matrix(0, unknowns) : Matrix::from_rows(rows, unknowns);
  std::size_t equalizer_dim = unknowns - rank(agree);

  Matrix res(unknowns, whole.dim());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Matrix ri = restriction(s, whole, parts[i]);
    for (std::size_t a = 0; a < ri.rows(); ++a)
      for (std::size_t b = 0; b < ri.cols(); ++b) res(start[i] + a, b) = ri(a, b);
  }
  r.checked = static_cast<long>(rows.size()) + 2;
  if (!(agree * res).is_zero()) r.fail("restrictions of a global section disagree on an overlap");
  if (rank(res) != whole.dim()) r.fail("restriction to the cover is not injective");
  if (equalizer_dim != whole.dim())
    r.fail("equalizer has dimension " + std::to_string(equalizer_dim) + ", sections " + std::to_string(whole.dim()));
  return r;
}

/// Sections over St(F) project isomorphically onto V_F (F is initial in its
/// star), and sections over the star of a face F' of F land in V_F through sigma.
inline CheckReport stalk_check(const CoefficientSystem& s) {
  CheckReport r("stalks: " + s.name);
  for (std::size_t f = 0; f < s.window.size(); ++f) {
    SectionSpace st = sections(s, s.window.star(f));
    Matrix at_f = st.component(f, s.dims[f]);
    ++r.checked;
    if (st.dim() != s.dims[f] || rank(at_f) != s.dims[f])
      r.fail("sections over St(" + s.window[f].id() + ") have dimension " + std::to_string(st.dim()) + ", stalk " + std::to_string(s.dims[f]));
    for (auto f1 : s.window.faces(f)) {
      if (f1 == f) continue;
      SectionSpace big = sections(s, s.window.star(f1));
      ++r.checked;
      if (!(big.component(f, s.dims[f]) == s.sigma(f1, f) * big.component(f1, s.dims[f1])))
        r.fail("germ at " + s.window[f].id() + " does not factor through " + s.window[f1].id());
    }
  }
  return r;
}

/// The stalks agree with coinvariants recomputed by full enumeration of the
/// finite image, and at interior points z of every edge the group U_z^(e)
/// gives the value of the edge (constancy along facets).
inline std::vector<CheckReport> stalk_coinvariant_check(const SmoothRep& v, long e, const ConstructibleSheaf& sh) {
  CheckReport eq("stalk = coinvariants: " + v.name), flat("facet constancy: " + v.name);
  static const Apartment a1(RootDatum::preset("A1"));
  const auto& w = sh.system.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    ++eq.checked;
    Quotient brute = coinvariants_enumerated(v, w[i], e);
    if (!detail::same_kernel(sh.values[i].proj, brute.proj)) eq.fail("relations differ at " + w[i].id());
    if (w[i].is_vertex()) continue;
    Standardized st = standardize(v.p, w[i]);
    const Point& x = st.facet.vertices[0];
    const Point& y = st.facet.vertices[1];
    for (Rational t : {Rational(1, 3), Rational(1, 2), Rational(3, 4)}) {
      Point z{(Rational(1) - t) * x[0] + t * y[0]};
      std::vector<ExactSL2> basis;
      for (const auto& g : ordered_basis(v.p, filtration_spec(ApartmentFacet({z}), e))) basis.push_back(g.conjugate_by(st.h.inverse()));
      ++flat.checked;
      if (!detail::same_kernel(sh.values[i].proj, coinvariants(v, basis).proj))
        flat.fail("value at the point " + to_string(t) + " of " + w[i].id() + " differs from the edge value");
    }
  }
  return {eq, flat};
}

/// Stalkwise exactness of 0 -> V' -> V -> V'' -> 0 under coinvariants.
struct ExactnessRow {
  std::string facet;
  std::size_t d_sub = 0, d_mid = 0, d_quot = 0;
  nlohmann::json to_json() const { return {{"facet", facet}, {"dims", {d_sub, d_mid, d_quot}}}; }
};

struct ExactnessReport {
  CheckReport check{"stalkwise exactness"};
  std::vector<ExactnessRow> rows;

  nlohmann::json to_json() const {
    nlohmann::json j = check.to_json();
    for (const auto& r : rows) j["facets"].push_back(r.to_json());
    return j;
  }
};

inline ExactnessReport exactness_check(const SmoothRep& sub, const SmoothRep& mid, const SmoothRep& quot, const Matrix& phi,
                                       const Matrix& psi, long e, const Window& w) {
  ExactnessReport out;
  out.check.name = "stalkwise exactness: " + sub.name + " -> " + mid.name + " -> " + quot.name;
  for (const auto& f : w.facets()) {
    Quotient a = coinvariants(sub, f, e), b = coinvariants(mid, f, e), c = coinvariants(quot, f, e);
    out.rows.push_back({f.id(), a.dim(), b.dim(), c.dim()});
    ++out.check.checked;
    auto fa = induced_map(a, b, phi), fb = induced_map(b, c, psi);
    if (!fa || !fb) {
      out.check.fail("maps do not descend to coinvariants at " + f.id());
      continue;
    }
    if (!(*fb * *fa).is_zero()) out.check.fail("composition is not zero at " + f.id());
    if (rank(*fa) != a.dim()) out.check.fail("first map not injective at " + f.id());
    if (rank(*fb) != c.dim()) out.check.fail("second map not surjective at " + f.id());
    if (a.dim() + c.dim() != b.dim())
      out.check.fail("dimensions " + std::to_string(a.dim()) + " - " + std::to_string(b.dim()) + " + " + std::to_string(c.dim()) + " != 0 at " + f.id());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Module sheaf in the smooth range and the comparison with the dual sheaf.

/// r = p^-rho with 1/(p-1) < rho <= 1, and H_(r) = H forced by the bracket.
inline HrBracket smooth_range_bracket(int p, const Rational& rho, long e) {
  if (rho <= Rational(1, p - 1) || rho > Rational(1))
    throw std::domain_error("r = p^-" + to_string(rho) + " is outside the smooth range [1/p, p^(-1/(p-1)))");
  HrBracket b = hr_bracket(p, rho, e);
  if (b.inner_level != b.outer_level) throw std::domain_error("H_(r) is not determined at r = p^-" + to_string(rho));
  return b;
}

/// F -> M_r(U_F^(e)) = D_r(U) (x)_{D(U)} M for M the dual of V.  In the smooth
/// range this is K[U/U_(r)] (x)_{K[U]} M with U_(r) = U, i.e. M modulo every
/// element of the finite image of U.  The face maps come from the inclusion
/// of images, which is checked element by element.
inline ConstructibleSheaf mr_system(const SmoothRep& v, const Rational& rho, long e, const Window& w) {
  smooth_range_bracket(v.p, rho, e);
  SmoothRep m = dual(v);
  std::vector<Quotient> values;
  std::vector<KeySet> images;
  for (const auto& f : w.facets()) {
    auto elts = enumerate_image(m, f, e);
    KeySet keys;
    for (const auto& g : elts) keys.insert(g.key());
    images.push_back(std::move(keys));
    values.push_back(detail::quotient_by_fixing(m, elts));
  }
  for (std::size_t f = 0; f < w.size(); ++f)
    for (auto f1 : w.faces(f))
      for (auto k : images[f1])
        if (!images[f].count(k)) throw std::logic_error("image at " + w[f1].id() + " is not inside the image at " + w[f].id());
  return sheaf_of_quotients(w, v.p, "M_r for dual(" + v.name + "), rho = " + to_string(rho), std::move(values));
}

struct ComparisonReport {
  HrBracket bracket;
  CheckReport square{"comparison square"};
  CheckReport iso{"comparison isomorphism"};
  ConstructibleSheaf mr, dual_sheaf;
  std::vector<Matrix> f;  // f_r^F : M_r(F) -> (dual V)_F

  nlohmann::json to_json() const {
    return {{"bracket", bracket.to_json()}, {"square", square.to_json()}, {"isomorphism", iso.to_json()}};
  }
};

/// f_r^{F} sigma_r^{F'F} = pr^{F'F} f_r^{F'} on every face pair, f_r^F invertible.
inline ComparisonReport comparison_check(const SmoothRep& v, const Rational& rho, long e, const Window& w) {
  ComparisonReport out;
  out.bracket = smooth_range_bracket(v.p, rho, e);
  out.square.name = "comparison square: " + v.name;
  out.iso.name = "comparison isomorphism: " + v.name;
  out.mr = mr_system(v, rho, e, w);
  out.dual_sheaf = ss_sheaf(dual(v), e, w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Quotient& src = out.mr.values[i];
    const Quotient& dst = out.dual_sheaf.values[i];
    auto fi = induced_map(src, dst, Matrix::identity(src.ambient()));
    ++out.iso.checked;
    if (!fi) {
      out.iso.fail("f_r is not defined at " + w[i].id());
      fi = dst.proj * src.section;
    } else if (src.dim() != dst.dim() || rank(*fi) != dst.dim()) {
      out.iso.fail("f_r is not invertible at " + w[i].id());
    }
    out.f.push_back(*fi);
  }
  for (std::size_t f = 0; f < w.size(); ++f)
    for (auto f1 : w.faces(f)) {
      ++out.square.checked;
      if (!(out.f[f] * out.mr.system.sigma(f1, f) == out.dual_sheaf.system.sigma(f1, f) * out.f[f1]))
        out.square.fail("square does not commute for " + w[f1].id() + " <= " + w[f].id());
    }
  return out;
}

/// For a map phi: V -> V' the dual map phi^T: M' -> M induces maps on both
/// systems; the comparison maps intertwine them at every facet.
inline CheckReport comparison_naturality(const ComparisonReport& src, const ComparisonReport& dst, const Matrix& phi,
                                         const std::string& label) {
  CheckReport r("comparison naturality: " + label);
  // src belongs to V, dst to V'; the module map goes M' -> M
  Matrix dual_map = phi.transpose();
  const auto& w = src.mr.system.window;
  for (std::size_t i = 0; i < w.size(); ++i) {
    ++r.checked;
    auto on_mr = induced_map(dst.mr.values[i], src.mr.values[i], dual_map);
    auto on_dual = induced_map(dst.dual_sheaf.values[i], src.dual_sheaf.values[i], dual_map);
    if (!on_mr || !on_dual) {
      r.fail("dual map does not descend at " + w[i].id());
      continue;
    }
    if (!(src.f[i] * *on_mr == *on_dual * dst.f[i])) r.fail("naturality square fails at " + w[i].id());
    for (auto f1 : w.faces(i)) {
      auto lower = induced_map(dst.dual_sheaf.values[f1], src.dual_sheaf.values[f1], dual_map);
      ++r.checked;
      if (!lower || !(src.dual_sheaf.system.sigma(f1, i) * *lower == *on_dual * dst.dual_sheaf.system.sigma(f1, i)))
        r.fail("induced map is not a map of sheaves at " + w[f1].id() + " <= " + w[i].id());
    }
  }
  return r;
}

}  // namespace bts
