#pragma once

// Root systems given by a Cartan matrix, with explicitly enumerated Weyl groups.
//
// Coordinates: roots in the basis of simple roots, coroots in the basis of
// simple coroots, weights in the basis of fundamental weights (so that
// chi(alpha_j^vee) is the j-th coordinate of chi).

#include "bts/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

using IntVec = std::vector<long long>;
using IntMatrix = std::vector<IntVec>;

struct Weight {
  std::vector<Rational> coords;

  bool is_integral() const {
    return std::all_of(coords.begin(), coords.end(), [](const Rational& q) { return q.denominator() == 1; });
  }
  friend bool operator==(const Weight&, const Weight&) = default;
  friend bool operator<(const Weight& a, const Weight& b) { return a.coords < b.coords; }
};

class RootDatum {
 public:
  static constexpr std::size_t kMaxWeylOrder = 10000;

  explicit RootDatum(IntMatrix cartan, std::string name = "custom") : name_(std::move(name)), cartan_(std::move(cartan)) {
    const std::size_t l = cartan_.size();
    for (const auto& row : cartan_)
      if (row.size() != l) throw std::invalid_argument("Cartan matrix must be square");
    for (std::size_t i = 0; i < l; ++i)
      if (cartan_[i][i] != 2) throw std::invalid_argument("Cartan matrix needs 2 on the diagonal");
    build_roots();
    build_weyl();
  }

  static RootDatum preset(const std::string& key) {
    if (key == "A1") return RootDatum({{2}}, "A1");
    if (key == "A2") return RootDatum({{2, -1}, {-1, 2}}, "A2");
    if (key == "torus" || key == "A0") return RootDatum({}, "torus");
    throw std::invalid_argument("unknown root datum preset '" + key + "' (expected A1, A2)");
  }

  const std::string& name() const { return name_; }
  std::size_t rank() const { return cartan_.size(); }
  const IntMatrix& cartan() const { return cartan_; }
  const std::vector<IntVec>& roots() const { return roots_; }
  const std::vector<IntVec>& coroots() const { return coroots_; }
  const std::vector<std::size_t>& positive() const { return positive_; }
  const std::vector<IntMatrix>& weyl_group() const { return weyl_; }

  bool is_positive(std::size_t i) const {
    return std::all_of(roots_[i].begin(), roots_[i].end(), [](long long c) { return c >= 0; });
  }

  /// <alpha, beta^vee> for roots/coroots given in simple coordinates.
  long long pairing(const IntVec& root, const IntVec& coroot) const {
    long long s = 0;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) s += root[i] * coroot[j] * cartan_[i][j];
    return s;
  }

  /// A root written in fundamental-weight coordinates.
  Weight root_weight(const IntVec& root) const {
    Weight w;
    for (std::size_t j = 0; j < rank(); ++j) {
      long long s = 0;
      for (std::size_t i = 0; i < rank(); ++i) s += root[i] * cartan_[i][j];
      w.coords.emplace_back(s);
    }
    return w;
  }

  Rational evaluate(const Weight& chi, const IntVec& coroot) const {
    Rational s = 0;
    for (std::size_t j = 0; j < rank(); ++j) s += chi.coords[j] * Rational(coroot[j]);
    return s;
  }

  Weight apply(const IntMatrix& w, const Weight& chi) const {
    Weight out;
    for (std::size_t i = 0; i < rank(); ++i) {
      Rational s = 0;
      for (std::size_t j = 0; j < rank(); ++j) s += Rational(w[i][j]) * chi.coords[j];
      out.coords.push_back(s);
    }
    return out;
  }

  std::size_t index_of_root(const IntVec& r) const {
    auto it = std::find(roots_.begin(), roots_.end(), r);
    if (it == roots_.end()) throw std::invalid_argument("not a root");
    return static_cast<std::size_t>(it - roots_.begin());
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name_;
    j["rank"] = rank();
    j["cartan"] = cartan_;
    j["roots"] = roots_;
    j["coroots"] = coroots_;
    std::vector<IntVec> pos;
    for (auto i : positive_) pos.push_back(roots_[i]);
    j["positive_roots"] = pos;
    j["weyl_group"] = weyl_;
    return j;
  }

 private:
  void build_roots() {
    const std::size_t l = rank();
    std::vector<std::pair<IntVec, IntVec>> pairs;
    std::set<IntVec> seen;
    for (std::size_t i = 0; i < l; ++i) {
      IntVec e(l, 0);
      e[i] = 1;
      pairs.emplace_back(e, e);
      seen.insert(e);
    }
    for (std::size_t cur = 0; cur < pairs.size(); ++cur) {
      for (std::size_t i = 0; i < l; ++i) {
        IntVec ei(l, 0);
        ei[i] = 1;
        auto [root, coroot] = pairs[cur];
        long long a = pairing(root, ei);
        long long b = pairing(ei, coroot);
        root[i] -= a;
        coroot[i] -= b;
        if (seen.insert(root).second) pairs.emplace_back(root, coroot);
        if (pairs.size() > 4 * kMaxWeylOrder) throw std::invalid_argument("root system too large (not finite type?)");
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
      long long hx = 0, hy = 0;
      for (auto c : x.first) hx += c;
      for (auto c : y.first) hy += c;
      if (hx != hy) return hx > hy;
      return x.first > y.first;
    });
    for (auto& [r, c] : pairs) {
      roots_.push_back(r);
      coroots_.push_back(c);
    }
    for (std::size_t i = 0; i < roots_.size(); ++i)
      if (is_positive(i)) positive_.push_back(i);
  }

  void build_weyl() {
    const std::size_t l = rank();
    IntMatrix id(l, IntVec(l, 0));
    for (std::size_t i = 0; i < l; ++i) id[i][i] = 1;
    std::vector<IntMatrix> gens;
    for (std::size_t i = 0; i < l; ++i) {
      // (s_i chi)_j = chi_j - chi_i C_ij
      IntMatrix s = id;
      for (std::size_t j = 0; j < l; ++j) s[j][i] -= cartan_[i][j];
      gens.push_back(s);
    }
    std::set<IntMatrix> seen{id};
    weyl_.push_back(id);
    for (std::size_t cur = 0; cur < weyl_.size(); ++cur) {
      for (const auto& s : gens) {
        IntMatrix prod(l, IntVec(l, 0));
        for (std::size_t a = 0; a < l; ++a)
          for (std::size_t b = 0; b < l; ++b)
            for (std::size_t c = 0; c < l; ++c) prod[a][b] += s[a][c] * weyl_[cur][c][b];
        if (seen.insert(prod).second) {
          weyl_.push_back(prod);
          if (weyl_.size() > kMaxWeylOrder) throw std::invalid_argument("Weyl group exceeds enumeration bound");
        }
      }
    }
  }

  std::string name_;
  IntMatrix cartan_;
  std::vector<IntVec> roots_;
  std::vector<IntVec> coroots_;
  std::vector<std::size_t> positive_;
  std::vector<IntMatrix> weyl_;
};

/// Half the sum of the positive roots.
inline Weight rho(const RootDatum& datum) {
  Weight r;
  r.coords.assign(datum.rank(), Rational(0));
  for (auto i : datum.positive()) {
    Weight a = datum.root_weight(datum.roots()[i]);
    for (std::size_t j = 0; j < datum.rank(); ++j) r.coords[j] += a.coords[j] / 2;
  }
  return r;
}

/// chi(alpha^vee) is not a negative integer for any positive root alpha.
inline bool is_dominant(const Weight& chi, const RootDatum& datum) {
  for (auto i : datum.positive()) {
    Rational v = datum.evaluate(chi, datum.coroots()[i]);
    if (v.denominator() == 1 && v.numerator() <= -1) return false;
  }
  return true;
}

/// No nontrivial Weyl element fixes chi.
inline bool is_regular(const Weight& chi, const RootDatum& datum) {
  const auto& w = datum.weyl_group();
  for (std::size_t i = 1; i < w.size(); ++i)
    if (datum.apply(w[i], chi) == chi) return false;
  return true;
}

inline std::set<Weight> weyl_orbit(const Weight& chi, const RootDatum& datum) {
  std::set<Weight> orbit;
  for (const auto& w : datum.weyl_group()) orbit.insert(datum.apply(w, chi));
  return orbit;
}

}  // namespace bts
