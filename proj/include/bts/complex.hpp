#pragma once

// A finite window of a polysimplicial complex: facets with the face relation
// F' <= F iff F' lies in the closure of F.  Works for any facet type with a
// free is_face(sub, f) and operator<.

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

template <class Facet>
class Complex {
 public:
  Complex() = default;
  explicit Complex(std::vector<Facet> facets) : facets_(std::move(facets)) {
    std::sort(facets_.begin(), facets_.end(), [](const Facet& a, const Facet& b) {
      if (a.dimension() != b.dimension()) return a.dimension() < b.dimension();
      return a < b;
    });
    facets_.erase(std::unique(facets_.begin(), facets_.end()), facets_.end());
    const std::size_t n = facets_.size();
    for (std::size_t i = 0; i < n; ++i) index_[facets_[i]] = i;
    up_.assign(n, {});
    down_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (is_face(facets_[i], facets_[j])) {
          up_[i].push_back(j);
          down_[j].push_back(i);
        }
  }

  std::size_t size() const { return facets_.size(); }
  const Facet& operator[](std::size_t i) const { return facets_[i]; }
  const std::vector<Facet>& facets() const { return facets_; }

  std::size_t index(const Facet& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) throw std::out_of_range("facet not in window");
    return it->second;
  }
  bool contains(const Facet& f) const { return index_.count(f) > 0; }

  bool leq(std::size_t a, std::size_t b) const { return std::binary_search(up_[a].begin(), up_[a].end(), b); }

  /// St(F) within the window: all F'' with F <= F'' (F included).
  const std::vector<std::size_t>& star(std::size_t i) const { return up_[i]; }
  /// All faces of F in the window (F included).
  const std::vector<std::size_t>& faces(std::size_t i) const { return down_[i]; }

  /// Union of stars, as a sorted index set (an open subset of the window).
  std::vector<std::size_t> star_union(const std::vector<std::size_t>& centers) const {
    std::vector<std::size_t> out;
    for (auto c : centers) out.insert(out.end(), up_[c].begin(), up_[c].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<std::size_t> of_dimension(std::size_t d) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (facets_[i].dimension() == d) out.push_back(i);
    return out;
  }

 private:
  std::vector<Facet> facets_;
  std::map<Facet, std::size_t> index_;
  std::vector<std::vector<std::size_t>> up_, down_;
};

/// Graphviz export of a one-dimensional window: vertices become nodes, edges
/// become undirected edges.  `label` names every facet; `attrs` may add extra
/// attributes (colour, ...) and returns "" for none.
template <class Facet>
std::string to_dot(const Complex<Facet>& cx, const std::function<std::string(std::size_t)>& label,
                   const std::function<std::string(std::size_t)>& attrs = {}) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') q += '\\';
      q += ch;
    }
    return q + "\"";
  };
  auto extra = [&](std::size_t i) {
    std::string a = attrs ? attrs(i) : std::string();
    return a.empty() ? std::string() : ", " + a;
  };
  std::ostringstream os;
  os << "graph window {\n  node [shape=box, fontsize=10];\n";
  for (std::size_t i = 0; i < cx.size(); ++i)
    if (cx[i].dimension() == 0) os << "  f" << i << " [label=" << quote(label(i)) << extra(i) << "];\n";
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx[i].dimension() != 1) continue;
    std::vector<std::size_t> ends;
    for (auto j : cx.faces(i))
      if (cx[j].dimension() == 0) ends.push_back(j);
    if (ends.size() != 2) throw std::invalid_argument("edge without both endpoints in the window");
    os << "  f" << ends[0] << " -- f" << ends[1] << " [label=" << quote(label(i)) << extra(i) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace bts
