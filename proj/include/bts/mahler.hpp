#pragma once

// Mahler expansions f(x) = sum_alpha c_alpha C(x, alpha) on Z_p^d, truncated at
// total degree N, and the conversion from power series through Stirling numbers.

#include "bts/padic.hpp"
#include "bts/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bts {

using MultiIndex = std::vector<long>;

/// All alpha in N_0^d with |alpha| <= n, ordered by degree and then lexicographically.
inline std::vector<MultiIndex> multi_indices(std::size_t d, long n) {
  std::vector<MultiIndex> out;
  for (long deg = 0; deg <= n; ++deg) {
    MultiIndex a(d, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
      if (i + 1 == d) {
        a[i] = left;
        out.push_back(a);
        return;
      }
      for (long k = left; k >= 0; --k) {
        a[i] = k;
        rec(i + 1, left - k);
      }
    };
    if (d == 0) {
      if (deg == 0) out.push_back(a);
    } else {
      rec(0, deg);
    }
  }
  return out;
}

inline long degree(const MultiIndex& a) {
  long s = 0;
  for (long x : a) s += x;
  return s;
}

/// Position of alpha in multi_indices(d, n).
class IndexTable {
 public:
  IndexTable() = default;
  IndexTable(std::size_t d, long n) : d_(d), n_(n), list_(multi_indices(d, n)) {
    for (std::size_t i = 0; i < list_.size(); ++i) pos_[list_[i]] = i;
  }
  std::size_t dim() const { return d_; }
  long order() const { return n_; }
  std::size_t size() const { return list_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return list_[i]; }
  std::optional<std::size_t> find(const MultiIndex& a) const {
    auto it = pos_.find(a);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::size_t d_ = 0;
  long n_ = 0;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, std::size_t> pos_;
};

/// What is known about the coefficients beyond the truncation order:
/// all zero, v(c_alpha) >= offset + slope * |alpha|, or nothing.
struct TailBound {
  enum class Kind { Exact, Affine, Unknown };
  Kind kind = Kind::Exact;
  Rational offset{0};
  Rational slope{0};

  static TailBound zero() { return {}; }
  static TailBound affine(Rational offset, Rational slope) { return {Kind::Affine, offset, slope}; }
  static TailBound unknown() { return {Kind::Unknown, Rational(0), Rational(0)}; }

  bool exact() const { return kind == Kind::Exact; }
  bool known() const { return kind != Kind::Unknown; }

  std::string to_string() const {
    switch (kind) {
      case Kind::Exact: return "exact";
      case Kind::Unknown: return "unknown";
      case Kind::Affine: break;
    }
    return "v >= " + bts::to_string(offset) + " + " + bts::to_string(slope) + "*|alpha|";
  }
};

struct MahlerSeries {
  int p = 3;
  IndexTable index;
  std::vector<Padic> coeffs;
  TailBound tail;

  std::size_t dim() const { return index.dim(); }
  long order() const { return index.order(); }

  const Padic& coeff(const MultiIndex& a) const {
    auto i = index.find(a);
    if (!i) throw std::out_of_range("index beyond truncation");
    return coeffs[*i];
  }
};

/// Forward differences (Delta^alpha f)(0) = sum_{beta <= alpha} (-1)^|alpha - beta| prod C(alpha_i, beta_i) f(beta).
template <class V>
std::vector<V> forward_differences(const IndexTable& idx, const std::vector<V>& values,
                                   const std::function<V(const BigInt&)>& lift) {
  std::vector<V> out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const MultiIndex& a = idx[i];
    V acc = lift(0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const MultiIndex& b = idx[j];
      BigInt coef = 1;
      bool below = true;
      for (std::size_t k = 0; k < a.size() && below; ++k) {
        if (b[k] > a[k]) {
          below = false;
          break;
        }
        BigInt c = 1;
        for (long t = 0; t < b[k]; ++t) c = c * (a[k] - t) / (t + 1);
        coef *= c;
      }
      if (!below) continue;
      if ((degree(a) - degree(b)) % 2) coef = -coef;
      acc = acc + values[j] * lift(coef);
    }
    out.push_back(acc);
  }
  return out;
}

/// c_alpha from exact rational samples of f on the grid {|beta| <= n}.  Samples
/// say nothing about higher coefficients, so the tail is unknown.
inline MahlerSeries mahler_coeffs(const PadicContext& ctx, std::size_t d, long n,
                                  const std::function<BigRational(const MultiIndex&)>& f) {
  MahlerSeries s{ctx.p, IndexTable(d, n), {}, TailBound::unknown()};
  std::vector<BigRational> values;
  for (std::size_t i = 0; i < s.index.size(); ++i) values.push_back(f(s.index[i]));
  auto diffs = forward_differences<BigRational>(s.index, values, [](const BigInt& z) { return BigRational(z); });
  for (const auto& c : diffs) s.coeffs.push_back(ctx.rational(c));
  return s;
}

/// Same with a p-adic sample oracle.
inline MahlerSeries mahler_coeffs_padic(const PadicContext& ctx, std::size_t d, long n,
                                        const std::function<Padic(const MultiIndex&)>& f) {
  MahlerSeries s{ctx.p, IndexTable(d, n), {}, TailBound::unknown()};
  std::vector<Padic> values;
  for (std::size_t i = 0; i < s.index.size(); ++i) values.push_back(f(s.index[i]));
  s.coeffs = forward_differences<Padic>(s.index, values, [&](const BigInt& z) { return ctx.integer(z); });
  return s;
}

/// Partial sum sum_{|alpha| <= N} c_alpha prod C(x_i, alpha_i).
inline Padic eval_mahler(const MahlerSeries& s, const std::vector<Padic>& x) {
  if (x.size() != s.dim()) throw std::invalid_argument("point has the wrong dimension");
  Padic acc = Padic::exact_zero(s.p, s.coeffs.empty() ? 1 : s.coeffs[0].cap());
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    Padic term = s.coeffs[i];
    for (std::size_t k = 0; k < x.size(); ++k) term = term * padic_binomial(x[k], s.index[i][k]);
    acc += term;
  }
  return acc;
}

/// Stirling numbers of the second kind: x^n = sum_k S(n,k) (x)_k.
inline BigInt stirling(long n, long k) {
  if (n < 0 || k < 0) throw std::invalid_argument("negative Stirling index");
  if (k > n) return 0;
  std::vector<BigInt> row{1};  // S(0, .)
  for (long m = 1; m <= n; ++m) {
    std::vector<BigInt> next(static_cast<std::size_t>(m) + 1, 0);
    for (long j = 1; j <= m; ++j) {
      BigInt prev_j = j < static_cast<long>(row.size()) ? row[static_cast<std::size_t>(j)] : BigInt(0);
      next[static_cast<std::size_t>(j)] = j * prev_j + row[static_cast<std::size_t>(j - 1)];
    }
    row = std::move(next);
  }
  return row[static_cast<std::size_t>(k)];
}

/// Integer coefficients of the falling factorial (x)_k = x (x-1) ... (x-k+1), lowest degree first.
inline std::vector<BigInt> falling_factorial(long k) {
  std::vector<BigInt> poly{1};
  for (long j = 0; j < k; ++j) {
    std::vector<BigInt> next(poly.size() + 1, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * j;
    }
    poly = std::move(next);
  }
  return poly;
}

/// A one-variable power series sum a_n x^n given up to degree a.size()-1.  For
/// the omitted n, tail gives v(a_n) >= offset + slope * n (exact: a polynomial).
struct PowerSeries {
  std::vector<BigRational> a;
  TailBound tail;
};

/// c_k = k! sum_{n >= k} a_n S(n,k) for k <= order.
///
/// With an affine tail of slope s > 0 the omitted a_n change a retained c_k by
/// something of valuation >= offset + s (deg + 1), so each c_k is returned known
/// modulo that power of p.  For k > order, v(c_k) >= min_{n >= k} v(a_n) >= off + s k
/// where off also covers the retained a_n with n > order.
inline MahlerSeries power_to_mahler(const PadicContext& ctx, const PowerSeries& f, long order) {
  const long deg = static_cast<long>(f.a.size()) - 1;
  const int p = ctx.p;
  if (f.tail.kind == TailBound::Kind::Unknown) throw std::invalid_argument("power series needs a tail bound");
  if (!f.tail.exact() && f.tail.slope <= Rational(0)) throw std::invalid_argument("tail must decay geometrically");
  MahlerSeries s{p, IndexTable(1, order), {}, TailBound::zero()};
  std::optional<Padic> error;
  if (!f.tail.exact()) error = Padic::zero_to(p, ctx.precision, ceil_of(f.tail.offset + f.tail.slope * Rational(deg + 1)));
  BigInt fact = 1;
  for (long k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    BigRational b = 0;
    for (long n = k; n <= deg; ++n) b += f.a[static_cast<std::size_t>(n)] * BigRational(stirling(n, k));
    Padic c = ctx.rational(BigRational(fact) * b);
    s.coeffs.push_back(error ? c + *error : c);
  }
  Rational slope = f.tail.exact() ? Rational(0) : f.tail.slope;
  std::optional<Rational> off;
  if (!f.tail.exact()) off = f.tail.offset;
  for (long n = order + 1; n <= deg; ++n) {
    const BigRational& an = f.a[static_cast<std::size_t>(n)];
    if (an == 0) continue;
    Rational cand = Rational(valuation_of(an, p)) - slope * Rational(n);
    if (!off || cand < *off) off = cand;
  }
  if (off) s.tail = TailBound::affine(*off, slope);
  return s;
}

/// Exact rational c_k, for checks that must not depend on precision.
inline std::vector<BigRational> power_to_mahler_exact(const std::vector<BigRational>& a, long order) {
  const long deg = static_cast<long>(a.size()) - 1;
  std::vector<BigRational> out;
  BigInt fact = 1;
  for (long k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    BigRational b = 0;
    for (long n = k; n <= deg; ++n) b += a[static_cast<std::size_t>(n)] * BigRational(stirling(n, k));
    out.push_back(BigRational(fact) * b);
  }
  return out;
}

struct DecayReport {
  bool ok = true;
  long first_violation = -1;  // index k with v(c_k) < log_c_bound + k * s_exp
  Rational s_exponent{0};     // the claimed s = p^(-s_exponent)
  Rational observed{0};       // min over k >= 1 with c_k != 0 of (v(c_k) + log_p c) / k
  long checked = 0;

  nlohmann::json to_json() const {
    return {{"ok", ok}, {"first_violation", first_violation}, {"claimed_s", "p^-" + to_string(s_exponent)},
            {"tightest_s", "p^-" + to_string(observed)}, {"checked", checked}};
  }
};

/// Checks |c_k| <= c s^k with s = r_1 / R, r_1 = p^(-1/(p-1)), for R = p^rho and c = p^log_c,
/// i.e. v(c_k) >= -log_c + k (1/(p-1) + rho).  Coefficient valuations are exact.
inline DecayReport decay_check(int p, const std::vector<BigRational>& c, Rational log_c, Rational rho) {
  DecayReport r;
  r.s_exponent = Rational(1, p - 1) + rho;
  bool first = true;
  for (std::size_t k = 0; k < c.size(); ++k) {
    ++r.checked;
    if (c[k] == 0) continue;
    Rational v(valuation_of(c[k], p));
    if (v < -log_c + Rational(static_cast<long long>(k)) * r.s_exponent && r.ok) {
      r.ok = false;
      r.first_violation = static_cast<long>(k);
    }
    if (k >= 1) {
      Rational q = (v + log_c) / Rational(static_cast<long long>(k));
      if (first || q < r.observed) r.observed = q;
      first = false;
    }
  }
  return r;
}

inline DecayReport decay_check(const MahlerSeries& s, Rational log_c, Rational rho) {
  if (s.dim() != 1) throw std::invalid_argument("decay check is one-variable");
  std::vector<BigRational> c;
  for (const auto& x : s.coeffs) {
    if (!x.is_exact_zero() && x.is_zero()) throw PrecisionError("coefficient known only as " + x.to_string());
    c.push_back(x.representative());
  }
  return decay_check(s.p, c, log_c, rho);
}

inline nlohmann::json to_json(const MahlerSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < s.index.size(); ++i) coeffs.push_back({{"alpha", s.index[i]}, {"c", s.coeffs[i].to_string()}});
  return {{"p", s.p}, {"dim", s.dim()}, {"order", s.order()}, {"tail", s.tail.to_string()}, {"coeffs", coeffs}};
}

}  // namespace bts
