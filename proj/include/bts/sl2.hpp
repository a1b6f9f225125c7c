#pragma once

// 2x2 matrices over a p-adic scalar type and the SL2 elements built from them.
//
// Two scalar types are supported through scalar_traits:
//   BigRational  exact elements of Q inside Q_p; valuations are exact.
//   Padic        capped-precision p-adics; tests against a level may raise
//                PrecisionError when a cancelled entry is not known far enough.

#include "bts/padic.hpp"
#include "bts/rational.hpp"
#include "bts/xreal.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace bts {

template <class K>
struct scalar_traits;

template <>
struct scalar_traits<BigRational> {
  static BigRational one_like(const BigRational&) { return 1; }
  static BigRational zero_like(const BigRational&) { return 0; }
  static bool is_zero(const BigRational& x) { return x == 0; }
  static long valuation(const BigRational& x, int p) { return x == 0 ? kInfiniteValuation : valuation_of(x, p); }
  static bool meets(const BigRational& x, int p, const XReal& level) { return level.satisfied_by(valuation(x, p)); }
  static BigRational power_of_p(const BigRational&, int p, long v) {
    return v >= 0 ? BigRational(ipow(p, v)) : BigRational(1) / BigRational(ipow(p, -v));
  }
  static BigRational from_rational(const BigRational&, const BigRational& q) { return q; }
  static std::string to_string(const BigRational& x) { return x.str(); }
};

template <>
struct scalar_traits<Padic> {
  static Padic one_like(const Padic& x) { return Padic::from_integer(x.prime(), x.cap(), 1); }
  static Padic zero_like(const Padic& x) { return Padic::exact_zero(x.prime(), x.cap()); }
  static bool is_zero(const Padic& x) { return x.is_zero(); }
  static long valuation(const Padic& x, int) { return x.valuation(); }
  static bool meets(const Padic& x, int, const XReal& level) {
    if (x.is_exact_zero() || !x.is_zero()) return level.satisfied_by(x.valuation_lower_bound());
    // O(p^a): every completion has v >= a
    if (level.satisfied_by(x.abs_precision())) return true;
    throw PrecisionError("precision exhausted deciding v >= " + level.to_string() + " for " + x.to_string());
  }
  static Padic power_of_p(const Padic& x, int p, long v) { return Padic::from_unit(p, x.cap(), v, 1, x.cap()); }
  static Padic from_rational(const Padic& x, const BigRational& q) { return Padic::from_rational(x.prime(), x.cap(), q); }
  static std::string to_string(const Padic& x) { return x.to_string(); }
};

template <class K>
struct Mat2 {
  using traits = scalar_traits<K>;
  std::array<K, 4> e;  // row-major: a b / c d

  const K& a() const { return e[0]; }
  const K& b() const { return e[1]; }
  const K& c() const { return e[2]; }
  const K& d() const { return e[3]; }

  static Mat2 of(K a, K b, K c, K d) { return Mat2{{std::move(a), std::move(b), std::move(c), std::move(d)}}; }

  K det() const { return e[0] * e[3] - e[1] * e[2]; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return of(x.e[0] * y.e[0] + x.e[1] * y.e[2], x.e[0] * y.e[1] + x.e[1] * y.e[3],
              x.e[2] * y.e[0] + x.e[3] * y.e[2], x.e[2] * y.e[1] + x.e[3] * y.e[3]);
  }

  friend bool operator==(const Mat2& x, const Mat2& y) {
    for (int i = 0; i < 4; ++i)
      if (!(x.e[i] == y.e[i])) return false;
    return true;
  }

  Mat2 inverse() const {
    K dt = det();
    if (traits::is_zero(dt)) throw PadicDomainError("singular matrix");
    K inv = traits::one_like(dt) / dt;
    return of(e[3] * inv, -e[1] * inv, -e[2] * inv, e[0] * inv);
  }

  std::string to_string() const {
    return "[[" + traits::to_string(e[0]) + ", " + traits::to_string(e[1]) + "], [" + traits::to_string(e[2]) + ", " +
           traits::to_string(e[3]) + "]]";
  }
};

/// An element of SL2(Q_p); the determinant is checked on construction.
template <class K>
class SL2 {
 public:
  using traits = scalar_traits<K>;

  explicit SL2(Mat2<K> m) : m_(std::move(m)) {
    K dt = m_.det();
    if (!(dt == traits::one_like(dt))) throw std::invalid_argument("determinant is not 1: " + m_.to_string());
  }

  static SL2 identity(const K& like) {
    K one = traits::one_like(like), zero = traits::zero_like(like);
    return SL2(Mat2<K>::of(one, zero, zero, one), Unchecked{});
  }
  static SL2 upper(const K& x) {
    K one = traits::one_like(x), zero = traits::zero_like(x);
    return SL2(Mat2<K>::of(one, x, zero, one), Unchecked{});
  }
  static SL2 lower(const K& x) {
    K one = traits::one_like(x), zero = traits::zero_like(x);
    return SL2(Mat2<K>::of(one, zero, x, one), Unchecked{});
  }
  /// diag(t, 1/t)
  static SL2 torus(const K& t) {
    K zero = traits::zero_like(t);
    return SL2(Mat2<K>::of(t, zero, zero, traits::one_like(t) / t), Unchecked{});
  }

  const Mat2<K>& matrix() const { return m_; }
  const K& operator[](int i) const { return m_.e[static_cast<std::size_t>(i)]; }

  friend SL2 operator*(const SL2& x, const SL2& y) { return SL2(x.m_ * y.m_, Unchecked{}); }
  friend bool operator==(const SL2& x, const SL2& y) { return x.m_ == y.m_; }

  SL2 inverse() const {
    const auto& e = m_.e;
    return SL2(Mat2<K>::of(e[3], -e[1], -e[2], e[0]), Unchecked{});
  }

  SL2 pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    SL2 r = identity(m_.e[0]), base = *this;
    while (n > 0) {
      if (n & 1) r = r * base;
      base = base * base;
      n >>= 1;
    }
    return r;
  }

  SL2 conjugate_by(const SL2& h) const { return h * *this * h.inverse(); }

  bool is_identity() const { return *this == identity(m_.e[0]); }

  std::string to_string() const { return m_.to_string(); }

 private:
  struct Unchecked {};
  SL2(Mat2<K> m, Unchecked) : m_(std::move(m)) {}

  Mat2<K> m_;
};

template <class K>
SL2<K> commutator(const SL2<K>& g, const SL2<K>& h) {
  return g.inverse() * h.inverse() * g * h;
}

using ExactSL2 = SL2<BigRational>;

/// Parses "[[a,b],[c,d]]" with entries in the Padic grammar ("-3/4", "3^2*5", ...).
inline Mat2<BigRational> parse_matrix(int p, std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != '[' && ch != ']') s += ch;
  std::array<BigRational, 4> out;
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t comma = s.find(',', pos);
    if ((i < 3) != (comma != std::string::npos)) throw std::invalid_argument("matrix needs 4 entries: " + std::string(text));
    std::string entry = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? s.size() : comma + 1;
    // "p^v*u": exact power of p times a rational
    auto caret = entry.find('^');
    if (caret != std::string::npos) {
      auto star = entry.find('*');
      long base = std::stol(entry.substr(0, caret));
      if (base != p) throw std::invalid_argument("entry '" + entry + "' uses the wrong prime");
      long v = std::stol(entry.substr(caret + 1, star == std::string::npos ? std::string::npos : star - caret - 1));
      BigRational u = star == std::string::npos ? BigRational(1) : to_big(parse_rational(entry.substr(star + 1)));
      out[static_cast<std::size_t>(i)] = scalar_traits<BigRational>::power_of_p(0, p, v) * u;
    } else {
      out[static_cast<std::size_t>(i)] = to_big(parse_rational(entry));
    }
  }
  return Mat2<BigRational>{out};
}

template <class K>
Mat2<Padic> to_padic(const Mat2<K>& m, const PadicContext& ctx) {
  Mat2<Padic> out;
  for (int i = 0; i < 4; ++i) out.e[static_cast<std::size_t>(i)] = ctx.rational(m.e[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace bts
