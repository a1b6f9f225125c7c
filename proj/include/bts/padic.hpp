#pragma once

// Exact p-adic numbers at a capped relative precision.
//
// A nonzero value is p^v * u + O(p^(v+k)) with u a unit known modulo p^k,
// 1 <= k <= cap.  Two kinds of zero exist: the exact zero, and a zero that
// is only known modulo p^a (all retained digits cancelled).  The latter is
// never allowed to masquerade as a number with a valuation: asking for its
// valuation or inverting it throws PrecisionError.

#include "bts/rational.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bts {

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PadicDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr long kInfiniteValuation = std::numeric_limits<long>::max();

namespace detail {

inline std::uint64_t pow_u64(int p, long k) {
  std::uint64_t r = 1;
  for (long i = 0; i < k; ++i) r *= static_cast<std::uint64_t>(p);
  return r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  // extended Euclid on signed 128-bit to stay clear of overflow
  __int128 t = 0, new_t = 1;
  __int128 r = static_cast<__int128>(m), new_r = static_cast<__int128>(a % m);
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw PadicDomainError("element is not invertible modulo p^k");
  if (t < 0) t += static_cast<__int128>(m);
  return static_cast<std::uint64_t>(t);
}

inline long strip(std::uint64_t& x, int p) {
  long t = 0;
  while (x % static_cast<std::uint64_t>(p) == 0) {
    x /= static_cast<std::uint64_t>(p);
    ++t;
  }
  return t;
}

}  // namespace detail

/// Largest relative precision representable for prime p (p^cap < 2^62).
inline int max_cap(int p) {
  int k = 0;
  unsigned __int128 acc = 1;
  while (acc * static_cast<unsigned>(p) < (static_cast<unsigned __int128>(1) << 62)) {
    acc *= static_cast<unsigned>(p);
    ++k;
  }
  return k;
}

inline void check_prime_and_cap(int p, int cap) {
  if (p < 3) throw std::invalid_argument("prime must be odd (p >= 3)");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw std::invalid_argument(std::to_string(p) + " is not prime");
  if (cap < 1 || cap > max_cap(p))
    throw std::invalid_argument("precision " + std::to_string(cap) + " out of range for p = " +
                                std::to_string(p));
}

class Padic {
 public:
  /// Default value: an exact zero that adopts the prime of whatever it meets.
  Padic() = default;

  static Padic exact_zero(int p, int cap) {
    Padic x;
    x.p_ = p;
    x.cap_ = cap;
    return x;
  }

  /// Zero known only modulo p^abs.
  static Padic zero_to(int p, int cap, long abs) {
    Padic x = exact_zero(p, cap);
    x.kind_ = Kind::Zero;
    x.v_ = abs;
    return x;
  }

  static Padic from_unit(int p, int cap, long v, std::uint64_t unit, int rel) {
    if (rel < 1 || rel > cap) throw std::invalid_argument("relative precision out of range");
    std::uint64_t m = detail::pow_u64(p, rel);
    unit %= m;
    if (unit % static_cast<std::uint64_t>(p) == 0) throw std::invalid_argument("unit divisible by p");
    Padic x = exact_zero(p, cap);
    x.kind_ = Kind::Unit;
    x.v_ = v;
    x.u_ = unit;
    x.k_ = rel;
    return x;
  }

  /// Integer known to the full relative precision `cap` (an exact 0 stays exact).
  static Padic from_integer(int p, int cap, const BigInt& n) {
    if (n == 0) return exact_zero(p, cap);
    long v = valuation_of(n, p);
    return from_big_unit(p, cap, v, n / ipow(p, v), 1, cap);
  }

  static Padic from_integer(int p, int cap, long long n) { return from_integer(p, cap, BigInt(n)); }

  /// Integer known only modulo p^abs_cap.
  static Padic from_integer(int p, int cap, const BigInt& n, long abs_cap) {
    if (n == 0) return zero_to(p, cap, abs_cap);
    long v = valuation_of(n, p);
    long rel = std::min<long>(cap, abs_cap - v);
    if (rel <= 0) return zero_to(p, cap, abs_cap);
    return from_big_unit(p, cap, v, n / ipow(p, v), 1, static_cast<int>(rel));
  }

  static Padic from_rational(int p, int cap, const BigRational& q) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (q == 0) return exact_zero(p, cap);
    BigInt num = numerator(q), den = denominator(q);
    long vn = valuation_of(num, p), vd = valuation_of(den, p);
    return from_big_unit(p, cap, vn - vd, num / ipow(p, vn), den / ipow(p, vd), cap);
  }

  static Padic from_rational(int p, int cap, const Rational& q) { return from_rational(p, cap, to_big(q)); }

  /// Digits d0 + d1 p + ... scaled by p^v; leading digit must be nonzero.
  static Padic from_digits(int p, int cap, long v, std::span<const int> digits) {
    if (digits.empty()) throw std::invalid_argument("no digits");
    if (static_cast<int>(digits.size()) > cap) throw std::invalid_argument("more digits than precision");
    std::uint64_t u = 0, pw = 1;
    for (int d : digits) {
      if (d < 0 || d >= p) throw std::invalid_argument("digit out of range");
      u += static_cast<std::uint64_t>(d) * pw;
      pw *= static_cast<std::uint64_t>(p);
    }
    return from_unit(p, cap, v, u, static_cast<int>(digits.size()));
  }

  int prime() const { return p_; }
  int cap() const { return cap_; }
  bool is_exact_zero() const { return kind_ == Kind::ExactZero; }
  /// Zero at the precision it is known to.
  bool is_zero() const { return kind_ != Kind::Unit; }

  long valuation() const {
    if (kind_ == Kind::ExactZero) return kInfiniteValuation;
    if (kind_ == Kind::Zero)
      throw PrecisionError("precision exhausted: value is O(" + std::to_string(p_) + "^" + std::to_string(v_) +
                           "), valuation unknown");
    return v_;
  }

  /// Valuation for nonzero values; the known lower bound for a cancelled zero.
  long valuation_lower_bound() const { return kind_ == Kind::ExactZero ? kInfiniteValuation : v_; }

  long abs_precision() const {
    switch (kind_) {
      case Kind::ExactZero: return kInfiniteValuation;
      case Kind::Zero: return v_;
      case Kind::Unit: return v_ + k_;
    }
    return 0;
  }

  int rel_precision() const { return kind_ == Kind::Unit ? k_ : 0; }
  std::uint64_t unit() const { return u_; }

  std::vector<int> digits() const {
    std::vector<int> out;
    std::uint64_t u = u_;
    for (int i = 0; i < k_; ++i) {
      out.push_back(static_cast<int>(u % static_cast<std::uint64_t>(p_)));
      u /= static_cast<std::uint64_t>(p_);
    }
    return out;
  }

  /// The rational p^v * u with 0 < u < p^k (0 for either zero).
  BigRational representative() const {
    if (kind_ != Kind::Unit) return 0;
    return scaled(BigInt(u_));
  }

  /// Same but with u taken in (-p^k/2, p^k/2], so small negative integers come back exactly.
  BigRational balanced_representative() const {
    if (kind_ != Kind::Unit) return 0;
    std::uint64_t m = detail::pow_u64(p_, k_);
    BigInt u(u_);
    if (u_ > m / 2) u -= BigInt(m);
    return scaled(u);
  }

  /// Representative of x mod p^m as an integer in [0, p^m); requires x in Z_p known mod p^m.
  BigInt residue(long m) const {
    if (kind_ == Kind::ExactZero) return 0;
    if (abs_precision() < m)
      throw PrecisionError("precision exhausted: need " + std::to_string(m) + " digits, have " +
                           std::to_string(abs_precision()));
    if (kind_ == Kind::Zero) return 0;
    if (v_ < 0) throw PadicDomainError("value is not p-integral");
    if (v_ >= m) return 0;
    BigInt mod = ipow(p_, m);
    BigInt r = (BigInt(u_) * ipow(p_, v_)) % mod;
    return r;
  }

  friend Padic operator+(const Padic& a, const Padic& b) {
    if (a.is_exact_zero()) return b.adopt(a);
    if (b.is_exact_zero()) return a.adopt(b);
    check_same(a, b);
    const int p = a.p_, cap = std::max(a.cap_, b.cap_);
    long abs = std::min(a.abs_precision(), b.abs_precision());
    if (a.kind_ == Kind::Zero && b.kind_ == Kind::Zero) return zero_to(p, cap, abs);
    long vmin = kInfiniteValuation;
    for (const Padic* x : {&a, &b})
      if (x->kind_ == Kind::Unit) vmin = std::min(vmin, x->v_);
    if (vmin >= abs) return zero_to(p, cap, abs);
    long modexp = abs - vmin;
    std::uint64_t m = detail::pow_u64(p, modexp);
    std::uint64_t s = 0;
    for (const Padic* x : {&a, &b}) {
      if (x->kind_ != Kind::Unit) continue;
      long shift = x->v_ - vmin;
      if (shift >= modexp) continue;
      s = (s + detail::mulmod(x->u_ % m, detail::pow_u64(p, shift), m)) % m;
    }
    if (s == 0) return zero_to(p, cap, abs);
    long t = detail::strip(s, p);
    return raw(p, cap, vmin + t, s, static_cast<int>(modexp - t));
  }

  friend Padic operator-(const Padic& a) {
    Padic r = a;
    if (r.kind_ == Kind::Unit) r.u_ = detail::pow_u64(r.p_, r.k_) - r.u_;
    return r;
  }

  friend Padic operator-(const Padic& a, const Padic& b) { return a + (-b); }

  friend Padic operator*(const Padic& a, const Padic& b) {
    if (a.is_exact_zero()) return a.adopt(b);
    if (b.is_exact_zero()) return b.adopt(a);
    check_same(a, b);
    const int p = a.p_, cap = std::max(a.cap_, b.cap_);
    if (a.kind_ == Kind::Zero || b.kind_ == Kind::Zero) {
      // O(p^s) * y is O(p^(s + v(y)))
      long s = (a.kind_ == Kind::Zero ? a.v_ : 0) + (b.kind_ == Kind::Zero ? b.v_ : 0);
      s += (a.kind_ == Kind::Unit ? a.v_ : 0) + (b.kind_ == Kind::Unit ? b.v_ : 0);
      return zero_to(p, cap, s);
    }
    int k = std::min(a.k_, b.k_);
    std::uint64_t m = detail::pow_u64(p, k);
    return raw(p, cap, a.v_ + b.v_, detail::mulmod(a.u_ % m, b.u_ % m, m), k);
  }

  Padic inverse() const {
    if (kind_ == Kind::ExactZero) throw PadicDomainError("division by exact zero");
    if (kind_ == Kind::Zero)
      throw PrecisionError("precision exhausted: cannot invert O(" + std::to_string(p_) + "^" +
                           std::to_string(v_) + ")");
    std::uint64_t m = detail::pow_u64(p_, k_);
    return raw(p_, cap_, -v_, detail::invmod(u_, m), k_);
  }

  friend Padic operator/(const Padic& a, const Padic& b) { return a * b.inverse(); }

  Padic& operator+=(const Padic& o) { return *this = *this + o; }
  Padic& operator-=(const Padic& o) { return *this = *this - o; }
  Padic& operator*=(const Padic& o) { return *this = *this * o; }

  Padic pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    Padic r = from_integer(p_, cap_, 1);
    Padic b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  /// Equality at the precision both sides are known to.
  friend bool operator==(const Padic& a, const Padic& b) { return (a - b).is_zero(); }

  /// "p^v * (d0 + d1*p + d2*p^2 + ...)"; "0" for the exact zero and "O(p^a)" for a cancelled one.
  std::string to_string() const {
    if (kind_ == Kind::ExactZero) return "0";
    std::ostringstream os;
    if (kind_ == Kind::Zero) {
      os << "O(" << p_ << "^" << v_ << ")";
      return os.str();
    }
    os << p_ << "^" << v_ << " * (";
    auto ds = digits();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (i > 0) os << " + ";
      os << ds[i];
      if (i == 1) os << "*" << p_;
      if (i > 1) os << "*" << p_ << "^" << i;
    }
    os << ")";
    return os.str();
  }

  /// Accepts the to_string grammar, plain rationals "a/b", and "p^v*u" with u rational.
  static Padic parse(int p, int cap, std::string_view text);

 private:
  enum class Kind : std::uint8_t { ExactZero, Zero, Unit };

  static Padic raw(int p, int cap, long v, std::uint64_t u, int k) {
    Padic x = exact_zero(p, cap);
    x.kind_ = Kind::Unit;
    x.v_ = v;
    x.u_ = u;
    x.k_ = k;
    return x;
  }

  static Padic from_big_unit(int p, int cap, long v, const BigInt& num, const BigInt& den, int rel) {
    std::uint64_t m = detail::pow_u64(p, rel);
    BigInt bm(m);
    BigInt n = num % bm;
    if (n < 0) n += bm;
    BigInt d = den % bm;
    if (d < 0) d += bm;
    std::uint64_t un = static_cast<std::uint64_t>(n), ud = static_cast<std::uint64_t>(d);
    return raw(p, cap, v, detail::mulmod(un, detail::invmod(ud, m), m), rel);
  }

  BigRational scaled(const BigInt& u) const {
    if (v_ >= 0) return BigRational(u * ipow(p_, v_));
    return BigRational(u, ipow(p_, -v_));
  }

  Padic adopt(const Padic& other) const {
    Padic r = *this;
    if (r.p_ == 0) {
      r.p_ = other.p_;
      r.cap_ = other.cap_;
    }
    return r;
  }

  static void check_same(const Padic& a, const Padic& b) {
    if (a.p_ != b.p_)
      throw PadicDomainError("prime mismatch: " + std::to_string(a.p_) + " vs " + std::to_string(b.p_));
  }

  int p_ = 0;
  int cap_ = 0;
  Kind kind_ = Kind::ExactZero;
  long v_ = 0;
  std::uint64_t u_ = 0;
  int k_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Padic& x) { return os << x.to_string(); }

/// Prime plus working precision; the factory for every p-adic value of a run.
struct PadicContext {
  int p = 3;
  int precision = 12;

  PadicContext() = default;
  PadicContext(int prime, int prec) : p(prime), precision(prec) { check_prime_and_cap(p, precision); }

  Padic zero() const { return Padic::exact_zero(p, precision); }
  Padic one() const { return Padic::from_integer(p, precision, 1); }
  Padic integer(const BigInt& n) const { return Padic::from_integer(p, precision, n); }
  Padic integer(long long n) const { return Padic::from_integer(p, precision, n); }
  Padic rational(const Rational& q) const { return Padic::from_rational(p, precision, q); }
  Padic rational(const BigRational& q) const { return Padic::from_rational(p, precision, q); }
  /// p^v
  Padic power_of_p(long v) const { return Padic::from_unit(p, precision, v, 1, precision); }
  Padic parse(std::string_view s) const { return Padic::parse(p, precision, s); }
};

inline Padic Padic::parse(int p, int cap, std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  auto fail = [&]() -> Padic { throw std::invalid_argument("cannot parse p-adic number '" + std::string(text) + "'"); };
  if (s.empty()) return fail();
  auto expect_prime = [&](std::string_view num) {
    if (std::stoll(std::string(num)) != p) throw std::invalid_argument("prime in '" + std::string(text) + "' differs from p");
  };
  if (s.rfind("O(", 0) == 0) {
    if (s.back() != ')') return fail();
    std::string inner = s.substr(2, s.size() - 3);
    auto caret = inner.find('^');
    if (caret == std::string::npos) return fail();
    expect_prime(inner.substr(0, caret));
    return zero_to(p, cap, std::stol(inner.substr(caret + 1)));
  }
  auto caret = s.find('^');
  auto star = s.find('*');
  if (caret != std::string::npos && star != std::string::npos && caret < star) {
    expect_prime(s.substr(0, caret));
    long v = std::stol(s.substr(caret + 1, star - caret - 1));
    std::string rest = s.substr(star + 1);
    if (!rest.empty() && rest.front() == '(') {
      if (rest.back() != ')') return fail();
      std::string body = rest.substr(1, rest.size() - 2);
      std::vector<int> ds;
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto plus = body.find('+', pos);
        std::string term = body.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
        auto mul = term.find('*');
        int d = std::stoi(term.substr(0, mul));
        std::size_t expected = ds.size();
        if (mul != std::string::npos) {
          std::string pw = term.substr(mul + 1);
          auto c2 = pw.find('^');
          expect_prime(pw.substr(0, c2));
          std::size_t idx = c2 == std::string::npos ? 1 : std::stoul(pw.substr(c2 + 1));
          if (idx != expected) return fail();
        } else if (expected != 0) {
          return fail();
        }
        ds.push_back(d);
        if (plus == std::string::npos) break;
        pos = plus + 1;
      }
      return from_digits(p, cap, v, ds);
    }
    Padic u = from_rational(p, cap, parse_rational(rest));
    return u * Padic::from_unit(p, cap, v, 1, cap);
  }
  return from_rational(p, cap, parse_rational(s));
}

/// C(a, k) for a in Z_p.  Computed exactly from the integer representative of a;
/// since |C(x,k) - C(y,k)| <= p^floor(log_p k) |x - y|, the result is known to
/// abs_precision(a) - floor(log_p k) digits.
inline Padic padic_binomial(const Padic& a, long k) {
  if (k < 0) throw std::invalid_argument("binomial with negative k");
  const int p = a.prime(), cap = a.cap();
  if (k == 0) return Padic::from_integer(p, cap, 1);
  if (a.is_exact_zero()) return Padic::exact_zero(p, cap);
  if (a.valuation_lower_bound() < 0) {
    // outside Z_p: plain product formula
    Padic num = Padic::from_integer(p, cap, 1);
    for (long j = 0; j < k; ++j) num = num * (a - Padic::from_integer(p, cap, j));
    BigInt fact = 1;
    for (long j = 2; j <= k; ++j) fact *= j;
    return num / Padic::from_integer(p, cap, fact);
  }
  long abs = a.abs_precision();
  BigInt rep = a.residue(abs);
  BigInt num = 1, den = 1;
  for (long j = 0; j < k; ++j) {
    num *= rep - j;
    den *= j + 1;
  }
  return Padic::from_integer(p, cap, num / den, abs - floor_log(k, p));
}

/// C(n, k) for an exactly known integer n (negative n allowed); exact zero when 0 <= n < k.
inline Padic binomial_exact(const PadicContext& ctx, const BigInt& n, long k) {
  if (k < 0) throw std::invalid_argument("binomial with negative k");
  BigInt num = 1, den = 1;
  for (long j = 0; j < k; ++j) {
    num *= n - j;
    den *= j + 1;
  }
  return ctx.integer(num / den);
}

}  // namespace bts
