#pragma once

// The ordered monoid R~ = R u {r+ : r in R} u {inf}, restricted to rational r.
// Order: q < q+ < q' for every q' > q; inf is the maximum.

#include "bts/padic.hpp"
#include "bts/rational.hpp"

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bts {

class XReal {
 public:
  enum class Kind : std::uint8_t { Real = 0, Plus = 1, Infinity = 2 };

  XReal() = default;
  XReal(Rational q) : q_(q) {}  // NOLINT(google-explicit-constructor): levels are written as plain numbers
  XReal(long long q) : q_(q) {}  // NOLINT(google-explicit-constructor)

  static XReal plus(Rational q) { return XReal(q, Kind::Plus); }
  static XReal infinity() { return XReal(Rational(0), Kind::Infinity); }

  Kind kind() const { return kind_; }
  bool is_plus() const { return kind_ == Kind::Plus; }
  bool is_infinite() const { return kind_ == Kind::Infinity; }
  const Rational& value() const { return q_; }

  friend XReal operator+(const XReal& a, const XReal& b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    Kind k = (a.is_plus() || b.is_plus()) ? Kind::Plus : Kind::Real;
    return XReal(a.q_ + b.q_, k);
  }

  friend std::strong_ordering operator<=>(const XReal& a, const XReal& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
    }
    if (a.q_ < b.q_) return std::strong_ordering::less;
    if (b.q_ < a.q_) return std::strong_ordering::greater;
    return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  }

  friend bool operator==(const XReal& a, const XReal& b) { return (a <=> b) == 0; }

  /// Decides v >= *this for an integer valuation v (kInfiniteValuation allowed).
  /// v >= q+ means v > q.
  bool satisfied_by(long v) const {
    if (v == kInfiniteValuation) return true;
    if (is_infinite()) return false;
    Rational rv(v);
    return is_plus() ? (rv > q_) : (rv >= q_);
  }

  /// Smallest integer v with satisfied_by(v).
  long min_integer() const {
    if (is_infinite()) throw std::domain_error("no integer reaches inf");
    return is_plus() ? static_cast<long>(floor_of(q_)) + 1 : static_cast<long>(ceil_of(q_));
  }

  /// Largest integer n with satisfied_by(v) for the level *this + n.
  long max_shift(long v) const {
    if (v == kInfiniteValuation) return kInfiniteValuation;
    if (is_infinite()) throw std::domain_error("infinite level");
    Rational diff = Rational(v) - q_;
    return is_plus() ? static_cast<long>(ceil_of(diff)) - 1 : static_cast<long>(floor_of(diff));
  }

  std::string to_string() const {
    if (is_infinite()) return "inf";
    return bts::to_string(q_) + (is_plus() ? "+" : "");
  }

  static XReal parse(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s == "inf") return infinity();
    if (!s.empty() && s.back() == '+') return plus(parse_rational(s.substr(0, s.size() - 1)));
    return XReal(parse_rational(s));
  }

 private:
  XReal(Rational q, Kind k) : q_(q), kind_(k) {}

  Rational q_{0};
  Kind kind_ = Kind::Real;
};

inline std::ostream& operator<<(std::ostream& os, const XReal& x) { return os << x.to_string(); }

}  // namespace bts
