#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bts {

/// Small exact rationals: apartment coordinates, filtration levels, norm exponents.
using Rational = boost::rational<long long>;

/// Unbounded integers and rationals for Stirling numbers, factorials and the like.
/// Expression templates are off: an `auto` or a lambda returning `x * y` would
/// otherwise hold references to temporaries.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using BigRational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

inline long long floor_of(const Rational& q) {
  long long n = q.numerator();
  long long d = q.denominator();  // always positive
  long long f = n / d;
  if (n % d != 0 && n < 0) --f;
  return f;
}

inline long long ceil_of(const Rational& q) {
  return -floor_of(-q);
}

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

/// Parses "a" or "a/b" (optional sign, surrounding spaces ignored).
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto parse_int = [&](std::string_view s) -> long long {
    s = trim(s);
    if (s.empty()) throw std::invalid_argument("empty integer");
    std::size_t used = 0;
    long long v = std::stoll(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("bad integer '" + std::string(s) + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  long long den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

inline BigRational to_big(const Rational& q) {
  return BigRational(BigInt(q.numerator()), BigInt(q.denominator()));
}

/// p-adic valuation of a nonzero big integer.
inline long valuation_of(BigInt n, int p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline long valuation_of(const BigRational& q, int p) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  return valuation_of(BigInt(numerator(q)), p) - valuation_of(BigInt(denominator(q)), p);
}

inline long valuation_of(const Rational& q, int p) {
  return valuation_of(to_big(q), p);
}

inline BigInt ipow(long long base, long exp) {
  BigInt r = 1;
  for (long i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Legendre's formula.
inline long factorial_valuation(long k, int p) {
  long v = 0;
  for (long q = k / p; q > 0; q /= p) v += q;
  return v;
}

/// floor(log_p k) for k >= 1.
inline long floor_log(long k, int p) {
  long e = 0;
  for (long q = p; q <= k; q *= p) ++e;
  return e;
}

}  // namespace bts
