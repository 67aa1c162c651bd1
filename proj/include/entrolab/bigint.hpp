#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace entrolab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Quotient rounded towards negative infinity. `b` must be nonzero.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  boost::multiprecision::divide_qr(a, b, q, r);
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

/// Remainder with the sign of `b`.
inline BigInt floor_mod(const BigInt& a, const BigInt& b) {
  return a - floor_div(a, b) * b;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / gcd(a, b) * b);
}

inline BigInt abs(const BigInt& a) { return boost::multiprecision::abs(a); }

inline bool fits_int64(const BigInt& a) {
  return a >= std::numeric_limits<std::int64_t>::min() &&
         a <= std::numeric_limits<std::int64_t>::max();
}

/// Natural log of |a| for a != 0, valid far beyond the double range.
inline double log_abs(const BigInt& a) {
  BigInt m = abs(a);
  const std::size_t bits = boost::multiprecision::msb(m) + 1;
  if (bits <= 1000) return std::log(m.convert_to<double>());
  const std::size_t shift = bits - 64;
  const double top = static_cast<double>((m >> shift).convert_to<std::uint64_t>());
  return std::log(top) + static_cast<double>(shift) * std::log(2.0);
}

inline double log_abs(const Rational& q) {
  return log_abs(boost::multiprecision::numerator(q)) -
         log_abs(boost::multiprecision::denominator(q));
}

inline BigInt parse_bigint(std::string_view text) { return BigInt(std::string(text)); }

inline std::string to_string(const BigInt& a) { return a.str(); }

inline std::string to_string(const Rational& q) {
  const auto& den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

}  // namespace entrolab
