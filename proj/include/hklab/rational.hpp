#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "hklab/fp_linalg.hpp"

namespace hklab {

/// Arbitrary-precision fraction, always reduced with positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw MathError("zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

/// "num/den", denominator always printed.
inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
    BigInt num(std::string(text.substr(0, slash)));
    BigInt den(std::string(text.substr(slash + 1)));
    if (den == 0) throw MathError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw MathError("malformed rational '" + std::string(text) + "'");
  }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::int64_t floor_rational(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num % den != 0 && num < 0) q -= 1;
  return q.convert_to<std::int64_t>();
}

inline std::int64_t ceil_rational(const Rational& r) { return -floor_rational(-r); }

inline Rational rational_pow(const Rational& base, unsigned k) {
  Rational out = 1;
  for (unsigned i = 0; i < k; ++i) out *= base;
  return out;
}

}  // namespace hklab
