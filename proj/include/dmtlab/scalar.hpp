#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace dmtlab {

using Rational = boost::rational<std::int64_t>;

/// Comparison slack for a scalar type: zero for exact arithmetic.
template <typename Scalar>
struct ScalarTraits {
  static Scalar eps() { return Scalar(1e-12); }
  static double to_double(const Scalar& x) { return static_cast<double>(x); }
  static Scalar from_int(std::int64_t v) { return static_cast<Scalar>(v); }
  static Scalar ratio(std::int64_t num, std::int64_t den) {
    return static_cast<Scalar>(num) / static_cast<Scalar>(den);
  }
};

template <>
struct ScalarTraits<Rational> {
  static Rational eps() { return Rational(0); }
  static double to_double(const Rational& x) { return boost::rational_cast<double>(x); }
  static Rational from_int(std::int64_t v) { return Rational(v); }
  static Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }
};

template <typename Scalar>
double to_double(const Scalar& x) {
  return ScalarTraits<Scalar>::to_double(x);
}

inline std::string to_string(const Rational& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

/// Parses "p/q", "p" or a finite decimal ("0.25") into an exact rational.
Rational parse_rational(const std::string& text);

}  // namespace dmtlab
