#pragma once

// Exact integer and rational scalars shared by every module.

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hsys {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "7", "-3/4" or " 2 / 6 " into a canonical rational. Throws
/// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text form: "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

/// Rational built from n/d and canonicalized.
inline Rational make_rational(const Integer& num, const Integer& den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Lossless narrowing; throws std::overflow_error when out of range.
long to_long(const Integer& z);

}  // namespace hsys
