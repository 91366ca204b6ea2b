#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rhsym {

/// Exact rational number. Always kept in lowest terms.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }
inline bool is_one(const Rational& r) { return r == 1; }
inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Parses "p" or "p/q" with optional sign.
inline Rational parse_rational(std::string_view text) {
  Rational r;
  if (r.set_str(std::string(text), 10) != 0) {
    throw std::invalid_argument("not a rational literal: " + std::string(text));
  }
  if (r.get_den() == 0) throw std::domain_error("rational with zero denominator");
  r.canonicalize();
  return r;
}

inline std::size_t hash_value(const Rational& r) {
  const std::size_t a = std::hash<std::string>{}(r.get_num().get_str(16));
  const std::size_t b = std::hash<std::string>{}(r.get_den().get_str(16));
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

/// Integer value of r; throws if r is not an integer or does not fit.
inline long to_long(const Rational& r) {
  if (!is_integer(r) || !r.get_num().fits_slong_p()) {
    throw std::domain_error("rational is not a machine integer: " + to_string(r));
  }
  return r.get_num().get_si();
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace rhsym
