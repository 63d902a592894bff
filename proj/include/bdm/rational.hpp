#pragma once

// Exact arithmetic helpers on top of GMP's C++ interface.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bdm {

using Integer = mpz_class;
using Rational = mpq_class;

/// q^k for k >= 0.
inline Integer ipow(std::int64_t q, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("ipow: negative exponent");
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(k));
  return r;
}

/// q^k as an exact rational, k of either sign.
inline Rational qpow(std::int64_t q, std::int64_t k) {
  if (k >= 0) return Rational(ipow(q, k));
  Rational r(Integer(1), ipow(q, -k));
  r.canonicalize();
  return r;
}

/// "p/q" with the denominator always present; the wire form of every
/// exact value this library emits.
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace bdm
