#pragma once

#include <cstdint>
#include <stdexcept>

#include "cchaos/number.hpp"

namespace cchaos {

inline Rational factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

inline Rational binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(b);
}

/// (2k-1)!! with the convention (-1)!! = 1.
inline Rational double_factorial_odd(unsigned k) {
  Rational r(1);
  for (unsigned j = 1; j < 2 * k; j += 2) r *= j;
  return r;
}

/// Product of factorials of a multiplicity vector (the multi-index factorial m!).
template <class Range>
Rational multi_factorial(const Range& counts) {
  Rational r(1);
  for (auto c : counts) r *= factorial(static_cast<unsigned>(c));
  return r;
}

/// |m|! / m! for a multiplicity vector.
template <class Range>
Rational multinomial(const Range& counts) {
  unsigned total = 0;
  for (auto c : counts) total += static_cast<unsigned>(c);
  return factorial(total) / multi_factorial(counts);
}

}  // namespace cchaos
