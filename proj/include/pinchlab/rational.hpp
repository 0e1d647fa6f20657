#ifndef PINCHLAB_RATIONAL_HPP
#define PINCHLAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <string>

#include "pinchlab/errors.hpp"

namespace pinchlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Rational& r) {
  if (den(r) == 1) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

// b >= 0 only; Rational^negative is handled at the RatFunc/QuadExt level.
inline Rational rational_pow(Rational a, unsigned long b) {
  Rational acc(1);
  while (b) {
    if (b & 1) acc *= a;
    a *= a;
    b >>= 1;
  }
  return acc;
}

// Largest rational r > 0 with r^2 dividing a "squarely": a = r^2 * sf with sf
// a squarefree-integer ratio. Used to pull square content out of radicands.
Rational square_content(const Rational& a);

// Exact square root if a is a perfect rational square; returns false otherwise.
bool exact_sqrt(const Rational& a, Rational& root);

} // namespace pinchlab

#endif
