#ifndef PINCHLAB_QUADEXT_HPP
#define PINCHLAB_QUADEXT_HPP

#include <utility>

#include "pinchlab/ratfunc.hpp"

namespace pinchlab {

// Element a + b*sqrt(rad) of a single quadratic extension of the rational
// function field. rad is a normalized polynomial radicand (zero radicand means
// the element is plain rational; b is zero then). Arithmetic between elements
// of *different* extensions raises MixedRadicand — compositum fields are out
// of scope by design.
class QuadExt {
public:
  QuadExt() : a_(), b_(), rad_() {}
  QuadExt(const Rational& c) : a_(c), b_(), rad_() {}
  QuadExt(long c) : a_(Rational(c)), b_(), rad_() {}
  QuadExt(RatFunc a) : a_(std::move(a)), b_(), rad_() {}
  QuadExt(RatFunc a, RatFunc b, Poly rad);

  // sqrt of a polynomial radicand; pulls out rational square content, and
  // collapses perfect-square constants to plain rationals. sqrt(0) = 0.
  static QuadExt sqrt_of(const Poly& radicand);
  static QuadExt sqrt_of(const RatFunc& radicand); // sqrt(n/d) = sqrt(n*d)/d

  const RatFunc& rational_part() const { return a_; }
  const RatFunc& radical_part() const { return b_; }
  const Poly& radicand() const { return rad_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  bool is_rational() const { return b_.is_zero(); }

  QuadExt conj() const;    // a - b*sqrt(rad)
  RatFunc norm() const;    // a^2 - b^2*rad
  QuadExt inverse() const; // conj/norm; throws when norm == 0

  QuadExt operator-() const;
  friend QuadExt operator+(const QuadExt& x, const QuadExt& y);
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y);
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y);
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y);
  QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
  QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
  QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }
  QuadExt& operator/=(const QuadExt& o) { return *this = *this / o; }

  bool operator==(const QuadExt& x) const;
  bool operator!=(const QuadExt& x) const { return !(*this == x); }

  QuadExt pow(long e) const;
  QuadExt subs(const std::map<Sym, Poly>& repl) const;

  // Numeric evaluation of the chosen branch: value = a + sign*b*sqrt(rad),
  // principal complex sqrt (negative radicands give imaginary parts).
  Complex eval_branch(const std::map<Sym, Complex>& point, int sign) const;
  // Both branches, (+, -) order.
  std::pair<Complex, Complex> eval_both(const std::map<Sym, Complex>& point) const;
  Rational eval_rational(const std::map<Sym, Rational>& point) const; // pre: is_rational()

  std::string str() const;

private:
  // Unify the radicands of two operands (adopting the nonzero one when the
  // other is plain rational); throws MixedRadicand when genuinely different.
  static Poly join_radicand(const QuadExt& x, const QuadExt& y);
  RatFunc a_, b_;
  Poly rad_;
};

} // namespace pinchlab

#endif
