#include "pinchlab/ratfunc.hpp"

#include "pinchlab/errors.hpp"

namespace pinchlab {

RatFunc::RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw division_error("rational function with zero denominator");
  canonicalize();
}

void RatFunc::canonicalize() {
  if (num_.is_zero()) {
    den_ = Poly(Rational(1));
    return;
  }
  Poly g = poly_gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = divexact(num_, g);
    den_ = divexact(den_, g);
  }
  // make the denominator's grlex-leading coefficient exactly 1
  Rational lc = den_.leading_coeff();
  if (lc != 1) {
    Rational inv = Rational(1) / lc;
    num_ *= inv;
    den_ *= inv;
  }
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFunc RatFunc::reduced(Poly num, Poly den) {
  RatFunc r;
  r.num_ = std::move(num);
  r.den_ = std::move(den);
  Rational lc = r.den_.leading_coeff();
  if (lc != 1) {
    Rational inv = Rational(1) / lc;
    r.num_ *= inv;
    r.den_ *= inv;
  }
  return r;
}

// Sum/product keep gcd work on small operands: with both inputs reduced, the
// only cancellations run against the shared denominator part (addition) or
// across numerator/denominator pairs (multiplication).
RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  const Poly& n1 = a.num_;
  const Poly& d1 = a.den_;
  const Poly& n2 = b.num_;
  const Poly& d2 = b.den_;
  if (n1.is_zero()) return b;
  if (n2.is_zero()) return a;
  Poly g = poly_gcd(d1, d2);
  if (g.is_constant()) {
    Poly t = n1 * d2 + n2 * d1; // coprime to d1*d2 by construction
    if (t.is_zero()) return RatFunc();
    return RatFunc::reduced(std::move(t), d1 * d2);
  }
  Poly r1 = divexact(d1, g), r2 = divexact(d2, g);
  Poly t = n1 * r2 + n2 * r1;
  if (t.is_zero()) return RatFunc();
  Poly h = poly_gcd(t, g);
  if (h.is_constant()) return RatFunc::reduced(std::move(t), r1 * d2);
  return RatFunc::reduced(divexact(t, h), r1 * divexact(d2, h));
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return RatFunc();
  Poly ra = poly_gcd(a.num_, b.den_), rb = poly_gcd(b.num_, a.den_);
  Poly na = ra.is_constant() ? a.num_ : divexact(a.num_, ra);
  Poly db = ra.is_constant() ? b.den_ : divexact(b.den_, ra);
  Poly nb = rb.is_constant() ? b.num_ : divexact(b.num_, rb);
  Poly da = rb.is_constant() ? a.den_ : divexact(a.den_, rb);
  return RatFunc::reduced(na * nb, da * db);
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw division_error("division by zero rational function");
  return a * b.inverse();
}

RatFunc RatFunc::inverse() const {
  if (is_zero()) throw division_error("inverse of zero rational function");
  return reduced(den_, num_);
}

RatFunc RatFunc::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  RatFunc acc(Rational(1)), base = *this;
  unsigned long k = static_cast<unsigned long>(e);
  while (k) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

RatFunc RatFunc::derivative(Sym s) const {
  return RatFunc(num_.derivative(s) * den_ - num_ * den_.derivative(s), den_ * den_);
}

RatFunc RatFunc::subs(const std::map<Sym, Poly>& repl) const {
  Poly d = den_.subs(repl);
  if (d.is_zero()) throw division_error("substitution annihilates denominator " + den_.str());
  return RatFunc(num_.subs(repl), d);
}

Rational RatFunc::eval(const std::map<Sym, Rational>& point) const {
  Rational d = den_.eval(point);
  if (d == 0) throw pole_at_point("denominator " + den_.str() + " vanishes at evaluation point");
  return num_.eval(point) / d;
}

Complex RatFunc::eval(const std::map<Sym, Complex>& point) const {
  Complex d = den_.eval(point);
  if (d == Complex(0.0, 0.0))
    throw pole_at_point("denominator " + den_.str() + " vanishes at evaluation point");
  return num_.eval(point) / d;
}

std::string RatFunc::str() const {
  if (is_polynomial() && den_.constant_value() == 1) return num_.str();
  std::string n = num_.term_count() > 1 ? "(" + num_.str() + ")" : num_.str();
  // the denominator must reparse as one atom: parenthesize anything that is
  // not a bare symbol or bare positive integer
  std::string d = den_.str();
  bool atom = !d.empty() && d.find_first_of("*+-/^ ") == std::string::npos;
  if (!atom) d = "(" + d + ")";
  return n + "/" + d;
}

} // namespace pinchlab
