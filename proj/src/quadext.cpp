#include "pinchlab/quadext.hpp"

#include "pinchlab/errors.hpp"

namespace pinchlab {

QuadExt::QuadExt(RatFunc a, RatFunc b, Poly rad)
    : a_(std::move(a)), b_(std::move(b)), rad_(std::move(rad)) {
  if (rad_.is_zero() || b_.is_zero()) {
    if (!b_.is_zero())
      // b*sqrt(0) contributes nothing
      b_ = RatFunc();
    rad_ = Poly();
  }
}

QuadExt QuadExt::sqrt_of(const Poly& radicand) {
  if (radicand.is_zero()) return QuadExt();
  // pull polynomial square factors so equal-locus radicands collapse to the
  // same squarefree core (sign convention: extracted factor as written)
  auto parts = split_square_factor(radicand);
  const Poly& sq = parts.first;
  Poly rest = parts.second;
  if (rest.is_constant()) {
    Rational root;
    if (exact_sqrt(rest.constant_value(), root))
      return QuadExt(RatFunc(Poly(root) * sq));
  }
  // pull rational square content: c*P = r^2 * sf * P  ->  r*sqrt(sf*P)
  Rational c = rest.content();
  Rational r = square_content(c);
  Poly reduced = rest;
  reduced *= Rational(1) / (r * r);
  return QuadExt(RatFunc(), RatFunc(Poly(r) * sq), reduced);
}

QuadExt QuadExt::sqrt_of(const RatFunc& radicand) {
  if (radicand.is_zero()) return QuadExt();
  // sqrt(n/d) = sqrt(n*d)/d
  QuadExt s = sqrt_of(radicand.num() * radicand.den());
  RatFunc inv_d = RatFunc(Poly(Rational(1)), radicand.den());
  return QuadExt(s.a_ * inv_d, s.b_ * inv_d, s.rad_);
}

QuadExt QuadExt::conj() const { return QuadExt(a_, -b_, rad_); }

RatFunc QuadExt::norm() const { return a_ * a_ - b_ * b_ * RatFunc(rad_); }

QuadExt QuadExt::inverse() const {
  RatFunc n = norm();
  if (n.is_zero())
    throw division_error("inverse of quadratic-extension element with zero norm: " + str());
  RatFunc inv = n.inverse();
  return QuadExt(a_ * inv, -b_ * inv, rad_);
}

QuadExt QuadExt::operator-() const { return QuadExt(-a_, -b_, rad_); }

Poly QuadExt::join_radicand(const QuadExt& x, const QuadExt& y) {
  if (x.rad_.is_zero()) return y.rad_;
  if (y.rad_.is_zero()) return x.rad_;
  if (x.rad_ == y.rad_) return x.rad_;
  throw mixed_radicand("operands live in different quadratic extensions: sqrt(" +
                       x.rad_.str() + ") vs sqrt(" + y.rad_.str() + ")");
}

QuadExt operator+(const QuadExt& x, const QuadExt& y) {
  Poly rad = QuadExt::join_radicand(x, y);
  return QuadExt(x.a_ + y.a_, x.b_ + y.b_, rad);
}

QuadExt operator-(const QuadExt& x, const QuadExt& y) {
  Poly rad = QuadExt::join_radicand(x, y);
  return QuadExt(x.a_ - y.a_, x.b_ - y.b_, rad);
}

QuadExt operator*(const QuadExt& x, const QuadExt& y) {
  Poly rad = QuadExt::join_radicand(x, y);
  RatFunc r(rad);
  return QuadExt(x.a_ * y.a_ + x.b_ * y.b_ * r, x.a_ * y.b_ + x.b_ * y.a_, rad);
}

QuadExt operator/(const QuadExt& x, const QuadExt& y) {
  if (y.is_zero()) throw division_error("division by zero quadratic-extension element");
  return x * y.inverse();
}

bool QuadExt::operator==(const QuadExt& x) const {
  if (a_ != x.a_ || b_ != x.b_) return false;
  if (b_.is_zero()) return true;
  return rad_ == x.rad_;
}

QuadExt QuadExt::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  QuadExt acc(Rational(1)), base = *this;
  unsigned long k = static_cast<unsigned long>(e);
  while (k) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

QuadExt QuadExt::subs(const std::map<Sym, Poly>& repl) const {
  if (is_rational()) return QuadExt(a_.subs(repl));
  // substitute through sqrt: rebuild from the substituted radicand so square
  // content that appears is re-extracted
  QuadExt root = sqrt_of(rad_.subs(repl));
  return QuadExt(a_.subs(repl)) + QuadExt(b_.subs(repl)) * root;
}

Complex QuadExt::eval_branch(const std::map<Sym, Complex>& point, int sign) const {
  Complex av = a_.eval(point);
  if (b_.is_zero()) return av;
  Complex root = std::sqrt(rad_.eval(point));
  return av + double(sign) * b_.eval(point) * root;
}

std::pair<Complex, Complex> QuadExt::eval_both(const std::map<Sym, Complex>& point) const {
  return {eval_branch(point, +1), eval_branch(point, -1)};
}

Rational QuadExt::eval_rational(const std::map<Sym, Rational>& point) const {
  if (!is_rational())
    throw validation_error("rational evaluation of radical element " + str());
  return a_.eval(point);
}

std::string QuadExt::str() const {
  if (is_rational()) return a_.str();
  std::string root = "sqrt(" + rad_.str() + ")";
  std::string bpart;
  if (b_ == RatFunc(Rational(1)))
    bpart = root;
  else if (b_ == RatFunc(Rational(-1)))
    bpart = "-" + root;
  else
    bpart = "(" + b_.str() + ")*" + root;
  if (a_.is_zero()) return bpart;
  if (!bpart.empty() && bpart[0] == '-') return a_.str() + " - " + bpart.substr(1);
  return a_.str() + " + " + bpart;
}

} // namespace pinchlab
