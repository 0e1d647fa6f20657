#ifndef PINCHLAB_RATFUNC_HPP
#define PINCHLAB_RATFUNC_HPP

#include "pinchlab/poly.hpp"

namespace pinchlab {

// Rational function num/den over the symbol field, always canonical:
// gcd(num, den) = 1 and the grlex-leading coefficient of den is +1.
class RatFunc {
public:
  RatFunc() : num_(), den_(Rational(1)) {}
  RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}
  RatFunc(long c) : num_(Rational(c)), den_(Rational(1)) {}
  RatFunc(Poly p) : num_(std::move(p)), den_(Rational(1)) {}
  RatFunc(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  RatFunc operator-() const;
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b); // throws on b == 0
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }
  bool operator<(const RatFunc& o) const {
    return num_ < o.num_ || (num_ == o.num_ && den_ < o.den_);
  }

  RatFunc inverse() const;
  RatFunc pow(long e) const;
  RatFunc derivative(Sym s) const;
  RatFunc subs(const std::map<Sym, Poly>& repl) const;

  // Exact evaluation; throws PoleAtPoint when the denominator vanishes.
  Rational eval(const std::map<Sym, Rational>& point) const;
  Complex eval(const std::map<Sym, Complex>& point) const;

  std::string str() const;

private:
  void canonicalize();
  // Already-reduced fraction: skips the gcd, only scales the denominator's
  // leading coefficient to 1. Callers must guarantee gcd(num, den) = 1.
  static RatFunc reduced(Poly num, Poly den);
  Poly num_, den_;
};

} // namespace pinchlab

#endif
