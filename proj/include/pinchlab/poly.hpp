#ifndef PINCHLAB_POLY_HPP
#define PINCHLAB_POLY_HPP

#include <map>
#include <string>
#include <vector>

#include "pinchlab/rational.hpp"
#include "pinchlab/symbols.hpp"

namespace pinchlab {

// Sparse monomial: (symbol, exponent) pairs, sorted by symbol id, exponents > 0.
using Monomial = std::vector<std::pair<Sym, unsigned>>;

unsigned total_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);

// Graded lexicographic order: higher total degree first; ties broken lex with
// lower symbol ids more significant. Used as the single canonical term order.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Multivariate polynomial with exact rational coefficients over the interned
// symbol table. Canonical invariant: no zero coefficients stored.
class Poly {
public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  Poly() = default;
  explicit Poly(const Rational& c);
  explicit Poly(long c) : Poly(Rational(c)) {}
  static Poly var(Sym s, unsigned e = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const; // pre: is_constant()

  const Terms& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  unsigned degree() const;          // total degree; 0 for the zero polynomial
  unsigned degree(Sym s) const;     // degree in one symbol
  bool depends_on(Sym s) const;

  // Leading data under grlex.
  const Monomial& leading_monomial() const; // pre: !is_zero()
  const Rational& leading_coeff() const;    // pre: !is_zero()

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const Rational& c);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend Poly operator+(Poly a, const Rational& c) { a.add_term({}, c); return a; }
  friend Poly operator+(const Rational& c, Poly a) { a.add_term({}, c); return a; }
  friend Poly operator-(Poly a, const Rational& c) { a.add_term({}, -c); return a; }
  friend Poly operator-(const Rational& c, const Poly& a) {
    Poly r = -a;
    r.add_term({}, c);
    return r;
  }

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  // Arbitrary-but-deterministic total order (for use as map keys).
  bool operator<(const Poly& o) const;

  Poly pow(unsigned e) const;
  Poly derivative(Sym s) const;

  // Exact evaluation; the map must cover every symbol that occurs.
  Rational eval(const std::map<Sym, Rational>& point) const;
  Complex eval(const std::map<Sym, Complex>& point) const;

  // Substitute polynomials for symbols (symbols absent from the map stay).
  Poly subs(const std::map<Sym, Poly>& repl) const;

  // Rational content (gcd of coefficients, positive; 0 for the zero poly) and
  // the primitive integer-coefficient part. primitive_part keeps signs;
  // normalized() additionally makes the grlex-leading coefficient positive.
  Rational content() const;
  Poly primitive_part() const;
  Poly normalized() const;

  // Univariate view in symbol x: coefficient polynomials indexed by exponent.
  std::map<unsigned, Poly> univariate_in(Sym x) const;
  static Poly from_univariate(const std::map<unsigned, Poly>& coeffs, Sym x);
  Poly coeff_of(Sym x, unsigned e) const;

  // All symbols occurring in the polynomial, ascending.
  std::vector<Sym> support() const;

  std::string str() const;

  // Internal term surgery used by arithmetic helpers.
  void add_term(const Monomial& m, const Rational& c);

private:
  Terms terms_;
};

// Single-divisor multivariate division under grlex: f = q*g + r where no term
// of r is divisible by the leading monomial of g. remainder is zero iff g | f.
struct PolyDivision {
  Poly quotient;
  Poly remainder;
};
PolyDivision divide(const Poly& f, const Poly& g); // pre: g != 0
bool divides(const Poly& g, const Poly& f);
Poly divexact(const Poly& f, const Poly& g); // throws DivisionError on nonzero remainder

// Multivariate gcd by primitive PRS with recursive content; result normalized
// (primitive, positive leading coefficient); gcd(0,0) = 0.
Poly poly_gcd(const Poly& a, const Poly& b);

// Largest polynomial square factor: f = first^2 * second, with every extraction
// certified by exact division (so the split is never wrong, at worst stops
// early on the rational content which square_content handles separately).
std::pair<Poly, Poly> split_square_factor(const Poly& f);

} // namespace pinchlab

#endif
