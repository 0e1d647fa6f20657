#include "pinchlab/resultant.hpp"

#include "pinchlab/linalg.hpp"

namespace pinchlab {

Poly sylvester_resultant(const Poly& f, const Poly& g, Sym x) {
  if (f.is_zero() || g.is_zero()) return Poly();
  const unsigned df = f.degree(x), dg = g.degree(x);
  if (df == 0 && dg == 0) return Poly(Rational(1));
  if (df == 0) return f.pow(dg); // res(c, g) = c^deg(g)
  if (dg == 0) return g.pow(df);

  Matrix<Poly> s(df + dg, df + dg);
  // dg rows of f coefficients, then df rows of g coefficients, descending powers
  for (unsigned r = 0; r < dg; ++r)
    for (unsigned k = 0; k <= df; ++k) s.at(r, r + k) = f.coeff_of(x, df - k);
  for (unsigned r = 0; r < df; ++r)
    for (unsigned k = 0; k <= dg; ++k) s.at(dg + r, r + k) = g.coeff_of(x, dg - k);
  return det_bareiss(std::move(s));
}

Poly resultant_normalized(const Poly& f, const Poly& g, Sym x) {
  return sylvester_resultant(f, g, x).normalized();
}

} // namespace pinchlab
