#ifndef PINCHLAB_RESULTANT_HPP
#define PINCHLAB_RESULTANT_HPP

#include "pinchlab/poly.hpp"

namespace pinchlab {

// Sylvester resultant of f and g viewed univariate in x with polynomial
// coefficients over the remaining symbols; computed as a fraction-free
// determinant. res of two nonzero constants is 1; res with a zero input is 0.
Poly sylvester_resultant(const Poly& f, const Poly& g, Sym x);

// Convenience: the same determinant normalized to a primitive polynomial with
// positive grlex-leading coefficient (the canonical elimination output).
Poly resultant_normalized(const Poly& f, const Poly& g, Sym x);

} // namespace pinchlab

#endif
