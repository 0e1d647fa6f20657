#ifndef PINCHLAB_QUADRATURE_HPP
#define PINCHLAB_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace pinchlab {

struct QuadResult {
  std::complex<double> value;
  double error = 0.0; // accumulated local error estimates
  long evaluations = 0;
};

// Adaptive Gauss(7)/Kronrod(15) quadrature on [a, b] for a complex-valued
// integrand of a real variable. Panels split until the embedded error
// estimate passes abs_tol + rel_tol * |panel|; panels that reach max_depth
// are accepted with their estimate folded into `error`, so callers can
// judge convergence from error / |value|.
QuadResult integrate_gk(const std::function<std::complex<double>(double)>& f,
                        double a, double b, double abs_tol = 1e-12,
                        double rel_tol = 1e-10, int max_depth = 20);

} // namespace pinchlab

#endif
