#ifndef PINCHLAB_ORACLE_HPP
#define PINCHLAB_ORACLE_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace pinchlab {

using Cplx = std::complex<double>;

// Least-squares power-law fit of log|value| against log(eps). The stored
// samples are sorted by decreasing eps; at least 5 points spanning two
// decades are required (DegenerateSamples otherwise, also for zero values).
struct SlopeFit {
  std::vector<std::pair<double, Cplx>> samples;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
SlopeFit fit_slope(const std::vector<std::pair<double, Cplx>>& samples);

// Complex least-squares fit value = a + b*log(eps) for logarithmic leading
// terms; r_squared measured on moduli of the residuals.
struct LogFit {
  Cplx a{};
  Cplx b{};
  double r_squared = 0.0;
};
LogFit fit_log(const std::vector<std::pair<double, Cplx>>& samples);

// Contour integral of 1/((z+xi)(z+eta)) over the circle of radius
// contour_radius around -xi by the trapezoidal rule, traversed with the
// orientation the residue chain induces (clockwise), so the enclosed pole
// contributes 2*pi*i/(xi - eta). The excluded pole -eta must stay off the
// contour; coincident or contour-touching poles raise ContourAmbiguous.
Cplx residue_kernel(Cplx xi, Cplx eta, double contour_radius, int n_points);

// K(eps) = integral of 1/(eps + y^T Q y) over the quadric ball
// y^T Q y <= cutoff^2, n in 1..5. Eigendecomposition (positive spectrum
// required) reduces it to a radial quadrature scaled by 1/sqrt(det Q).
double morse_integral(const std::vector<std::vector<double>>& Q, double eps,
                      double cutoff);

// One-loop two-point integral int d^dq 1/((q^2+m0^2)((q+p)^2+m1^2)) at
// complex s = p^2, d = 3 or 5 (d >= 7 diverges too strongly for two
// propagators: NonConvergent). The parallel direction is closed by
// residues; what remains is a transverse radial quadrature cut at r_max
// (the cutoff only shifts the analytic background). bubble_direct instead
// integrates the two-dimensional (q_par, r) slice with nested quadrature —
// an independent path, valid while |Im sqrt(s)| < min(m0, m1).
Cplx bubble_numeric(Cplx s, double m0_sq, double m1_sq, int d,
                    double r_max = 50.0);
Cplx bubble_direct(Cplx s, double m0_sq, double m1_sq, int d,
                   double r_max = 50.0);

// Monte Carlo estimate of the reduced two-cluster transverse integral at
// d = 3, with the photon separation kept at its natural parallel scale
// (the strictly reduced integrand is log-divergent at coincidence):
//   K(e) = int d2u d2v / (((u-v)^2 + e)(e + u^2)(e + v^2)) = C / e.
// Deterministic for fixed (seed, n_samples): 64 seed-indexed blocks with a
// fixed reduction order and antithetic radial pairs. InsufficientSamples
// when the standard error exceeds 10% of the estimate.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};
McEstimate qed_reduced_numeric(double e_l, int d, std::uint64_t n_samples,
                               std::uint64_t seed);

// The same integral with the inner cluster reduced in closed form (Feynman
// parameter) and the remaining radial integral done by quadrature —
// an independent cross-check of the Monte Carlo path.
double qed_reduced_radial(double e_l);

// Dyadic extractors: eliminate the analytic background so the remainder
// scales like the singular part alone.
//   extract2: f(4e) - 3 f(2e) + 2 f(e)            kills {1, e}
//   extract3: f(8e) - 7 f(4e) + 14 f(2e) - 8 f(e) kills {1, e, e^2}
// A pure power e^p survives scaled by the gain; e*log(e) survives extract2
// as (2 log 2) e, and log(e) as the constant -log 2.
Cplx extract2(const std::function<Cplx(double)>& f, double eps);
Cplx extract3(const std::function<Cplx(double)>& f, double eps);
double extract2_gain(double p);
double extract3_gain(double p);

} // namespace pinchlab

#endif
