#include "pinchlab/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "pinchlab/errors.hpp"
#include "pinchlab/quadrature.hpp"

namespace pinchlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_samples(const std::vector<std::pair<double, Cplx>>& s) {
  if (s.size() < 5) throw degenerate_samples("need at least 5 samples");
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& [e, v] : s) {
    if (!(e > 0))
      throw degenerate_samples("every eps must be positive");
    if (std::abs(v) == 0.0)
      throw degenerate_samples("zero value at eps = " + std::to_string(e));
    lo = first ? e : std::min(lo, e);
    hi = first ? e : std::max(hi, e);
    first = false;
  }
  if (hi < 100.0 * lo)
    throw degenerate_samples("eps must span at least two decades");
}

// Deterministic 64-bit generator (splitmix64): identical streams on every
// platform, which std:: distributions do not guarantee.
struct SplitMix {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in the open interval (0,1)
  double u01() { return (double(next() >> 12) + 0.5) * 0x1.0p-52; }
};

} // namespace

SlopeFit fit_slope(const std::vector<std::pair<double, Cplx>>& samples) {
  check_samples(samples);
  SlopeFit out;
  out.samples = samples;
  std::sort(out.samples.begin(), out.samples.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t n = out.samples.size();
  double xbar = 0.0, ybar = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(out.samples[i].first);
    ys[i] = std::log(std::abs(out.samples[i].second));
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= double(n);
  ybar /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (sxx == 0.0) throw degenerate_samples("all eps coincide");
  out.slope = sxy / sxx;
  out.intercept = ybar - out.slope * xbar;
  double ssres = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - out.intercept - out.slope * xs[i];
    ssres += r * r;
  }
  out.r_squared = syy > 0.0 ? std::clamp(1.0 - ssres / syy, 0.0, 1.0) : 1.0;
  return out;
}

LogFit fit_log(const std::vector<std::pair<double, Cplx>>& samples) {
  check_samples(samples);
  const std::size_t n = samples.size();
  double xbar = 0.0;
  Cplx ybar{};
  for (const auto& [e, v] : samples) {
    xbar += std::log(e);
    ybar += v;
  }
  xbar /= double(n);
  ybar /= double(n);
  double sxx = 0.0;
  Cplx sxy{};
  double sstot = 0.0;
  for (const auto& [e, v] : samples) {
    const double dx = std::log(e) - xbar;
    sxx += dx * dx;
    sxy += dx * (v - ybar);
    sstot += std::norm(v - ybar);
  }
  if (sxx == 0.0) throw degenerate_samples("all eps coincide");
  LogFit out;
  out.b = sxy / sxx;
  out.a = ybar - out.b * xbar;
  double ssres = 0.0;
  for (const auto& [e, v] : samples)
    ssres += std::norm(v - out.a - out.b * std::log(e));
  out.r_squared = sstot > 0.0 ? std::clamp(1.0 - ssres / sstot, 0.0, 1.0) : 1.0;
  return out;
}

Cplx residue_kernel(Cplx xi, Cplx eta, double contour_radius, int n_points) {
  if (!(contour_radius > 0))
    throw validation_error("contour radius must be positive");
  if (n_points < 8) throw validation_error("need at least 8 contour points");
  const double scale = std::abs(xi) + std::abs(eta);
  const double sep = std::abs(xi - eta);
  if (sep < 1e-12 * scale || sep == 0.0)
    throw contour_ambiguous("the two poles coincide; no contour separates them");
  if (std::abs(sep - contour_radius) < 1e-9 * std::max(1.0, sep))
    throw contour_ambiguous("the excluded pole lies on the contour");
  const Cplx center = -xi;
  Cplx acc{};
  for (int k = 0; k < n_points; ++k) {
    const double t = 2.0 * kPi * double(k) / double(n_points);
    const Cplx e = std::polar(1.0, -t); // clockwise
    const Cplx z = center + contour_radius * e;
    const Cplx dz = Cplx(0.0, -1.0) * contour_radius * e;
    acc += dz / ((z + xi) * (z + eta));
  }
  return acc * (2.0 * kPi / double(n_points));
}

double morse_integral(const std::vector<std::vector<double>>& Q, double eps,
                      double cutoff) {
  const std::size_t n = Q.size();
  if (n < 1 || n > 5)
    throw validation_error("quadratic form dimension must lie in 1..5");
  for (const auto& row : Q)
    if (row.size() != n) throw validation_error("quadratic form must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(Q[i][j] - Q[j][i]) > 1e-10 * (1.0 + std::abs(Q[i][j])))
        throw validation_error("quadratic form must be symmetric");
  if (!(eps > 0) || !(cutoff > 0))
    throw validation_error("eps and cutoff must be positive");
  Eigen::MatrixXd M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(long(i), long(j)) = Q[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  double det = 1.0;
  for (long i = 0; i < long(n); ++i) {
    const double ev = es.eigenvalues()(i);
    if (!(ev > 0))
      throw not_positive_definite("eigenvalue " + std::to_string(ev) +
                                  " is not positive");
    det *= ev;
  }
  const double omega = 2.0 * std::pow(kPi, double(n) / 2.0) /
                       std::tgamma(double(n) / 2.0);
  auto rad = integrate_gk(
      [&](double r) {
        return Cplx(std::pow(r, double(n) - 1.0) / (eps + r * r));
      },
      0.0, cutoff, 1e-14, 1e-12, 30);
  return omega / std::sqrt(det) * rad.value.real();
}

namespace {

void bubble_guards(Cplx s, double m0_sq, double m1_sq, int d) {
  if (d != 3 && d != 5) {
    if (d >= 7 && d % 2 == 1)
      throw non_convergent("two propagators cannot damp the measure at d = " +
                           std::to_string(d));
    throw validation_error("d must be 3 or 5");
  }
  if (!(m0_sq > 0) || !(m1_sq > 0))
    throw validation_error("masses-squared must be positive");
  if (std::abs(s) < 1e-12)
    throw pole_at_point("the parallel pinch solve degenerates at s = 0");
}

} // namespace

Cplx bubble_numeric(Cplx s, double m0_sq, double m1_sq, int d, double r_max) {
  bubble_guards(s, m0_sq, m1_sq, d);
  const Cplx rs = std::sqrt(s);
  const Cplx im{0.0, 1.0};
  // on the pinch locus the r=0 endpoint of the slice integral is a pole of
  // the residue sum; demand an approach along a ray instead
  {
    const Cplx d1_at0 = (m1_sq - m0_sq) + s + 2.0 * im * (std::sqrt(m0_sq) * rs);
    const Cplx d0_at0 = s + (m0_sq - m1_sq) - 2.0 * im * (std::sqrt(m1_sq) * rs);
    const double scale = std::abs(s) + m0_sq + m1_sq;
    if (std::min(std::abs(d1_at0), std::abs(d0_at0)) < 1e-12 * scale)
      throw pole_at_point(
          "the kinematic point lies on the pinch locus; approach it along "
          "a ray instead");
  }
  auto inner = [&](double r) -> Cplx {
    const double w0 = std::sqrt(r * r + m0_sq);
    const double w1 = std::sqrt(r * r + m1_sq);
    const Cplx d1 = (m1_sq - m0_sq) + s + 2.0 * im * (w0 * rs);
    const Cplx d0 = s + (m0_sq - m1_sq) - 2.0 * im * (w1 * rs);
    if (std::abs(d1) < 1e-300 || std::abs(d0) < 1e-300)
      throw pole_at_point("the reduced integrand hits a pole on the slice");
    return kPi * (1.0 / (w0 * d1) + 1.0 / (w1 * d0));
  };
  const double omega = 2.0 * std::pow(kPi, (double(d) - 1.0) / 2.0) /
                       std::tgamma((double(d) - 1.0) / 2.0);
  auto rad = integrate_gk(
      [&](double r) { return std::pow(r, double(d) - 2.0) * inner(r); }, 0.0,
      r_max, 1e-13, 1e-11, 26);
  return omega * rad.value;
}

Cplx bubble_direct(Cplx s, double m0_sq, double m1_sq, int d, double r_max) {
  bubble_guards(s, m0_sq, m1_sq, d);
  const Cplx rs = std::sqrt(s);
  if (!(std::abs(rs.imag()) < 0.9 * std::sqrt(std::min(m0_sq, m1_sq))))
    throw contour_ambiguous(
        "the real parallel slice pinches this close to threshold; "
        "only the reduced path continues analytically");
  auto slice = [&](double r) -> Cplx {
    const double w0_sq = r * r + m0_sq;
    const double w1_sq = r * r + m1_sq;
    // the 1/q^4 tail only sets in for q well past the slice scale, so the
    // truncation must grow with r
    const double x_max = 80.0 * std::max(1.0, r);
    auto f = [&](double q) -> Cplx {
      const Cplx shifted = (q + rs) * (q + rs) + w1_sq;
      return 1.0 / ((q * q + w0_sq) * shifted);
    };
    return integrate_gk(f, -x_max, x_max, 1e-10, 1e-8, 26).value;
  };
  const double omega = 2.0 * std::pow(kPi, (double(d) - 1.0) / 2.0) /
                       std::tgamma((double(d) - 1.0) / 2.0);
  auto rad = integrate_gk(
      [&](double r) { return std::pow(r, double(d) - 2.0) * slice(r); }, 0.0,
      r_max, 1e-9, 1e-7, 18);
  return omega * rad.value;
}

McEstimate qed_reduced_numeric(double e_l, int d, std::uint64_t n_samples,
                               std::uint64_t seed) {
  if (d != 3)
    throw validation_error("the Monte Carlo reduction is wired for d = 3");
  if (!(e_l > 0)) throw validation_error("e_l must be positive");
  if (n_samples == 0) throw validation_error("sample count must be positive");
  if (n_samples > 10000000)
    throw validation_error("sample budget is capped at 1e7");

  constexpr int kBlocks = 64;
  // each pair spends four integrand evaluations: two sampling techniques
  // times two antithetic mirrors
  std::uint64_t pairs_per = n_samples / (4 * kBlocks);
  if (pairs_per == 0) pairs_per = 1;

  const double e = e_l;
  const double se_scale = std::sqrt(e);
  // point density: equal mixture of a heavy-tail shape at scale 1 and the
  // same shape shrunk to the pinch scale sqrt(e), where the integrand mass
  // concentrates; p_s(x) = s / (2 pi (|x|^2 + s^2)^{3/2})
  auto scaled_density = [](double r_sq, double s) {
    return s / (2.0 * kPi * std::pow(r_sq + s * s, 1.5));
  };
  auto point_density = [&](double r_sq) {
    return 0.5 * (scaled_density(r_sq, 1.0) + scaled_density(r_sq, se_scale));
  };
  // coincidence density q(delta) = e / (pi (|delta|^2+e)^2), radius from
  // rho(w) = sqrt(e w / (1-w)); it sits at the photon scale sqrt(e)
  auto near_density = [&](double d_sq) {
    return e / (kPi * (d_sq + e) * (d_sq + e));
  };
  auto integrand = [&](double ux, double uy, double vx, double vy) {
    const double duv = (ux - vx) * (ux - vx) + (uy - vy) * (uy - vy);
    const double u2 = ux * ux + uy * uy;
    const double v2 = vx * vx + vy * vy;
    return 1.0 / ((duv + e) * (e + u2) * (e + v2));
  };
  // radius draw from the mixture: branch uniform picks the scale, inverse
  // CDF gives R(w) = s sqrt(1/(1-w)^2 - 1)
  auto mixture_radius = [&](double wb, double w) {
    const double s = wb < 0.5 ? 1.0 : se_scale;
    const double q = 1.0 / (1.0 - w);
    return s * std::sqrt(q * q - 1.0);
  };
  // one multiple-importance draw: u from the mixture; v either from the
  // mixture (v1) or pinned near u (v2).  The balance denominator
  // p(v)+q(v-u) keeps every weight bounded, including two independent
  // points that happen to collide.
  auto draw = [&](double bu, double wu, double tu, double bv, double wv,
                  double tv, double wd, double td) {
    const double ru = mixture_radius(bu, wu);
    const double ux = ru * std::cos(tu), uy = ru * std::sin(tu);
    const double pu = point_density(ru * ru);

    const double rv = mixture_radius(bv, wv);
    const double v1x = rv * std::cos(tv), v1y = rv * std::sin(tv);
    const double d1_sq = (v1x - ux) * (v1x - ux) + (v1y - uy) * (v1y - uy);
    const double g1 = integrand(ux, uy, v1x, v1y) /
                      (pu * (point_density(rv * rv) + near_density(d1_sq)));

    const double rho = std::sqrt(e * wd / (1.0 - wd));
    const double v2x = ux + rho * std::cos(td), v2y = uy + rho * std::sin(td);
    const double g2 =
        integrand(ux, uy, v2x, v2y) /
        (pu * (point_density(v2x * v2x + v2y * v2y) + near_density(rho * rho)));
    return g1 + g2;
  };

  double block_mean[kBlocks];
  for (int b = 0; b < kBlocks; ++b) {
    SplitMix rng{seed + 0x9e3779b97f4a7c15ULL * (std::uint64_t(b) + 1)};
    double sum = 0.0;
    for (std::uint64_t i = 0; i < pairs_per; ++i) {
      const double bu = rng.u01(), wu = rng.u01(), tu = 2.0 * kPi * rng.u01();
      const double bv = rng.u01(), wv = rng.u01(), tv = 2.0 * kPi * rng.u01();
      const double wd = rng.u01(), td = 2.0 * kPi * rng.u01();
      // antithetic partner keeps the scale branches and mirrors all radii
      const double g =
          0.5 * (draw(bu, wu, tu, bv, wv, tv, wd, td) +
                 draw(bu, 1.0 - wu, tu, bv, 1.0 - wv, tv, 1.0 - wd, td));
      sum += g;
    }
    block_mean[b] = sum / double(pairs_per);
  }
  double mean = 0.0;
  for (int b = 0; b < kBlocks; ++b) mean += block_mean[b];
  mean /= double(kBlocks);
  double var = 0.0;
  for (int b = 0; b < kBlocks; ++b)
    var += (block_mean[b] - mean) * (block_mean[b] - mean);
  const double se = std::sqrt(var / double(kBlocks * (kBlocks - 1)));

  McEstimate out{mean, se, pairs_per * 4 * kBlocks};
  if (!(se <= 0.1 * std::abs(mean)))
    throw insufficient_samples("standard error " + std::to_string(se) +
                               " exceeds 10% of the estimate " +
                               std::to_string(mean));
  return out;
}

double qed_reduced_radial(double e_l) {
  if (!(e_l > 0)) throw validation_error("e_l must be positive");
  // inner cluster in closed form via one Feynman parameter:
  //   int d2v / (((u-v)^2+e)(v^2+e)) = pi * (2/(u^2 w)) log((w+1)/(w-1)),
  //   w = sqrt(1 + 4e/u^2)
  auto f = [&](double r) -> Cplx {
    if (r < 1e-12) return Cplx(0.0);
    const double a = r * r;
    const double w = std::sqrt(1.0 + 4.0 * e_l / a);
    const double lg = 2.0 * std::log(w + 1.0) - std::log(4.0 * e_l / a);
    const double inner = kPi * (2.0 / (a * w)) * lg;
    return Cplx(2.0 * kPi * r / (e_l + a) * inner);
  };
  auto res = integrate_gk(f, 0.0, 1000.0, 1e-12, 1e-10, 30);
  return res.value.real();
}

Cplx extract2(const std::function<Cplx(double)>& f, double eps) {
  return f(4.0 * eps) - 3.0 * f(2.0 * eps) + 2.0 * f(eps);
}

Cplx extract3(const std::function<Cplx(double)>& f, double eps) {
  return f(8.0 * eps) - 7.0 * f(4.0 * eps) + 14.0 * f(2.0 * eps) -
         8.0 * f(eps);
}

double extract2_gain(double p) {
  return std::pow(4.0, p) - 3.0 * std::pow(2.0, p) + 2.0;
}

double extract3_gain(double p) {
  return std::pow(8.0, p) - 7.0 * std::pow(4.0, p) + 14.0 * std::pow(2.0, p) -
         8.0;
}

} // namespace pinchlab
