// Floating-point oracles: the contour residue kernel, the quadratic-model
// singular integral, the two-propagator threshold integrals, the reduced
// two-loop coincidence integral, and the fitting/extraction helpers that
// read off singular powers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/oracle.hpp"
#include "pinchlab/quadrature.hpp"

using namespace pinchlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string err_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

double rel(Cplx got, Cplx want) { return std::abs(got - want) / std::abs(want); }

const std::vector<double> kEpsGrid{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};

std::vector<std::pair<double, Cplx>> scan(const std::function<Cplx(double)>& f) {
  std::vector<std::pair<double, Cplx>> pts;
  for (double e : kEpsGrid) pts.push_back({e, f(e)});
  return pts;
}

// sphere area 2 pi^{n/2} / Gamma(n/2), the constant the closed singular
// coefficient is usually quoted with
double sphere_area(int n) {
  return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

} // namespace

TEST_CASE("residue kernel reproduces the enclosed pole") {
  // symmetric real pair: 2 pi i / (1 - (-1)) = pi i
  Cplx k1 = residue_kernel({1.0, 0.0}, {-1.0, 0.0}, 1.0, 256);
  CHECK(std::abs(k1 - Cplx(0.0, kPi)) <= 1e-10);

  Cplx xi{2.0, 1.0}, eta{-3.0, 0.0};
  Cplx want = Cplx(0.0, 2.0 * kPi) / (xi - eta);
  CHECK(rel(residue_kernel(xi, eta, 1.5, 512), want) <= 1e-8);

  // trapezoid points double => error drops by far more than 4x
  double sep = std::abs(xi - eta);
  double e32 = std::abs(residue_kernel(xi, eta, 0.75 * sep, 32) - want);
  double e64 = std::abs(residue_kernel(xi, eta, 0.75 * sep, 64) - want);
  CHECK(e32 > 0.0);
  CHECK(e64 <= e32 / 4.0);
}

TEST_CASE("residue kernel guards") {
  CHECK(err_kind([] { residue_kernel({1, 0}, {1, 0}, 1.0, 64); }) ==
        "ContourAmbiguous");
  // excluded pole sits exactly on the circle
  CHECK(err_kind([] { residue_kernel({1, 0}, {-1, 0}, 2.0, 64); }) ==
        "ContourAmbiguous");
  CHECK(err_kind([] { residue_kernel({1, 0}, {-1, 0}, -1.0, 64); }) ==
        "ValidationError");
  CHECK(err_kind([] { residue_kernel({1, 0}, {-1, 0}, 1.0, 4); }) ==
        "ValidationError");
}

TEST_CASE("morse integral matches the one-dimensional closed form") {
  // Q = (4), ball 4 y^2 <= c^2: K = atan(c / sqrt(eps)) / sqrt(eps)
  const double c = 2.0;
  for (double eps : {1e-2, 1e-4}) {
    double want = std::atan(c / std::sqrt(eps)) / std::sqrt(eps);
    CHECK(rel(morse_integral({{4.0}}, eps, c), want) <= 1e-12);
  }
}

TEST_CASE("morse singular powers and coefficients") {
  auto id_scan = [](int n) {
    return [n](double e) {
      std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i) q[i][i] = 1.0;
      return Cplx(morse_integral(q, e, 2.0));
    };
  };

  SUBCASE("n=1: eps^{-1/2}") {
    auto f = id_scan(1);
    auto fit = fit_slope(scan([&](double e) { return extract2(f, e); }));
    CHECK(std::abs(fit.slope - (-0.5)) <= 0.02);
    CHECK(fit.r_squared >= 0.999);
    // signed coefficient pi = Gamma(1/2) pi^{1/2}; quoted constant is the
    // sphere area 2, off by pi/2
    double coef = extract2(f, 1e-4).real() /
                  (extract2_gain(-0.5) * std::pow(1e-4, -0.5));
    CHECK(coef == doctest::Approx(kPi).epsilon(1e-2));
    CHECK(coef / sphere_area(1) == doctest::Approx(kPi / 2.0).epsilon(1e-2));
  }
  SUBCASE("n=3: eps^{1/2}") {
    auto f = id_scan(3);
    auto fit = fit_slope(scan([&](double e) { return extract2(f, e); }));
    CHECK(std::abs(fit.slope - 0.5) <= 0.02);
    CHECK(fit.r_squared >= 0.999);
    // signed coefficient -2 pi^2 = Gamma(-1/2) pi^{3/2}
    double coef = extract2(f, 1e-4).real() /
                  (extract2_gain(0.5) * std::pow(1e-4, 0.5));
    CHECK(coef == doctest::Approx(-2.0 * kPi * kPi).epsilon(1e-2));
    CHECK(std::abs(coef) / sphere_area(3) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-2));
  }
  SUBCASE("n=4: eps log eps") {
    auto f = id_scan(4);
    auto fit = fit_slope(scan([&](double e) { return extract2(f, e); }));
    CHECK(std::abs(fit.slope - 1.0) <= 0.02);
    CHECK(fit.r_squared >= 0.999);
    // extract2 maps eps log eps to (2 log 2) eps; coefficient pi^2, half
    // the sphere area 2 pi^2
    double coef = extract2(f, 1e-4).real() / (2.0 * std::log(2.0) * 1e-4);
    CHECK(coef == doctest::Approx(kPi * kPi).epsilon(1e-2));
    CHECK(coef / sphere_area(4) == doctest::Approx(0.5).epsilon(1e-2));
  }
  SUBCASE("n=5: eps^{3/2} needs the cubic extractor") {
    auto f = id_scan(5);
    auto fit = fit_slope(scan([&](double e) { return extract3(f, e); }));
    CHECK(std::abs(fit.slope - 1.5) <= 0.02);
    CHECK(fit.r_squared >= 0.999);
    double coef = extract3(f, 1e-5).real() /
                  (extract3_gain(1.5) * std::pow(1e-5, 1.5));
    CHECK(coef == doctest::Approx(4.0 * std::pow(kPi, 3) / 3.0).epsilon(1e-2));
  }
  SUBCASE("n=3 off-diagonal form: same power, coefficient scales by det") {
    std::vector<std::vector<double>> q{
        {2.0, 0.3, -0.1}, {0.3, 1.5, 0.2}, {-0.1, 0.2, 1.1}};
    auto f = [&](double e) { return Cplx(morse_integral(q, e, 2.0)); };
    auto fit = fit_slope(scan([&](double e) { return extract2(f, e); }));
    CHECK(std::abs(fit.slope - 0.5) <= 0.02);
    double coef_q = extract2(f, 1e-4).real() /
                    (extract2_gain(0.5) * std::pow(1e-4, 0.5));
    auto fi = id_scan(3);
    double coef_i = extract2(fi, 1e-4).real() /
                    (extract2_gain(0.5) * std::pow(1e-4, 0.5));
    const double det = 3.094; // by cofactor expansion of q
    CHECK(coef_i / coef_q == doctest::Approx(std::sqrt(det)).epsilon(1e-2));
  }
  SUBCASE("n=2: logarithm, not a power") {
    auto f = id_scan(2);
    auto pts = scan(f);
    CHECK(fit_slope(pts).r_squared < 0.999);
    auto lf = fit_log(pts);
    CHECK(lf.b.real() == doctest::Approx(-kPi).epsilon(5e-3));
    CHECK(lf.r_squared >= 0.999);
  }
}

TEST_CASE("morse guards") {
  CHECK(err_kind([] { morse_integral({{1, 2}, {2, 1}}, 1e-3, 2.0); }) ==
        "NotPositiveDefinite");
  std::vector<std::vector<double>> big(6, std::vector<double>(6, 0.0));
  for (int i = 0; i < 6; ++i) big[i][i] = 1.0;
  CHECK(err_kind([&] { morse_integral(big, 1e-3, 2.0); }) == "ValidationError");
  CHECK(err_kind([] { morse_integral({{1, 0.5}, {0, 1}}, 1e-3, 2.0); }) ==
        "ValidationError");
  CHECK(err_kind([] { morse_integral({{1, 0}, {0, 1}}, -1e-3, 2.0); }) ==
        "ValidationError");
  CHECK(err_kind([] { morse_integral({{1, 0}, {0, 1, 2}}, 1e-3, 2.0); }) ==
        "ValidationError");
}

TEST_CASE("bubble reduced and direct integrations agree at regular points") {
  for (int d : {3, 5}) {
    for (auto [sr, si] : {std::pair{0.7, 0.21}, {1.3, -0.4}, {0.25, 0.1}}) {
      Cplx s{sr, si};
      Cplx a = bubble_numeric(s, 1.0, 1.21, d, 50.0);
      Cplx b = bubble_direct(s, 1.0, 1.21, d, 50.0);
      CHECK(rel(a, b) <= 1e-4);
    }
  }
}

TEST_CASE("bubble threshold scaling") {
  const double m0 = 1.0, m1 = 1.21;          // masses 1 and 1.1
  const double s_star = -(1.0 + 1.1) * (1.0 + 1.1);
  auto approach = [&](int d) {
    return [&, d](double e) {
      Cplx s = Cplx(s_star, 0.0) + e * std::polar(1.0, -kPi / 2.0);
      return bubble_numeric(s, m0, m1, d, 50.0);
    };
  };
  SUBCASE("d=3: logarithmic") {
    auto pts = scan(approach(3));
    CHECK(fit_slope(pts).r_squared < 0.999); // power law rejected
    auto lf = fit_log(pts);
    CHECK(lf.r_squared >= 0.999);
    CHECK(std::abs(lf.b) > 1.0); // a real log term, not a constant
  }
  SUBCASE("d=5: eps log eps after removing the regular background") {
    auto f = approach(5);
    auto fit = fit_slope(scan([&](double e) { return extract2(f, e); }));
    CHECK(std::abs(fit.slope - 1.0) <= 0.05);
    CHECK(fit.r_squared >= 0.999);
  }
}

TEST_CASE("bubble guards") {
  CHECK(err_kind([] { bubble_numeric({0, 0}, 1.0, 1.21, 3, 50.0); }) ==
        "PoleAtPoint");
  // exactly on the threshold locus
  CHECK(err_kind([] { bubble_numeric({-4.41, 0}, 1.0, 1.21, 3, 50.0); }) ==
        "PoleAtPoint");
  CHECK(err_kind([] { bubble_numeric({1, 0}, 1.0, 1.21, 7, 50.0); }) ==
        "NonConvergent");
  CHECK(err_kind([] { bubble_numeric({1, 0}, 1.0, 1.21, 4, 50.0); }) ==
        "ValidationError");
  CHECK(err_kind([] { bubble_numeric({1, 0}, 0.0, 1.21, 3, 50.0); }) ==
        "ValidationError");
  CHECK(err_kind([] { bubble_direct({-4.41, 0}, 1.0, 1.21, 3, 50.0); }) ==
        "ContourAmbiguous");
}

TEST_CASE("qed reduced integral scales as one over e") {
  // e K(e) is an exact constant; the quadrature sees it to many digits
  double c1 = 1e-1 * qed_reduced_radial(1e-1);
  double c2 = 1e-2 * qed_reduced_radial(1e-2);
  double c3 = 1e-3 * qed_reduced_radial(1e-3);
  CHECK(std::abs(c1 - c2) / c2 <= 1e-5);
  CHECK(std::abs(c3 - c2) / c2 <= 1e-5);

  // independent route: close the angular integral instead of a Feynman
  // parameter
  {
    const double e = 1e-2;
    auto inner = [&](double u) {
      auto f = [&](double r) {
        double a = r * r + u * u + e;
        double b = 2.0 * r * u;
        return Cplx(2.0 * kPi * r /
                    (std::sqrt((a - b) * (a + b)) * (r * r + e)));
      };
      return integrate_gk(f, 0.0, 1000.0, 1e-10, 1e-9, 26).value.real();
    };
    auto g = [&](double u) {
      if (u < 1e-12) return Cplx(0.0);
      return Cplx(2.0 * kPi * u / (e + u * u) * inner(u));
    };
    double alt = integrate_gk(g, 0.0, 1000.0, 1e-8, 1e-7, 22).value.real();
    CHECK(std::abs(alt - qed_reduced_radial(e)) / alt <= 1e-6);
  }
}

TEST_CASE("qed monte carlo agrees with the radial quadrature") {
  auto mc = qed_reduced_numeric(1e-2, 3, 2000000, 12345);
  double rad = qed_reduced_radial(1e-2);
  CHECK(std::abs(mc.value - rad) / rad <= 0.01);
  CHECK(mc.std_error / mc.value <= 0.01);
  CHECK(mc.samples <= 2000000);

  // slope over two decades, one independent seed per point
  std::vector<std::pair<double, Cplx>> pts;
  std::uint64_t i = 0;
  for (double e : {1e-1, 3.162e-2, 1e-2, 3.162e-3, 1e-3}) {
    auto m = qed_reduced_numeric(e, 3, 2000000, 1000003 * (++i));
    pts.push_back({e, Cplx(m.value)});
  }
  auto fit = fit_slope(pts);
  CHECK(std::abs(fit.slope - (-1.0)) <= 0.05);
  CHECK(fit.r_squared >= 0.999);
}

TEST_CASE("qed monte carlo is reproducible") {
  auto a = qed_reduced_numeric(1e-3, 3, 500000, 123);
  auto b = qed_reduced_numeric(1e-3, 3, 500000, 123);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.samples == b.samples);
  auto c = qed_reduced_numeric(1e-3, 3, 500000, 124);
  CHECK(a.value != c.value);
}

TEST_CASE("qed guards") {
  CHECK(err_kind([] { qed_reduced_numeric(0.0, 3, 1000, 1); }) ==
        "ValidationError");
  CHECK(err_kind([] { qed_reduced_numeric(1e-2, 4, 1000, 1); }) ==
        "ValidationError");
  CHECK(err_kind([] { qed_reduced_numeric(1e-2, 3, 0, 1); }) ==
        "ValidationError");
  CHECK(err_kind([] { qed_reduced_numeric(1e-2, 3, 20000000, 1); }) ==
        "ValidationError");
  // far too few samples for a 10% error bar
  CHECK(err_kind([] { qed_reduced_numeric(1e-3, 3, 256, 1); }) ==
        "InsufficientSamples");
  CHECK(err_kind([] { qed_reduced_radial(0.0); }) == "ValidationError");
}

TEST_CASE("power and log fits") {
  SUBCASE("pure power recovered exactly") {
    std::vector<std::pair<double, Cplx>> pts;
    for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3})
      pts.push_back({e, Cplx(3.0 * e * e)});
    auto fit = fit_slope(pts);
    CHECK(std::abs(fit.slope - 2.0) <= 1e-9);
    CHECK(std::abs(fit.intercept - std::log(3.0)) <= 1e-9);
    CHECK(fit.r_squared >= 0.999999);
  }
  SUBCASE("constant samples fit slope zero") {
    std::vector<std::pair<double, Cplx>> pts;
    for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) pts.push_back({e, Cplx(5.0)});
    auto fit = fit_slope(pts);
    CHECK(std::abs(fit.slope) <= 1e-12);
  }
  SUBCASE("mild correction barely moves the slope") {
    std::vector<std::pair<double, Cplx>> pts;
    for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3})
      pts.push_back({e, Cplx(std::sqrt(e) * (1.0 + 0.1 * e))});
    CHECK(fit_slope(pts).slope == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("samples come back sorted largest eps first") {
    std::vector<std::pair<double, Cplx>> pts{{1e-3, Cplx(1.0)},
                                             {1e-1, Cplx(2.0)},
                                             {1e-2, Cplx(1.5)},
                                             {3e-2, Cplx(1.7)},
                                             {3e-3, Cplx(1.2)}};
    auto fit = fit_slope(pts);
    CHECK(fit.samples.front().first == 1e-1);
    CHECK(fit.samples.back().first == 1e-3);
  }
  SUBCASE("complex log fit recovered exactly") {
    Cplx a{2.0, 1.0}, b{-3.0, 0.5};
    std::vector<std::pair<double, Cplx>> pts;
    for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3})
      pts.push_back({e, a + b * std::log(e)});
    auto lf = fit_log(pts);
    CHECK(std::abs(lf.a - a) <= 1e-12);
    CHECK(std::abs(lf.b - b) <= 1e-12);
    CHECK(lf.r_squared >= 0.999999);
  }
  SUBCASE("guards") {
    std::vector<std::pair<double, Cplx>> four{{1e-1, Cplx(1)},
                                              {1e-2, Cplx(1)},
                                              {1e-3, Cplx(1)},
                                              {1e-4, Cplx(1)}};
    CHECK(err_kind([&] { fit_slope(four); }) == "DegenerateSamples");
    std::vector<std::pair<double, Cplx>> narrow{{1e-1, Cplx(1)},
                                                {9e-2, Cplx(1)},
                                                {8e-2, Cplx(1)},
                                                {7e-2, Cplx(1)},
                                                {6e-2, Cplx(1)}};
    CHECK(err_kind([&] { fit_slope(narrow); }) == "DegenerateSamples");
    std::vector<std::pair<double, Cplx>> zero{{1e-1, Cplx(1)},
                                              {1e-2, Cplx(0)},
                                              {1e-3, Cplx(1)},
                                              {1e-4, Cplx(1)},
                                              {1e-5, Cplx(1)}};
    CHECK(err_kind([&] { fit_slope(zero); }) == "DegenerateSamples");
    std::vector<std::pair<double, Cplx>> neg{{1e-1, Cplx(1)},
                                             {-1e-2, Cplx(1)},
                                             {1e-3, Cplx(1)},
                                             {1e-4, Cplx(1)},
                                             {1e-5, Cplx(1)}};
    CHECK(err_kind([&] { fit_log(neg); }) == "DegenerateSamples");
  }
}

TEST_CASE("dyadic extractors annihilate the regular background") {
  auto affine = [](double e) { return Cplx(3.0 + 5.0 * e); };
  CHECK(std::abs(extract2(affine, 1e-3)) <= 1e-12);
  auto quad = [](double e) { return Cplx(3.0 + 5.0 * e + 7.0 * e * e); };
  CHECK(std::abs(extract3(quad, 1e-3)) <= 1e-10);

  // a pure power passes through with the advertised gain
  auto pw = [](double e) { return Cplx(std::pow(e, 0.7)); };
  CHECK(rel(extract2(pw, 1e-3),
            Cplx(extract2_gain(0.7) * std::pow(1e-3, 0.7))) <= 1e-12);
  auto pw15 = [](double e) { return Cplx(std::pow(e, 1.5)); };
  CHECK(rel(extract3(pw15, 1e-3),
            Cplx(extract3_gain(1.5) * std::pow(1e-3, 1.5))) <= 1e-12);

  // the gains vanish exactly on what the stencils are built to kill
  CHECK(extract2_gain(0.0) == 0.0);
  CHECK(extract2_gain(1.0) == 0.0);
  CHECK(extract3_gain(2.0) == 0.0);
  // and a log becomes a constant: extract2 of log(eps) = -log(4)+3log(2)
  auto lg = [](double e) { return Cplx(std::log(e)); };
  CHECK(rel(extract2(lg, 1e-3), Cplx(-std::log(2.0))) <= 1e-12);
}
