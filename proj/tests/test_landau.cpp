// Locus polynomials from solved pinches: denominator clearing and conjugate
// norms, the bordered Gram determinant for one-loop chains, the five-pinch
// block determinant, and the value/gradient determinant.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdlib>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>

#include "pinchlab/diagram.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/expr.hpp"
#include "pinchlab/landau.hpp"
#include "pinchlab/linalg.hpp"
#include "pinchlab/pinch.hpp"
#include "pinchlab/subst.hpp"
#include "pinchlab/symbols.hpp"

using namespace pinchlab;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
  const char* root = std::getenv("PINCHLAB_FIXTURES");
  return std::string(root ? root : "fixtures") + "/" + name;
}

std::string err_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

RatFunc rf(const std::string& text) {
  QuadExt q = parse_scalar(text);
  REQUIRE(q.is_rational());
  return q.rational_part();
}

Rational rnd_rat(std::mt19937& rng) {
  long n = 1 + long(rng() % 23);
  long d = 1 + long(rng() % 7);
  return Rational(n, d) * (rng() % 2 ? 1 : -1);
}

// Synthetic one-loop chain with a rational pinch point: the loop pinches at
// x = sum_i c_i p_i over rational 3-vectors, with every mass chosen so the
// on-shell system closes there exactly (Euclidean squares are negative).
using Vec3 = std::array<Rational, 3>;

Rational dot3(const Vec3& u, const Vec3& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

Diagram chain_on_locus(const std::vector<Vec3>& p, const std::vector<Rational>& c,
                       const Rational& mass_bump) {
  Vec3 x{0, 0, 0};
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int t = 0; t < 3; ++t) x[t] += c[i] * p[i][t];
  json doc;
  doc["name"] = "chain_on_locus";
  doc["loops"] = 1;
  doc["dimension"] = "d";
  json grams = json::object();
  std::vector<std::string> exts;
  for (std::size_t i = 0; i < p.size(); ++i)
    exts.push_back("p" + std::to_string(i + 1));
  doc["externals"] = exts;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i; j < p.size(); ++j)
      grams[exts[i] + "." + exts[j]] = to_string(dot3(p[i], p[j]));
  doc["gram"] = grams;
  json masses = json::object();
  masses["m0_sq"] = to_string(-dot3(x, x) + mass_bump);
  json props = json::array();
  props.push_back({{"routing", {1}}, {"shift", json::object()}, {"mass_sq", "m0_sq"}});
  for (std::size_t i = 0; i < p.size(); ++i) {
    Vec3 xi{x[0] + p[i][0], x[1] + p[i][1], x[2] + p[i][2]};
    std::string key = "m" + std::to_string(i + 1) + "_sq";
    masses[key] = to_string(-dot3(xi, xi));
    props.push_back({{"routing", {1}},
                     {"shift", {{exts[i], 1}}},
                     {"mass_sq", key}});
  }
  doc["masses_sq"] = masses;
  doc["propagators"] = props;
  return parse_diagram(doc);
}

} // namespace

TEST_CASE("propagator-pair condition clears to the threshold polynomial") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});
  REQUIRE(sol.classification == PinchClass::Finite);
  REQUIRE(sol.branches.size() == 1);

  // pinch coefficient along p
  CHECK(sol.branches[0].alpha.at(1).at("p") ==
        parse_scalar("-(s + m2_sq - m1_sq)/(2*s)"));

  LandauPolynomial lp = landau_from_pinch(sol);
  CHECK(lp.branch.empty());
  CHECK(lp.value.is_rational());

  Poly expect = rf("s^2 + m1_sq^2 + m2_sq^2 + 2*s*m1_sq + 2*s*m2_sq"
                   " - 2*m1_sq*m2_sq")
                    .num();
  CHECK(lp.poly == expect);

  // the locus is s = -(m1 +- m2)^2, exactly, for random rational masses
  Sym s = intern_symbol("s"), m1 = intern_symbol("m1_sq"), m2 = intern_symbol("m2_sq");
  std::mt19937 rng(77);
  for (int it = 0; it < 10; ++it) {
    Rational ma(1 + long(rng() % 40), 1 + long(rng() % 9));
    Rational mb(1 + long(rng() % 40), 1 + long(rng() % 9));
    for (int sign : {+1, -1}) {
      Rational root = -(ma + sign * mb) * (ma + sign * mb);
      std::map<Sym, Poly> at{{s, Poly(root)}, {m1, Poly(ma * ma)}, {m2, Poly(mb * mb)}};
      CHECK(lp.poly.subs(at).is_zero());
      at[s] = Poly(root + 1);
      CHECK(!lp.poly.subs(at).is_zero());
    }
  }

  // swapping the two masses maps the polynomial to itself
  std::map<Sym, Poly> swap{{m1, Poly::var(m2)}, {m2, Poly::var(m1)}};
  CHECK(lp.poly.subs(swap) == lp.poly);
  // quadratic in the invariant
  CHECK(lp.poly.coeff_of(s, 2) == Poly(Rational(1)));
  CHECK(lp.poly.coeff_of(s, 3).is_zero());

  json j = landau_to_json(lp);
  CHECK(j["subset"] == std::vector<std::size_t>{0, 1});
  CHECK(!j.contains("branch"));
  QuadExt back = parse_scalar(j["poly"].get<std::string>());
  CHECK(back == QuadExt(RatFunc(lp.poly)));
}

TEST_CASE("massless pair condition reduces to the invariant itself") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  for (auto& pr : dg.propagators) pr.mass = RatFunc();
  PinchSolution sol = solve_pinch(dg, {0, 1});
  REQUIRE(sol.classification == PinchClass::Finite);
  LandauPolynomial lp = landau_from_pinch(sol);
  CHECK(lp.poly == Poly::var(intern_symbol("s")));
}

TEST_CASE("chain condition equals the classical locus function at the pinch") {
  // two-pinch on the first loop of the crossed vertex: the locus function
  // L = (a+1)(a^2 s11 + m1^2) - a((a+1)^2 s11 + m2^2) collapses to the
  // residual condition once a sits at the pinch coefficient.
  Diagram dg = load_diagram_file(fixture("two_loop_crossed_vertex.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});
  REQUIRE(sol.classification == PinchClass::Finite);
  LandauPolynomial lp = landau_from_pinch(sol);
  REQUIRE(lp.value.is_rational());

  Sym a = intern_symbol("a_probe");
  Poly A = Poly::var(a);
  Poly s11 = Poly::var(intern_symbol("s11"));
  Poly m1 = Poly::var(intern_symbol("m1_sq"));
  Poly m2 = Poly::var(intern_symbol("m2_sq"));
  Poly one(Rational(1));
  Poly L = (A + one) * (A * A * s11 + m1) - A * ((A + one) * (A + one) * s11 + m2);

  QuadExt alpha = sol.branches[0].alpha.at(1).at("p1");
  REQUIRE(alpha.is_rational());
  std::map<Sym, RatFunc> at{{a, alpha.rational_part()}};
  CHECK(subst_scalar(RatFunc(L), at) == lp.value.rational_part());
}

TEST_CASE("bordered Gram determinant matches the pair condition locus") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});
  LandauPolynomial lp = landau_from_pinch(sol);

  Poly B = bordered_gram_det(dg, {0, 1});
  CHECK(B.normalized() == lp.poly);

  // equal masses m = 3: threshold at s = -(2m)^2 = -36
  Sym s = intern_symbol("s"), m1 = intern_symbol("m1_sq"), m2 = intern_symbol("m2_sq");
  std::map<Sym, Poly> at{{s, Poly(Rational(-36))}, {m1, Poly(Rational(9))},
                         {m2, Poly(Rational(9))}};
  CHECK(B.subs(at).is_zero());

  // shape guards
  CHECK(err_kind([&] { bordered_gram_det(dg, {}); }) == "ShapeError");
  CHECK(err_kind([&] { bordered_gram_det(dg, {0, 2}); }) == "ShapeError");
  CHECK(err_kind([&] { bordered_gram_det(dg, {2}); }) == "ShapeError");
}

TEST_CASE("collinear externals push the pinch to infinity") {
  // p2 = 2 p1 makes the span Gram singular: the parallel quadratic form
  // degenerates and the subset is classified at infinity.
  Diagram dg = load_diagram_file(fixture("one_loop_vertex_k.json"));
  dg.gram[{"p1", "p2"}] = rf("2*s11");
  dg.gram[{"p2", "p2"}] = rf("4*s11");
  PinchSolution sol = solve_pinch(dg, {0, 1, 2});
  CHECK(sol.classification == PinchClass::AtInfinity);
  RatFunc dG = det_bareiss(dg.gram_matrix({"p1", "p2"}));
  CHECK(dG.is_zero());
  CHECK(err_kind([&] { landau_from_pinch(sol); }) == "NotFinite");
}

TEST_CASE("five-pinch block determinant factors through the transfer bracket") {
  // with sigma/rho eliminating V1, V3 from the V5 row, the determinant is
  // beta1 * alpha2 * detG * (a5 - a2 - a4 - sigma1 (a2 - a1) - rho1 a1
  //   - sigma2 (a4 - a3) - rho2 a3)
  Sym gs = intern_symbol("detG_probe");
  RatFunc g = RatFunc(Poly::var(gs));
  std::vector<RatFunc> av;
  for (int i = 1; i <= 5; ++i)
    av.push_back(RatFunc(Poly::var(intern_symbol("a" + std::to_string(i) + "_probe"))));

  std::mt19937 rng(4242);
  for (int it = 0; it < 10; ++it) {
    Rational a1 = rnd_rat(rng), b1 = rnd_rat(rng);
    Rational a2 = rnd_rat(rng), b2 = rnd_rat(rng);
    if (b1 == 0 || a2 == 0) continue;
    FivePinchFrame fr;
    fr.alpha1 = QuadExt(a1);
    fr.beta1 = QuadExt(b1);
    fr.alpha2 = QuadExt(a2);
    fr.beta2 = QuadExt(b2);
    for (const auto& a : av) fr.a.push_back(QuadExt(a));

    QuadExt lhs = five_pinch_block_det(fr, g);

    Rational s1 = (a2 * b1 - a1 * b2) / b1;
    Rational r1 = b2 / b1;
    Rational r2 = (a1 + 1) / a2;
    Rational s2 = (b1 - 1) - (a1 + 1) * b2 / a2;
    RatFunc bracket = av[4] - av[1] - av[3] - RatFunc(s1) * (av[1] - av[0]) -
                      RatFunc(r1) * av[0] - RatFunc(s2) * (av[3] - av[2]) -
                      RatFunc(r2) * av[2];
    QuadExt rhs{RatFunc(b1 * a2) * g * bracket};
    CHECK(lhs == rhs);
  }

  FivePinchFrame bad;
  bad.a.resize(4);
  CHECK(err_kind([&] { five_pinch_block_det(bad, g); }) == "ShapeError");
}

TEST_CASE("lepton-pair vertex five-pinch determinant tracks each branch condition") {
  Diagram dg = load_diagram_file(fixture("qed_crossed_vertex.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1, 2, 3, 4});
  REQUIRE(sol.classification == PinchClass::Finite);
  REQUIRE(sol.parallel_rank == 4);
  REQUIRE(sol.branches.size() >= 2);

  RatFunc det_g = det_bareiss(dg.gram_matrix({"p1", "p2"}));
  for (std::size_t b = 0; b < sol.branches.size(); ++b) {
    LandauPolynomial fp = five_pinch_det(dg, sol, b);
    LandauPolynomial base = landau_from_pinch(sol, b);
    REQUIRE(!base.value.is_zero());

    QuadExt beta1 = sol.branches[b].alpha.at(1).at("p2");
    QuadExt alpha2 = sol.branches[b].alpha.at(2).at("p1");
    QuadExt quotient = beta1 * alpha2 * QuadExt(det_g);
    CHECK(!quotient.is_zero());
    CHECK(fp.value == quotient * base.value);
    CHECK(fp.normalization.find("ratio to the residual condition") != std::string::npos);
    CHECK(!fp.branch.empty());
  }

  // a two-prop subset is not a five-pinch block
  PinchSolution pair = solve_pinch(dg, {0, 1});
  if (pair.classification == PinchClass::Finite)
    CHECK(err_kind([&] { five_pinch_det(dg, pair); }) == "ShapeError");
}

TEST_CASE("value/gradient determinant reproduces the arc-length locus function") {
  // for the propagator pair, the determinant with a unit-direction gradient
  // equals -2a sqrt(s) ((a+1)^2 s + m2^2) + 2(a+1) sqrt(s) (a^2 s + m1^2)
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});
  LandauPolynomial vgd = value_gradient_det(dg, sol);

  RatFunc s = rf("s"), em1 = rf("m1_sq"), em2 = rf("m2_sq");
  QuadExt alpha = sol.branches[0].alpha.at(1).at("p");
  QuadExt sqrt_s = QuadExt::sqrt_of(s);
  QuadExt one{Rational(1)}, two{Rational(2)};
  QuadExt expect = QuadExt() - two * alpha * sqrt_s *
                       ((alpha + one) * (alpha + one) * QuadExt(s) + QuadExt(em2)) +
                   two * (alpha + one) * sqrt_s *
                       (alpha * alpha * QuadExt(s) + QuadExt(em1));
  CHECK(vgd.value == expect);

  // ... which is 2 sqrt(s) times the plain residual condition
  LandauPolynomial base = landau_from_pinch(sol);
  CHECK(vgd.value == two * sqrt_s * base.value);
  CHECK(vgd.normalization.find("unit direction") != std::string::npos);

  // the cleared polynomial cuts the same locus: conjugate norm of 2 sqrt(s) L
  // is 4 s L^2, so the threshold polynomial divides it
  Poly q = divexact(vgd.poly, base.poly);
  CHECK(!q.is_zero());

  // shape guard: adding a massless single-loop spectator keeps the pinch
  // finite but makes the matrix 3x2
  Diagram dg2 = dg;
  dg2.propagators[3].mass = RatFunc();
  PinchSolution tri = solve_pinch(dg2, {0, 1, 3});
  REQUIRE(tri.classification == PinchClass::Finite);
  CHECK(err_kind([&] { value_gradient_det(dg2, tri); }) == "ShapeError");
}

TEST_CASE("zero-rank value/gradient determinant is the condition itself") {
  // a rank-0 solution leaves no gradient columns: the determinant collapses
  // to the single propagator value at the (trivial) pinch point
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol;
  sol.subset = {0};
  sol.classification = PinchClass::Finite;
  sol.parallel_rank = 0;
  sol.involved_loops = {1};
  sol.clusters = {{1}};
  sol.span[1] = {};
  PinchBranch br;
  br.alpha[1] = {};
  br.conditions.push_back(parse_scalar("m1_sq"));
  sol.branches.push_back(br);

  LandauPolynomial vgd = value_gradient_det(dg, sol);
  CHECK(vgd.poly == Poly::var(intern_symbol("m1_sq")));
  LandauPolynomial lp = landau_from_pinch(sol);
  CHECK(lp.poly == vgd.poly);
}

TEST_CASE("chain locus detectors agree on and off the singular locus") {
  std::mt19937 rng(99);
  auto v3 = [&](void) -> Vec3 { return {rnd_rat(rng), rnd_rat(rng), rnd_rat(rng)}; };

  for (std::size_t nshift : {1u, 2u, 3u}) {
    std::vector<Vec3> p;
    for (std::size_t i = 0; i < nshift; ++i) p.push_back(v3());
    std::vector<Rational> c;
    for (std::size_t i = 0; i < nshift; ++i) c.push_back(rnd_rat(rng));

    std::vector<std::size_t> I;
    for (std::size_t i = 0; i <= nshift; ++i) I.push_back(i);

    // on the locus: the residual condition closes and both determinants vanish
    Diagram on = chain_on_locus(p, c, Rational(0));
    PinchSolution sol_on = solve_pinch(on, I);
    REQUIRE(sol_on.classification == PinchClass::Finite);
    LandauPolynomial lp_on = landau_from_pinch(sol_on);
    CHECK(lp_on.poly.is_zero());
    CHECK(lp_on.normalization.find("trivial locus") != std::string::npos);
    CHECK(bordered_gram_det(on, I).is_zero());
    CHECK(value_gradient_det(on, sol_on).value.is_zero());

    // off the locus: all three detectors are nonzero
    Diagram off = chain_on_locus(p, c, Rational(5, 3));
    PinchSolution sol_off = solve_pinch(off, I);
    REQUIRE(sol_off.classification == PinchClass::Finite);
    LandauPolynomial lp_off = landau_from_pinch(sol_off);
    CHECK(!lp_off.poly.is_zero());
    CHECK(!bordered_gram_det(off, I).is_zero());
    CHECK(!value_gradient_det(off, sol_off).value.is_zero());
  }
}

TEST_CASE("radical conditions clear through the conjugate norm") {
  // massless crossed-vertex five-pinch conditions live in a quadratic
  // extension; the cleared polynomial must be radical-free and re-parsable
  Diagram dg = load_diagram_file(fixture("qed_crossed_vertex.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1, 2, 3, 4});
  for (std::size_t b = 0; b < sol.branches.size(); ++b) {
    LandauPolynomial lp = landau_from_pinch(sol, b);
    if (lp.value.is_rational()) continue;
    CHECK(lp.normalization.find("conjugate norm") != std::string::npos);
    QuadExt back = parse_scalar(lp.poly.str());
    CHECK(back == QuadExt(RatFunc(lp.poly)));
    json j = landau_to_json(lp);
    CHECK(j.contains("branch"));
  }
}
