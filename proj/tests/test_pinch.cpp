// Pinch candidate enumeration and the exact on-shell solver: parallel spans,
// linear difference stage, massless quadric branches, and classification.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <nlohmann/json.hpp>

#include "pinchlab/diagram.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/expr.hpp"
#include "pinchlab/pinch.hpp"
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

QuadExt qe(const std::string& text) { return parse_scalar(text); }

// Re-expand propagator `i` with the loop momenta pinned to a solved branch.
QuadExt at_branch(const Diagram& dg, std::size_t i, const PinchBranch& br) {
  std::map<int, MomentumExpr> par;
  for (const auto& [loop, coeffs] : br.alpha) {
    MomentumExpr m;
    for (const auto& [e, v] : coeffs) m.add_ext(e, v);
    par[loop] = m;
  }
  return expand_propagator(dg, i, par, {});
}

} // namespace

TEST_CASE("polynomial square factors are split off radicands") {
  Poly x = Poly::var(intern_symbol("x")), y = Poly::var(intern_symbol("y"));

  auto check_split = [](const Poly& f) {
    auto [s, r] = split_square_factor(f);
    CHECK(s * s * r == f);
    return std::pair<Poly, Poly>(s, r);
  };

  auto p1 = check_split((x + y) * (x + y) * (x - y));
  CHECK(!p1.first.is_constant());
  CHECK(p1.second.degree(intern_symbol("x")) == 1);

  auto p2 = check_split(x * x * x);
  CHECK(p2.first == x);
  CHECK(p2.second == x);

  auto p3 = check_split(x * x * x * x);
  CHECK(p3.second.is_constant());

  // perfect squares with rational content collapse to plain rationals
  Poly f4 = (x + Poly(Rational(1))) * (x + Poly(Rational(1)));
  f4 *= Rational(4);
  QuadExt s4 = QuadExt::sqrt_of(f4);
  CHECK(s4.is_rational());
  CHECK(s4 * s4 == QuadExt(RatFunc(f4)));

  // the shape produced by on-shell discriminants: square factors around a
  // squarefree core
  Poly g11 = Poly::var(intern_symbol("x")), core = qe("y^2 - x*3 - 7").rational_part().num();
  Poly f5 = g11 * g11 * (x + y) * (x + y) * core;
  QuadExt s5 = QuadExt::sqrt_of(f5);
  CHECK(!s5.is_rational());
  CHECK(s5.radicand() == core);
  CHECK(s5 * s5 == QuadExt(RatFunc(f5)));
}

TEST_CASE("subset enumeration is size-major and skips duplicate-only sets") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  auto pairs = enumerate_subsets(dg, 2);
  CHECK(pairs.size() == 10);
  CHECK(pairs.front() == std::vector<std::size_t>{0, 1});
  CHECK(pairs.back() == std::vector<std::size_t>{3, 4});

  Diagram cv = load_diagram_file(fixture("two_loop_crossed_vertex.json"));
  auto all = enumerate_subsets(cv, 5);
  CHECK(all.size() == 56); // C(6,2)+C(6,3)+C(6,4)+C(6,5)
  std::vector<std::size_t> five{0, 1, 2, 3, 4};
  CHECK(std::find(all.begin(), all.end(), five) != all.end());

  CHECK(err_kind([&] { enumerate_subsets(dg, 1); }) == "ValidationError");
  CHECK(err_kind([&] { enumerate_subsets(dg, 6); }) == "ValidationError");

  // two copies of the same propagator never form a candidate by themselves
  json j = {{"name", "dup"},
            {"loops", 1},
            {"dimension", "d"},
            {"externals", {"p"}},
            {"gram", {{"p.p", "s"}}},
            {"masses_sq", {{"msq", "msq"}}},
            {"propagators",
             {{{"routing", {1}}, {"shift", json::object()}, {"mass_sq", "msq"}},
              {{"routing", {1}}, {"shift", json::object()}, {"mass_sq", "msq"}},
              {{"routing", {1}}, {"shift", {{"p", 1}}}, {"mass_sq", "msq"}}}}};
  Diagram dup = parse_diagram(j);
  auto sets = enumerate_subsets(dup, 2);
  CHECK(sets.size() == 2); // {0,2} and {1,2}; {0,1} is pure duplication
}

TEST_CASE("one-loop bubble pair pins the classic endpoint solution") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});

  CHECK(sol.classification == PinchClass::Finite);
  CHECK(sol.parallel_rank == 1);
  CHECK(sol.involved_loops == std::vector<int>{1});
  CHECK(sol.clusters == std::vector<std::vector<int>>{{1}});
  CHECK(sol.span.at(1) == std::vector<std::string>{"p"});
  REQUIRE(sol.branches.size() == 1);

  const PinchBranch& br = sol.branches.front();
  QuadExt alpha = br.alpha.at(1).at("p");
  CHECK(alpha == qe("-(s + m2_sq - m1_sq)/(2*s)"));

  REQUIRE(br.conditions.size() == 1);
  CHECK(br.conditions.front() ==
        qe("((s + m2_sq - m1_sq)^2 + 4*s*m1_sq)/(4*s)"));

  // equal masses sit at the symmetric point
  std::map<Sym, Poly> eq{{intern_symbol("m2_sq"), Poly::var(intern_symbol("m1_sq"))}};
  CHECK(alpha.subs(eq) == qe("-1/2"));

  // the imposed difference vanishes identically at the solved point
  CHECK((at_branch(dg, 1, br) - at_branch(dg, 0, br)).is_zero());
  // and the leftover on-shell value is exactly the recorded condition
  CHECK(at_branch(dg, 0, br) == br.conditions.front());
}

TEST_CASE("second bubble pair follows with the opposite shift sign") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {3, 4});

  CHECK(sol.classification == PinchClass::Finite);
  CHECK(sol.parallel_rank == 1);
  CHECK(sol.involved_loops == std::vector<int>{2});
  REQUIRE(sol.branches.size() == 1);

  const PinchBranch& br = sol.branches.front();
  CHECK(br.alpha.at(2).at("p") == qe("(s + m5_sq - m4_sq)/(2*s)"));
  REQUIRE(br.conditions.size() == 1);
  CHECK(br.conditions.front() ==
        qe("((s + m5_sq - m4_sq)^2 + 4*s*m4_sq)/(4*s)"));
}

TEST_CASE("pair classification table over the two-loop propagator") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));

  auto cls = [&](std::size_t i, std::size_t j) {
    PinchSolution s = solve_pinch(dg, {i, j});
    return to_string(s.classification) + ":" +
           (s.note.find("overdetermined") != std::string::npos ? "over"
            : s.note.find("massive on-shell") != std::string::npos
                ? "massive"
                : "");
  };

  CHECK(cls(0, 1) == "Finite:");
  CHECK(cls(3, 4) == "Finite:");
  CHECK(cls(0, 2) == "NonIsolated:over");
  CHECK(cls(0, 3) == "NonIsolated:over");
  CHECK(cls(2, 3) == "NonIsolated:over");
  CHECK(cls(0, 4) == "NonIsolated:massive");
  CHECK(cls(1, 3) == "NonIsolated:massive");
  CHECK(cls(1, 4) == "NonIsolated:massive");

  // bilinear couplings through the two-loop line are out of the solver's reach
  CHECK(err_kind([&] { solve_pinch(dg, {1, 2}); }) == "UnsupportedPinch");
  CHECK(err_kind([&] { solve_pinch(dg, {2, 4}); }) == "UnsupportedPinch");
  try {
    solve_pinch(dg, {2, 4});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bilinear") != std::string::npos);
  }
}

TEST_CASE("vertex chains solve at every parallel rank") {
  Diagram dg = load_diagram_file(fixture("one_loop_vertex_k.json"));
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<std::size_t> I;
    for (std::size_t i = 0; i <= k; ++i) I.push_back(i);
    PinchSolution sol = solve_pinch(dg, I);
    CAPTURE(k);
    CHECK(sol.classification == PinchClass::Finite);
    CHECK(sol.parallel_rank == static_cast<int>(k));
    REQUIRE(sol.branches.size() == 1);
    const PinchBranch& br = sol.branches.front();
    for (const auto& [e, v] : br.alpha.at(1)) {
      (void)e;
      CHECK(v.is_rational());
    }
    // every difference imposed on the chain is annihilated identically
    for (std::size_t i = 1; i <= k; ++i)
      CHECK((at_branch(dg, i, br) - at_branch(dg, 0, br)).is_zero());
    REQUIRE(br.conditions.size() == 1);
    CHECK(at_branch(dg, 0, br) == br.conditions.front());
    CHECK(!br.conditions.front().is_zero());
  }
}

TEST_CASE("massless crossed vertex resolves all four radical branches") {
  Diagram dg = load_diagram_file(fixture("qed_crossed_vertex.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1, 2, 3, 4});

  CHECK(sol.classification == PinchClass::Finite);
  CHECK(sol.parallel_rank == 4);
  CHECK(sol.clusters == std::vector<std::vector<int>>{{1, 2}});
  CHECK(sol.span.at(1) == std::vector<std::string>{"p1", "p2"});
  CHECK(sol.span.at(2) == std::vector<std::string>{"p1", "p2"});
  REQUIRE(sol.branches.size() == 4);

  Poly disc = qe("g12^2 - g11*g22").rational_part().num();
  QuadExt alpha_sum, slope_prod_sum;
  for (const PinchBranch& br : sol.branches) {
    // both massless shells and both linear differences vanish identically
    for (std::size_t i = 0; i < 4; ++i) CHECK(at_branch(dg, i, br).is_zero());
    // the coupling line carries the single surviving condition
    REQUIRE(br.conditions.size() == 1);
    CHECK(!br.conditions.front().is_zero());
    CHECK(at_branch(dg, 4, br) == br.conditions.front());
    // all four branches live in the same squarefree extension
    QuadExt b1 = br.alpha.at(1).at("p2");
    CHECK(!b1.is_rational());
    CHECK(b1.radicand() == disc);
    alpha_sum += b1;
  }
  // radical parts cancel pairwise across conjugate branches
  CHECK(alpha_sum.is_rational());

  // numeric slopes q1/p2 over q1/p1 land on the two null directions of the
  // quadratic form: (-g12 +- sqrt(g12^2-g11*g22))/g22
  std::map<Sym, Complex> kin{{intern_symbol("g11"), Complex(1.0, 0.0)},
                             {intern_symbol("g12"), Complex(2.0, 0.0)},
                             {intern_symbol("g22"), Complex(1.0, 0.0)},
                             {intern_symbol("ml_sq"), Complex(1.0, 0.0)}};
  auto pts = eval_pinch(sol, kin);
  REQUIRE(pts.size() == 4);
  std::vector<double> slopes;
  for (const auto& pt : pts)
    slopes.push_back((pt.at(1).at("p2") / pt.at(1).at("p1")).real());
  std::sort(slopes.begin(), slopes.end());
  CHECK(slopes.front() == doctest::Approx(-2.0 - std::sqrt(3.0)).epsilon(1e-10));
  CHECK(slopes.back() == doctest::Approx(-2.0 + std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("generic-mass crossed vertex is out of radical reach") {
  Diagram dg = load_diagram_file(fixture("two_loop_crossed_vertex.json"));
  CHECK(err_kind([&] { solve_pinch(dg, {0, 1, 2, 3, 4}); }) == "UnsupportedPinch");
}

TEST_CASE("degenerate span Gram flags a cycle at infinity") {
  json j = {{"name", "collinear"},
            {"loops", 1},
            {"dimension", "d"},
            {"externals", {"p1", "p2"}},
            {"gram",
             {{"p1.p1", "s11"}, {"p1.p2", "2*s11"}, {"p2.p2", "4*s11"}}},
            {"masses_sq", {{"msq", "msq"}}},
            {"propagators",
             {{{"routing", {1}}, {"shift", json::object()}, {"mass_sq", "msq"}},
              {{"routing", {1}}, {"shift", {{"p1", 1}}}, {"mass_sq", "msq"}},
              {{"routing", {1}}, {"shift", {{"p2", 1}}}, {"mass_sq", "msq"}}}}};
  Diagram dg = parse_diagram(j);
  PinchSolution sol = solve_pinch(dg, {0, 1, 2});
  CHECK(sol.classification == PinchClass::AtInfinity);
  CHECK(sol.note.find("cycle at infinity") != std::string::npos);
  CHECK(sol.branches.empty());
  CHECK(pinch_to_json(sol)["classification"] == "AtInfinity");
}

TEST_CASE("pinch coefficients are scale invariant") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});
  QuadExt alpha = sol.branches.front().alpha.at(1).at("p");

  Poly lam2 = Poly::var(intern_symbol("lam")) * Poly::var(intern_symbol("lam"));
  std::map<Sym, Poly> scale;
  for (const char* s : {"s", "m1_sq", "m2_sq"})
    scale.emplace(intern_symbol(s), lam2 * Poly::var(intern_symbol(s)));
  CHECK(alpha.subs(scale) == alpha);
}

TEST_CASE("numeric pinch evaluation and pole detection") {
  Diagram dg = load_diagram_file(fixture("two_loop_propagator.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1});

  std::map<Sym, Complex> kin{{intern_symbol("s"), Complex(1.0, 0.0)},
                             {intern_symbol("m1_sq"), Complex(1.0, 0.0)},
                             {intern_symbol("m2_sq"), Complex(4.0, 0.0)}};
  auto pts = eval_pinch(sol, kin);
  REQUIRE(pts.size() == 1);
  CHECK(pts.front().at(1).at("p").real() == doctest::Approx(-2.0).epsilon(1e-14));

  kin[intern_symbol("s")] = Complex(0.0, 0.0);
  CHECK(err_kind([&] { eval_pinch(sol, kin); }) == "PoleAtPoint");
}

TEST_CASE("pinch reports serialize with re-parsable expressions") {
  Diagram dg = load_diagram_file(fixture("qed_crossed_vertex.json"));
  PinchSolution sol = solve_pinch(dg, {0, 1, 2, 3, 4});
  json j = pinch_to_json(sol);

  CHECK(j["subset"] == json({0, 1, 2, 3, 4}));
  CHECK(j["classification"] == "Finite");
  CHECK(j["parallel_rank"] == 4);
  CHECK(j["span"]["q1"] == json({"p1", "p2"}));
  REQUIRE(j["branches"].size() == 4);

  for (std::size_t b = 0; b < 4; ++b) {
    const auto& jb = j["branches"][b];
    for (const auto& [loop, coeffs] : sol.branches[b].alpha)
      for (const auto& [e, v] : coeffs) {
        QuadExt back = parse_scalar(
            jb["alpha"]["q" + std::to_string(loop)][e].get<std::string>());
        CHECK(back == v);
      }
    QuadExt cond = parse_scalar(jb["conditions"][0].get<std::string>());
    CHECK(cond == sol.branches[b].conditions.front());
  }
}
