#include "pinchlab/subst.hpp"

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {

// One generic term-by-term evaluator: K is RatFunc or QuadExt.
template <class K>
K subst_poly(const Poly& p, const std::map<Sym, K>& repl) {
  K acc{Rational(0)};
  for (const auto& [mono, coeff] : p.terms()) {
    K term{coeff};
    for (const auto& [s, e] : mono) {
      auto it = repl.find(s);
      K base = it != repl.end() ? it->second : K(RatFunc(Poly::var(s)));
      term *= base.pow(static_cast<long>(e));
    }
    acc += term;
  }
  return acc;
}

Poly pow_poly(const Poly& b, unsigned e) {
  Poly acc(Rational(1));
  for (unsigned i = 0; i < e; ++i) acc = acc * b;
  return acc;
}

// Rational-valued replacement, reorganized: terms sharing a denominator are
// summed as raw fractions first, so the expensive cancellation gcd runs once
// per distinct denominator instead of once per added term.
RatFunc subst_poly_grouped(const Poly& p, const std::map<Sym, RatFunc>& repl) {
  std::vector<std::pair<Poly, Poly>> groups; // (numerator sum, denominator)
  for (const auto& [mono, coeff] : p.terms()) {
    Poly tn{coeff};
    Poly td{Rational(1)};
    for (const auto& [s, e] : mono) {
      auto it = repl.find(s);
      if (it == repl.end()) {
        tn = tn * pow_poly(Poly::var(s), e);
      } else {
        tn = tn * pow_poly(it->second.num(), e);
        td = td * pow_poly(it->second.den(), e);
      }
    }
    bool merged = false;
    for (auto& g : groups)
      if (g.second == td) {
        g.first = g.first + tn;
        merged = true;
        break;
      }
    if (!merged) groups.emplace_back(std::move(tn), std::move(td));
  }
  RatFunc acc;
  for (auto& g : groups) acc += RatFunc(std::move(g.first), std::move(g.second));
  return acc;
}

} // namespace

RatFunc subst_scalar(const Poly& p, const std::map<Sym, RatFunc>& repl) {
  return subst_poly_grouped(p, repl);
}

RatFunc subst_scalar(const RatFunc& f, const std::map<Sym, RatFunc>& repl) {
  RatFunc d = subst_poly_grouped(f.den(), repl);
  if (d.is_zero()) throw division_error("denominator vanishes under substitution");
  return subst_poly_grouped(f.num(), repl) / d;
}

QuadExt subst_scalar(const Poly& p, const std::map<Sym, QuadExt>& repl) {
  return subst_poly(p, repl);
}

QuadExt subst_scalar(const RatFunc& f, const std::map<Sym, QuadExt>& repl) {
  QuadExt d = subst_poly(f.den(), repl);
  if (d.is_zero()) throw division_error("denominator vanishes under substitution");
  return subst_poly(f.num(), repl) / d;
}

} // namespace pinchlab
