#include "pinchlab/poly.hpp"

#include <algorithm>
#include <sstream>

#include "pinchlab/errors.hpp"

namespace pinchlab {

// ---------------------------------------------------------------- rationals

Rational square_content(const Rational& a) {
  if (a == 0) return Rational(1);
  // Square part of an integer by trial division; radicands stay small here
  // (cleared kinematic data), so no factorization machinery is needed.
  auto square_part = [](BigInt n) {
    if (n < 0) n = -n;
    BigInt sq(1);
    for (BigInt p(2); p * p <= n; ++p) {
      while (n % (p * p) == 0) {
        n /= p * p;
        sq *= p;
      }
      // guard against huge primes: stop once p is past a small bound and n has
      // no small square factors left
      if (p > 100000) break;
    }
    return sq;
  };
  return Rational(square_part(num(a)), square_part(den(a)));
}

bool exact_sqrt(const Rational& a, Rational& root) {
  if (a < 0) return false;
  if (a == 0) {
    root = 0;
    return true;
  }
  BigInt rn = boost::multiprecision::sqrt(num(a));
  BigInt rd = boost::multiprecision::sqrt(den(a));
  if (rn * rn == num(a) && rd * rd == den(a)) {
    root = Rational(rn, rd);
    return true;
  }
  return false;
}

// ---------------------------------------------------------------- monomials

unsigned total_degree(const Monomial& m) {
  unsigned d = 0;
  for (const auto& [s, e] : m) d += e;
  return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

// a divisible by b -> quotient in q.
static bool mono_div(const Monomial& a, const Monomial& b, Monomial& q) {
  q.clear();
  std::size_t i = 0;
  for (const auto& [s, e] : b) {
    while (i < a.size() && a[i].first < s) q.push_back(a[i++]);
    if (i == a.size() || a[i].first != s || a[i].second < e) return false;
    if (a[i].second > e) q.emplace_back(s, a[i].second - e);
    ++i;
  }
  while (i < a.size()) q.push_back(a[i++]);
  return true;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  // lex: scan variables in id order; the monomial with the higher exponent on
  // the earliest differing variable is the larger one.
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first != b[j].first) {
      // the smaller id has a positive exponent on a more significant variable
      return a[i].first > b[j].first; // a has later id => a smaller
    }
    if (a[i].second != b[j].second) return a[i].second < b[j].second;
    ++i;
    ++j;
  }
  return i == a.size() && j != b.size() ? true : false;
}

// ---------------------------------------------------------------- poly core

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(Sym s, unsigned e) {
  Poly p;
  if (e == 0) return Poly(Rational(1));
  p.terms_.emplace(Monomial{{s, e}}, Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) throw division_error("constant_value on non-constant polynomial");
  return terms_.begin()->second;
}

unsigned Poly::degree() const {
  if (terms_.empty()) return 0;
  return total_degree(terms_.rbegin()->first);
}

unsigned Poly::degree(Sym s) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m)
      if (v == s) d = std::max(d, e);
  return d;
}

bool Poly::depends_on(Sym s) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m)
      if (v == s) return true;
  return false;
}

const Monomial& Poly::leading_monomial() const { return terms_.rbegin()->first; }
const Rational& Poly::leading_coeff() const { return terms_.rbegin()->second; }

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coef] : terms_) coef *= c;
  return *this;
}

bool Poly::operator<(const Poly& o) const {
  auto it = terms_.begin();
  auto jt = o.terms_.begin();
  GrlexLess less;
  for (; it != terms_.end() && jt != o.terms_.end(); ++it, ++jt) {
    if (less(it->first, jt->first)) return true;
    if (less(jt->first, it->first)) return false;
    if (it->second != jt->second) return it->second < jt->second;
  }
  return it == terms_.end() && jt != o.terms_.end();
}

Poly Poly::pow(unsigned e) const {
  Poly acc(Rational(1));
  Poly base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

Poly Poly::derivative(Sym s) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k].first != s) continue;
      Monomial dm = m;
      Rational dc = c * Rational(m[k].second);
      if (dm[k].second == 1)
        dm.erase(dm.begin() + static_cast<long>(k));
      else
        --dm[k].second;
      r.add_term(dm, dc);
    }
  }
  return r;
}

template <class T>
static T eval_impl(const Poly::Terms& terms, const std::map<Sym, T>& point) {
  T acc{};
  for (const auto& [m, c] : terms) {
    T t;
    if constexpr (std::is_same_v<T, Rational>)
      t = c;
    else
      t = T(to_double(c));
    for (const auto& [s, e] : m) {
      auto it = point.find(s);
      if (it == point.end())
        throw pole_at_point("evaluation point missing symbol '" + symbol_name(s) + "'");
      for (unsigned k = 0; k < e; ++k) t *= it->second;
    }
    acc += t;
  }
  return acc;
}

Rational Poly::eval(const std::map<Sym, Rational>& point) const {
  return eval_impl(terms_, point);
}
Complex Poly::eval(const std::map<Sym, Complex>& point) const {
  return eval_impl(terms_, point);
}

Poly Poly::subs(const std::map<Sym, Poly>& repl) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    Poly t(c);
    for (const auto& [s, e] : m) {
      auto it = repl.find(s);
      if (it == repl.end())
        t = t * Poly::var(s, e);
      else
        t = t * it->second.pow(e);
    }
    r += t;
  }
  return r;
}

Rational Poly::content() const {
  if (terms_.empty()) return Rational(0);
  // gcd of numerators over lcm of denominators
  BigInt g(0), l(1);
  for (const auto& [m, c] : terms_) {
    g = boost::multiprecision::gcd(g, num(c));
    l = l / boost::multiprecision::gcd(l, den(c)) * den(c);
  }
  if (g < 0) g = -g;
  return Rational(g, l);
}

Poly Poly::primitive_part() const {
  if (terms_.empty()) return *this;
  Rational c = content();
  Poly r = *this;
  r *= Rational(1) / c;
  return r;
}

Poly Poly::normalized() const {
  if (terms_.empty()) return *this;
  Poly r = primitive_part();
  if (r.leading_coeff() < 0) r *= Rational(-1);
  return r;
}

std::map<unsigned, Poly> Poly::univariate_in(Sym x) const {
  std::map<unsigned, Poly> out;
  for (const auto& [m, c] : terms_) {
    unsigned e = 0;
    Monomial rest;
    for (const auto& [s, k] : m) {
      if (s == x)
        e = k;
      else
        rest.push_back({s, k});
    }
    out[e].add_term(rest, c);
  }
  return out;
}

Poly Poly::from_univariate(const std::map<unsigned, Poly>& coeffs, Sym x) {
  Poly r;
  for (const auto& [e, p] : coeffs) r += p * Poly::var(x, e);
  return r;
}

Poly Poly::coeff_of(Sym x, unsigned e) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    unsigned k = 0;
    Monomial rest;
    for (const auto& [s, d] : m) {
      if (s == x)
        k = d;
      else
        rest.push_back({s, d});
    }
    if (k == e) out.add_term(rest, c);
  }
  return out;
}

std::vector<Sym> Poly::support() const {
  std::vector<Sym> v;
  for (const auto& [m, c] : terms_)
    for (const auto& [s, e] : m) v.push_back(s);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // grlex-descending for readability
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Rational c = it->second;
    const Monomial& m = it->first;
    Rational ac = c < 0 ? -c : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool printed = (ac != 1) || m.empty();
    if (printed) os << to_string(ac);
    for (const auto& [s, e] : m) {
      if (printed) os << "*";
      os << symbol_name(s);
      if (e > 1) os << "^" << e;
      printed = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- division

PolyDivision divide(const Poly& f, const Poly& g) {
  if (g.is_zero()) throw division_error("division by zero polynomial");
  PolyDivision out;
  Poly rem = f;
  const Monomial& lg = g.leading_monomial();
  const Rational& cg = g.leading_coeff();
  while (!rem.is_zero()) {
    Monomial q;
    if (mono_div(rem.leading_monomial(), lg, q)) {
      Rational qc = rem.leading_coeff() / cg;
      Poly qt;
      qt.add_term(q, qc);
      out.quotient += qt;
      rem -= qt * g;
    } else {
      // move the leading term to the remainder
      Poly lt;
      lt.add_term(rem.leading_monomial(), rem.leading_coeff());
      out.remainder += lt;
      rem -= lt;
    }
  }
  return out;
}

bool divides(const Poly& g, const Poly& f) {
  if (g.is_zero()) return f.is_zero();
  return divide(f, g).remainder.is_zero();
}

Poly divexact(const Poly& f, const Poly& g) {
  PolyDivision d = divide(f, g);
  if (!d.remainder.is_zero())
    throw division_error("inexact polynomial division: remainder " + d.remainder.str());
  return d.quotient;
}

// ---------------------------------------------------------------- gcd

namespace {

// content of f viewed univariate in x: gcd of its coefficient polynomials
Poly content_in(const Poly& f, Sym x) {
  Poly c;
  for (const auto& [e, p] : f.univariate_in(x)) {
    c = poly_gcd(c, p);
    if (c.is_constant() && !c.is_zero()) return Poly(Rational(1));
  }
  return c;
}

// Degree bound certificate: at any evaluation point of the remaining
// variables that keeps both leading coefficients alive, the univariate image
// gcd bounds deg_x of the true gcd from above. A constant image gcd therefore
// proves the gcd is free of x, skipping the pseudo-remainder cascade (whose
// coefficient growth is the whole cost of multivariate gcds here).
bool coprime_in_certified(const Poly& a, const Poly& b, Sym x) {
  std::vector<Sym> vars;
  for (Sym s : a.support())
    if (s != x) vars.push_back(s);
  for (Sym s : b.support())
    if (s != x && std::find(vars.begin(), vars.end(), s) == vars.end()) vars.push_back(s);

  std::uint64_t state = 0x9e3779b97f4a7c15ull; // fixed seed: deterministic runs
  auto next = [&state] {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return 1 + static_cast<long>((state >> 40) % 9967);
  };
  auto strip = [](std::vector<Rational>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };

  for (int attempt = 0; attempt < 4; ++attempt) {
    std::map<Sym, Rational> pt;
    for (Sym s : vars) pt.emplace(s, Rational(next()));
    auto image = [&pt, &x](const Poly& p, std::vector<Rational>& c) {
      auto uni = p.univariate_in(x);
      unsigned d = uni.rbegin()->first;
      c.assign(d + 1, Rational(0));
      for (const auto& [e, q] : uni) c[e] = q.eval(pt);
      return c[d] != 0; // image keeps full degree
    };
    std::vector<Rational> A, B;
    if (!image(a, A) || !image(b, B)) continue; // unlucky point, retry
    while (!B.empty()) {
      while (A.size() >= B.size()) {
        Rational q = A.back() / B.back();
        std::size_t off = A.size() - B.size();
        for (std::size_t i = 0; i < B.size(); ++i) A[off + i] -= q * B[i];
        strip(A);
        if (A.empty()) break;
      }
      std::swap(A, B);
    }
    if (A.size() == 1) return true; // constant image gcd: certified free of x
    // nonconstant image: either a genuine common factor or an unlucky point;
    // another point may still certify
  }
  return false;
}

Poly primitive_in(const Poly& f, Sym x) { return divexact(f, content_in(f, x)); }

// standard prem: lc(g)^(deg f - deg g + 1) * f mod g, padding the power when
// intermediate degrees drop (the subresultant divisions below rely on it)
Poly prem_std(const Poly& f, const Poly& g, Sym x) {
  unsigned df = f.degree(x), dg = g.degree(x);
  Poly lg = g.coeff_of(x, dg);
  unsigned steps = 0;
  Poly r = f;
  while (!r.is_zero() && r.degree(x) >= dg) {
    unsigned dr = r.degree(x);
    Poly lr = r.coeff_of(x, dr);
    r = r * lg - g * lr * Poly::var(x, dr - dg);
    ++steps;
  }
  for (unsigned i = steps; i < df - dg + 1; ++i) r = r * lg;
  return r;
}

Poly pow_poly(const Poly& b, long e) {
  Poly acc(Rational(1));
  for (long i = 0; i < e; ++i) acc = acc * b;
  return acc;
}

// split_square_factor runs gcds of its own; those must not attempt the
// square-split peel again or the two routines recurse into each other
thread_local int square_split_depth = 0;

struct SquareSplitGuard {
  SquareSplitGuard() { ++square_split_depth; }
  ~SquareSplitGuard() { --square_split_depth; }
};

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.normalized();
  if (b.is_zero()) return a.normalized();
  if (a.is_constant() || b.is_constant()) return Poly(Rational(1));
  if (a == b) return a.normalized(); // frequent: equal denominators under +

  // the gcd's support lies inside the common support; certify per variable
  // and conclude gcd = 1 outright when every variable passes — the dominant
  // case, settled by evaluations alone with no content recursion
  std::vector<Sym> sa = a.support(), sb = b.support();
  Sym x = 0;
  bool have_x = false;
  for (Sym s : sa) {
    if (std::find(sb.begin(), sb.end(), s) == sb.end()) continue;
    if (!coprime_in_certified(a, b, s)) {
      x = s;
      have_x = true;
      break;
    }
  }
  if (!have_x) return Poly(Rational(1));

  // likely common factor: peel what exact division can prove before falling
  // back to the pseudo-remainder sequence (whose cost is driven by the big
  // operand). Denominator-style operands are powers of small polynomials, so
  // the square-split of the small side names the candidate factors directly.
  {
    const Poly& big = a.terms().size() >= b.terms().size() ? a : b;
    const Poly& small = &big == &a ? b : a;
    if (divides(small, big)) return small.normalized();
    if (square_split_depth == 0 && small.terms().size() <= 64) {
      auto parts = split_square_factor(small);
      for (const Poly* c : {&parts.first, &parts.second}) {
        if (c->is_constant() || *c == small) continue;
        if (divides(*c, a) && divides(*c, b))
          return (poly_gcd(divexact(a, *c), divexact(b, *c)) * *c).normalized();
      }
    }
  }

  Poly ca = content_in(a, x), cb = content_in(b, x);
  Poly f = divexact(a, ca), g = divexact(b, cb);
  Poly cont = poly_gcd(ca, cb);

  // subresultant PRS: every beta-division below is exact by Brown's theorem,
  // so no per-step content extraction (whose recursive gcds dominate the cost
  // of a primitive PRS) is ever needed
  if (f.degree(x) < g.degree(x)) std::swap(f, g);
  long delta = static_cast<long>(f.degree(x)) - static_cast<long>(g.degree(x));
  Poly psi(Rational(-1));
  Poly beta(Rational(delta % 2 == 0 ? -1 : 1)); // (-1)^(delta+1)
  while (true) {
    Poly r = prem_std(f, g, x);
    if (r.is_zero()) break;
    r = divexact(r, beta);
    Poly neg_lg = -g.coeff_of(x, g.degree(x));
    if (delta == 1)
      psi = neg_lg;
    else if (delta > 1)
      psi = divexact(pow_poly(neg_lg, delta), pow_poly(psi, delta - 1));
    f = g;
    g = r;
    delta = static_cast<long>(f.degree(x)) - static_cast<long>(g.degree(x));
    beta = neg_lg * pow_poly(psi, delta);
  }
  return (cont * primitive_in(g, x)).normalized();
}

std::pair<Poly, Poly> split_square_factor(const Poly& f) {
  SquareSplitGuard guard;
  Poly sq(Rational(1));
  Poly rest = f;
  while (!rest.is_zero() && !rest.is_constant()) {
    // repeated part: gcd of rest with all its partial derivatives
    Poly w = rest;
    for (Sym x : rest.support()) {
      w = poly_gcd(w, rest.derivative(x));
      if (w.is_constant()) break;
    }
    if (w.is_constant()) break;
    if (!divides(w * w, rest)) {
      // w holds multiplicity e-1 of each repeated factor; for e >= 3 that
      // overshoots, so drop to the radical of the repeated part instead
      w = poly_gcd(w, divexact(rest, w));
      if (w.is_constant() || !divides(w * w, rest)) break;
    }
    rest = divexact(rest, w * w);
    sq = sq * w;
  }
  return {sq, rest};
}

} // namespace pinchlab
