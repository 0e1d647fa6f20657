#include "pinchlab/landau.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "pinchlab/errors.hpp"
#include "pinchlab/linalg.hpp"

namespace pinchlab {

namespace {

// Branch indices enumerate radical sign choices most-significant-bit first
// (the first two-root quadric solved is the leading sign).
std::string branch_label(std::size_t n_branches, std::size_t b) {
  if (n_branches <= 1) return "";
  if ((n_branches & (n_branches - 1)) == 0) {
    std::size_t bits = 0;
    for (std::size_t t = n_branches; t > 1; t >>= 1) ++bits;
    std::string s = "(";
    for (std::size_t i = 0; i < bits; ++i) {
      s += ((b >> (bits - 1 - i)) & 1) ? '-' : '+';
      if (i + 1 < bits) s += ',';
    }
    return s + ")";
  }
  return "#" + std::to_string(b);
}

// Flatten an exact condition to a locus polynomial over the invariants:
// conjugate norm if it carries a radical, clear the denominator, normalize to
// primitive/positive-leading. Appends what was dropped to `text`.
Poly clear_to_poly(const QuadExt& value, std::string& text) {
  if (value.is_zero()) {
    text += "trivial locus: the condition vanishes identically";
    return Poly();
  }
  RatFunc flat;
  if (value.is_rational()) {
    flat = value.rational_part();
  } else {
    flat = value.norm();
    text += "conjugate norm over sqrt(" + value.radicand().str() +
            ") (both sign branches share the locus); ";
  }
  if (flat.num().is_zero())
    throw reduction_error("condition is a zero divisor in the quadratic extension");
  Poly out = flat.num().normalized();
  Rational scale = flat.num().leading_coeff() / out.leading_coeff();
  text += "cleared denominator (" + flat.den().str() + "); scale (" +
          to_string(scale) + ")";
  return out;
}

void require_finite(const PinchSolution& sol, std::size_t branch) {
  if (sol.classification != PinchClass::Finite)
    throw not_finite("subset is classified " + to_string(sol.classification) +
                     (sol.note.empty() ? "" : " (" + sol.note + ")") +
                     "; a locus polynomial needs a finite pinch");
  if (branch >= sol.branches.size())
    throw validation_error("branch index " + std::to_string(branch) +
                           " out of range (have " +
                           std::to_string(sol.branches.size()) + ")");
}

// Pinch-point momentum of one propagator: sum_a l_a * q_a'' + shift, written
// over the external legs.
std::map<std::string, QuadExt> branch_momentum(const Propagator& pr,
                                               const PinchBranch& br) {
  std::map<std::string, QuadExt> v;
  for (std::size_t a = 0; a < pr.routing.size(); ++a) {
    if (pr.routing[a] == 0) continue;
    auto it = br.alpha.find(static_cast<int>(a) + 1);
    if (it == br.alpha.end()) continue;
    for (const auto& [e, c] : it->second)
      v[e] = v[e] + QuadExt(Rational(pr.routing[a])) * c;
  }
  for (const auto& [e, c] : pr.shift) v[e] = v[e] + QuadExt(c);
  return v;
}

QuadExt dot_with_ext(const Diagram& dg, const std::map<std::string, QuadExt>& v,
                     const std::string& e) {
  QuadExt acc;
  for (const auto& [f, c] : v) acc = acc + c * QuadExt(dg.dot(f, e));
  return acc;
}

RatFunc combo_dot(const Diagram& dg, const std::map<std::string, Rational>& u,
                  const std::map<std::string, Rational>& v) {
  RatFunc acc;
  for (const auto& [e, ce] : u)
    for (const auto& [f, cf] : v) acc += RatFunc(ce * cf) * dg.dot(e, f);
  return acc;
}

std::map<std::string, Rational> shift_diff(const std::map<std::string, Rational>& a,
                                           const std::map<std::string, Rational>& b) {
  std::map<std::string, Rational> out = a;
  for (const auto& [e, c] : b) {
    out[e] -= c;
    if (out[e] == 0) out.erase(e);
  }
  return out;
}

// Parallel assignments for every involved loop of a branch, ready for
// expand_propagator.
std::map<int, MomentumExpr> branch_parallel(const PinchSolution& sol,
                                            const PinchBranch& br) {
  std::map<int, MomentumExpr> par;
  for (int a : sol.involved_loops) {
    MomentumExpr me;
    auto it = br.alpha.find(a);
    if (it != br.alpha.end())
      for (const auto& [e, c] : it->second) me.add_ext(e, c);
    par.emplace(a, std::move(me));
  }
  return par;
}

// Ratio of a determinant against the branch's plain residual condition,
// rendered for the normalization record.
std::string ratio_note(const QuadExt& det, const PinchSolution& sol,
                       std::size_t branch) {
  try {
    LandauPolynomial base = landau_from_pinch(sol, branch);
    if (base.value.is_zero()) return "; residual condition is trivial";
    return "; ratio to the residual condition: " +
           (det * base.value.inverse()).str();
  } catch (const Error&) {
    return "; ratio to the residual condition not representable (mixed radicals)";
  }
}

} // namespace

LandauPolynomial landau_from_pinch(const PinchSolution& sol, std::size_t branch) {
  require_finite(sol, branch);
  const PinchBranch& br = sol.branches[branch];
  const QuadExt* cond = nullptr;
  std::size_t nonzero = 0;
  for (const auto& c : br.conditions)
    if (!c.is_zero()) {
      ++nonzero;
      cond = &c;
    }
  if (nonzero > 1)
    throw unsupported_pinch("branch leaves " + std::to_string(nonzero) +
                            " independent conditions; the locus is not a hypersurface");
  LandauPolynomial lp;
  lp.subset = sol.subset;
  lp.branch = branch_label(sol.branches.size(), branch);
  if (nonzero == 0) {
    lp.normalization = "trivial locus: every residual condition vanishes identically";
    return lp;
  }
  lp.value = *cond;
  lp.poly = clear_to_poly(*cond, lp.normalization);
  return lp;
}

Poly bordered_gram_det(const Diagram& dg, const std::vector<std::size_t>& I) {
  if (I.empty()) throw shape_error("bordered Gram determinant of an empty subset");
  for (std::size_t i : I)
    if (i >= dg.propagators.size())
      throw validation_error("propagator index " + std::to_string(i) + " out of range");
  const Propagator& p0 = dg.propagators[I[0]];
  int live = 0;
  for (long c : p0.routing)
    if (c != 0) ++live;
  if (live != 1)
    throw shape_error("bordered Gram determinant needs a one-loop chain "
                      "(exactly one nonzero routing entry)");
  for (std::size_t i : I)
    if (dg.propagators[i].routing != p0.routing)
      throw shape_error("bordered Gram determinant needs identical routing "
                        "across the chain");

  const std::size_t k = I.size();
  Matrix<RatFunc> M(k, k);
  std::vector<std::map<std::string, Rational>> r(k);
  for (std::size_t i = 1; i < k; ++i)
    r[i] = shift_diff(dg.propagators[I[i]].shift, p0.shift);
  const RatFunc& m0 = p0.mass;
  for (std::size_t i = 1; i < k; ++i) {
    for (std::size_t j = 1; j < k; ++j)
      M.at(i - 1, j - 1) = combo_dot(dg, r[i], r[j]);
    RatFunc bi = (combo_dot(dg, r[i], r[i]) + dg.propagators[I[i]].mass - m0) *
                 RatFunc(Rational(-1, 2));
    M.at(i - 1, k - 1) = bi;
    M.at(k - 1, i - 1) = bi;
  }
  M.at(k - 1, k - 1) = RatFunc(Rational(-1)) * m0;

  RatFunc D = det_bareiss(M);
  if (!D.den().is_constant())
    throw reduction_error("bordered Gram determinant has a nonconstant denominator");
  return D.num() * Poly(Rational(1) / D.den().constant_value());
}

QuadExt five_pinch_block_det(const FivePinchFrame& fr, const RatFunc& det_gram) {
  if (fr.a.size() != 5)
    throw shape_error("five-pinch frame needs exactly five propagator values");
  const QuadExt one{Rational(1)};
  const QuadExt zero;
  Matrix<QuadExt> M(5, 5);
  // Chain rows V1 = q1'', V2 = V1 + e1, V3 = q2'', V4 = V3 + e2,
  // V5 = V1 + V3 + e1; the first two are swapped for positive orientation.
  const QuadExt rows[5][4] = {
      {fr.alpha1 + one, fr.beta1, zero, zero},                  // V2
      {fr.alpha1, fr.beta1, zero, zero},                        // V1
      {zero, zero, fr.alpha2, fr.beta2},                        // V3
      {zero, zero, fr.alpha2, fr.beta2 + one},                  // V4
      {fr.alpha1 + fr.alpha2 + one, fr.beta1 + fr.beta2,        // V5
       fr.alpha1 + fr.alpha2 + one, fr.beta1 + fr.beta2}};
  const std::size_t aidx[5] = {1, 0, 2, 3, 4};
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t j = 0; j < 4; ++j) M.at(t, j) = rows[t][j];
    M.at(t, 4) = fr.a[aidx[t]];
  }
  return det_bareiss(M) * QuadExt(det_gram);
}

LandauPolynomial five_pinch_det(const Diagram& dg, const PinchSolution& sol,
                                std::size_t branch) {
  require_finite(sol, branch);
  if (sol.subset.size() != 5 || sol.involved_loops.size() != 2 ||
      sol.parallel_rank != 4)
    throw shape_error("five-pinch block needs five propagators over two loops "
                      "with a rank-4 parallel space");
  const int l1 = sol.involved_loops[0];
  const int l2 = sol.involved_loops[1];
  std::vector<std::string> span = sol.span.at(l1);
  {
    std::vector<std::string> s2 = sol.span.at(l2);
    std::vector<std::string> a = span, b = s2;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (span.size() != 2 || a != b)
      throw shape_error("five-pinch block needs both loops pinned over one "
                        "two-external span");
  }
  const PinchBranch& br = sol.branches[branch];
  std::map<int, MomentumExpr> par = branch_parallel(sol, br);

  Matrix<QuadExt> M(5, 5);
  const std::size_t order[5] = {1, 0, 2, 3, 4}; // positive orientation
  for (std::size_t t = 0; t < 5; ++t) {
    const std::size_t pos = order[t];
    const Propagator& pr = dg.propagators[sol.subset[pos]];
    std::map<std::string, QuadExt> v = branch_momentum(pr, br);
    for (const auto& [e, c] : v)
      if (std::find(span.begin(), span.end(), e) == span.end() && !c.is_zero())
        throw shape_error("five-pinch momentum leaves the two-external span "
                          "(component along " + e + ")");
    const QuadExt c1{Rational(pr.routing[l1 - 1])};
    const QuadExt c2{Rational(pr.routing[l2 - 1])};
    for (std::size_t j = 0; j < 2; ++j) {
      auto it = v.find(span[j]);
      const QuadExt ve = (it == v.end()) ? QuadExt() : it->second;
      M.at(t, j) = c1 * ve;
      M.at(t, 2 + j) = c2 * ve;
    }
    M.at(t, 4) = expand_propagator(dg, sol.subset[pos], par, {});
  }

  RatFunc det_g = det_bareiss(dg.gram_matrix(span));
  QuadExt det = det_bareiss(M) * QuadExt(det_g);

  LandauPolynomial lp;
  lp.subset = sol.subset;
  lp.branch = branch_label(sol.branches.size(), branch);
  lp.value = det;
  lp.normalization = "five-pinch block determinant (two loop blocks in an "
                     "orthonormal span frame contribute det(G)); ";
  lp.poly = clear_to_poly(det, lp.normalization);
  lp.normalization += ratio_note(det, sol, branch);
  return lp;
}

Matrix<QuadExt> value_gradient_matrix(const Diagram& dg, const PinchSolution& sol,
                                      std::size_t branch, std::string& colnote,
                                      bool unit_rank1) {
  require_finite(sol, branch);
  std::vector<std::pair<int, std::string>> cols;
  for (int a : sol.involved_loops)
    for (const auto& e : sol.span.at(a)) cols.emplace_back(a, e);
  const std::size_t k = sol.subset.size();
  const PinchBranch& br = sol.branches[branch];
  std::map<int, MomentumExpr> par = branch_parallel(sol, br);

  Matrix<QuadExt> M(k, cols.size() + 1);
  for (std::size_t i = 0; i < k; ++i) {
    const Propagator& pr = dg.propagators[sol.subset[i]];
    M.at(i, 0) = expand_propagator(dg, sol.subset[i], par, {});
    std::map<std::string, QuadExt> v = branch_momentum(pr, br);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto& [a, e] = cols[j];
      M.at(i, 1 + j) =
          QuadExt(Rational(2 * pr.routing[a - 1])) * dot_with_ext(dg, v, e);
    }
  }

  colnote = "gradient columns in raw span coordinates";
  if (cols.size() == 1 && unit_rank1) {
    // One parallel direction: take the derivative along the unit vector
    // e/sqrt(e.e) so the determinant matches the arc-length normal form.
    try {
      Matrix<QuadExt> U = M;
      const QuadExt inv_len = QuadExt::sqrt_of(dg.dot(cols[0].second, cols[0].second)).inverse();
      for (std::size_t i = 0; i < k; ++i) U.at(i, 1) = U.at(i, 1) * inv_len;
      M = std::move(U);
      colnote = "gradient along the unit direction " + cols[0].second +
                "/sqrt(" + cols[0].second + "." + cols[0].second + ")";
    } catch (const Error& e) {
      if (e.kind() != "MixedRadicand") throw;
      colnote += " (unit normalization mixes radicals)";
    }
  }
  return M;
}

LandauPolynomial value_gradient_det(const Diagram& dg, const PinchSolution& sol,
                                    std::size_t branch) {
  require_finite(sol, branch);
  std::string colnote;
  Matrix<QuadExt> M = value_gradient_matrix(dg, sol, branch, colnote);
  if (M.rows != M.cols)
    throw shape_error("value/gradient matrix is square only when the subset "
                      "size exceeds the parallel rank by one (subset " +
                      std::to_string(M.rows) + ", rank " +
                      std::to_string(M.cols - 1) + ")");

  QuadExt det = det_bareiss(M);
  LandauPolynomial lp;
  lp.subset = sol.subset;
  lp.branch = branch_label(sol.branches.size(), branch);
  lp.value = det;
  lp.normalization = "value column first; " + colnote + "; ";
  lp.poly = clear_to_poly(det, lp.normalization);
  lp.normalization += ratio_note(det, sol, branch);
  return lp;
}

nlohmann::json landau_to_json(const LandauPolynomial& lp) {
  nlohmann::json j;
  j["subset"] = lp.subset;
  j["poly"] = lp.poly.str();
  j["normalization"] = lp.normalization;
  if (!lp.branch.empty()) j["branch"] = lp.branch;
  return j;
}

} // namespace pinchlab
