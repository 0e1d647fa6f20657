#include "pinchlab/asympt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "pinchlab/errors.hpp"
#include "pinchlab/symbols.hpp"

namespace pinchlab {

namespace {

void require_finite(const PinchSolution& sol, std::size_t branch) {
  if (sol.classification != PinchClass::Finite)
    throw not_finite("subset is classified " + to_string(sol.classification) +
                     (sol.note.empty() ? "" : " (" + sol.note + ")") +
                     "; the expansion needs a finite pinch");
  if (branch >= sol.branches.size())
    throw validation_error("branch index " + std::to_string(branch) +
                           " out of range (have " +
                           std::to_string(sol.branches.size()) + ")");
}

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

// Coefficient of sym^1 in a scalar whose denominators stay clear of sym.
QuadExt qe_coeff_of(const QuadExt& q, Sym s) {
  auto part = [&](const RatFunc& f) -> RatFunc {
    if (f.den().depends_on(s))
      throw reduction_error("transverse invariant appears in a denominator");
    return RatFunc(f.num().coeff_of(s, 1)) / RatFunc(f.den());
  };
  return QuadExt(part(q.rational_part()), part(q.radical_part()), q.radicand());
}

} // namespace

NormalForm normal_form_dets(const Diagram& dg, const PinchSolution& sol,
                            std::size_t branch) {
  require_finite(sol, branch);
  NormalForm nf;
  Matrix<QuadExt> M = value_gradient_matrix(dg, sol, branch, nf.colnote);
  if (M.rows != M.cols)
    throw normal_form_failure(
        "normal form needs one more propagator than parallel directions "
        "(subset " + std::to_string(M.rows) + ", rank " +
        std::to_string(M.cols - 1) + ")");
  const std::size_t k = M.rows;
  nf.e_coeff = det_bareiss(M);
  nf.e_term = QuadExt(RatFunc(Poly::var(intern_symbol("eps")))) * nf.e_coeff;

  // the z-change minor: raw span coordinates, base row dropped
  std::string rawnote;
  Matrix<QuadExt> R = value_gradient_matrix(dg, sol, branch, rawnote, false);
  if (k > 1) {
    Matrix<QuadExt> L(k - 1, k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i)
      for (std::size_t j = 0; j + 1 < k; ++j) L.at(i, j) = R.at(i + 1, j + 1);
    nf.jacobian = det_bareiss(L);
  } else {
    nf.jacobian = QuadExt(Rational(1));
  }
  if (nf.jacobian.is_zero())
    throw normal_form_failure("singular linear part: the parallel gradient "
                              "minor is degenerate");

  // transverse determinant: value column -> quadratic parts
  const std::vector<int>& loops = sol.involved_loops;
  Matrix<QuadExt> T = M;
  for (std::size_t i = 0; i < k; ++i) {
    const Propagator& pr = dg.propagators[sol.subset[i]];
    RatFunc qi;
    for (std::size_t a = 0; a < loops.size(); ++a) {
      const long la = pr.routing[loops[a] - 1];
      if (la == 0) continue;
      qi += RatFunc(Rational(la * la)) * RatFunc(Poly::var(perp_sq_sym(loops[a])));
      for (std::size_t b = a + 1; b < loops.size(); ++b) {
        const long lb = pr.routing[loops[b] - 1];
        if (lb != 0)
          qi += RatFunc(Rational(2 * la * lb)) *
                RatFunc(Poly::var(perp_cross_sym(loops[a], loops[b])));
      }
    }
    T.at(i, 0) = QuadExt(qi);
  }
  nf.q_det = det_bareiss(T);

  const std::size_t n = loops.size();
  nf.quad_form = Matrix<QuadExt>(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    nf.quad_form.at(a, a) = qe_coeff_of(nf.q_det, perp_sq_sym(loops[a]));
    for (std::size_t b = a + 1; b < n; ++b) {
      QuadExt h = qe_coeff_of(nf.q_det, perp_cross_sym(loops[a], loops[b])) *
                  QuadExt(Rational(1, 2));
      nf.quad_form.at(a, b) = h;
      nf.quad_form.at(b, a) = h;
    }
  }
  return nf;
}

MIDecomposition volume_psi_split(const Diagram& dg, const PinchSolution& sol,
                                 std::size_t branch) {
  if (sol.involved_loops.size() != 1)
    throw shape_error("volume/psi split needs a single-loop subset");
  const std::vector<std::size_t>& I = sol.subset;
  const Propagator& p0 = dg.propagators[I[0]];
  int live = 0;
  for (long c : p0.routing)
    if (c != 0) ++live;
  if (live != 1)
    throw shape_error("volume/psi split needs a one-loop chain "
                      "(exactly one nonzero routing entry)");
  for (std::size_t i : I)
    if (dg.propagators[i].routing != p0.routing)
      throw shape_error("volume/psi split needs identical routing across the chain");

  const std::size_t k = I.size() - 1;
  std::vector<std::map<std::string, Rational>> r(I.size());
  for (std::size_t i = 1; i <= k; ++i)
    r[i] = shift_diff(dg.propagators[I[i]].shift, p0.shift);
  RatFunc det_g{Rational(1)};
  if (k > 0) {
    Matrix<RatFunc> G(k, k);
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t j = 1; j <= k; ++j)
        G.at(i - 1, j - 1) = combo_dot(dg, r[i], r[j]);
    det_g = det_bareiss(G);
  }

  MIDecomposition out;
  if (det_g.is_zero()) {
    out.note = "collapsed volume: the shift Gram determinant vanishes";
    return out;
  }
  out.volume_factor = QuadExt::sqrt_of(det_g);

  require_finite(sol, branch);
  const PinchBranch& br = sol.branches[branch];
  std::map<int, MomentumExpr> par = branch_parallel(sol, br);

  // M(t) = det[B_i(t) | 2 x_i.r_j] is linear in t = q_perp^2: compute the
  // constant part and the t-coefficient as two determinants.
  Matrix<QuadExt> M0(I.size(), I.size());
  Matrix<QuadExt> M1(I.size(), I.size());
  for (std::size_t i = 0; i <= k; ++i) {
    std::map<std::string, QuadExt> v = branch_momentum(dg.propagators[I[i]], br);
    M0.at(i, 0) = expand_propagator(dg, I[i], par, {});
    M1.at(i, 0) = QuadExt(Rational(1));
    for (std::size_t j = 1; j <= k; ++j) {
      QuadExt dotv;
      for (const auto& [e, ce] : v)
        for (const auto& [f, cf] : r[j])
          dotv = dotv + ce * QuadExt(RatFunc(cf) * dg.dot(e, f));
      M0.at(i, j) = QuadExt(Rational(2)) * dotv;
      M1.at(i, j) = M0.at(i, j);
    }
  }
  QuadExt d0 = det_bareiss(M0);
  QuadExt coeff = det_bareiss(M1);
  if (coeff != QuadExt(RatFunc(rational_pow(Rational(2), (unsigned long)k)) * det_g))
    throw reduction_error("transverse coefficient does not reduce to 2^k detG");

  if (!d0.is_rational())
    throw unsupported_pinch("chain pinch with a radical branch is outside the "
                            "rational split");
  RatFunc flat = d0.rational_part();
  LandauPolynomial lp = landau_from_pinch(sol, branch);
  out.landau = lp.poly;
  if (flat.is_zero()) {
    out.note = "transverse-free part vanishes identically (on-locus instance)";
    if (!lp.poly.is_zero())
      throw reduction_error("zero transverse-free part against a nonzero locus");
    return out;
  }
  if (!flat.den().is_constant())
    throw reduction_error("gram data with nonconstant denominators is not "
                          "supported in the split");
  out.psi = flat.num() * Poly(Rational(1) / flat.den().constant_value());
  if (lp.poly.is_zero())
    throw reduction_error("nonzero transverse-free part on a trivial locus");
  RatFunc ratio = flat / RatFunc(lp.poly);
  if (ratio.den().is_constant()) {
    out.quotient = ratio.num() * Poly(Rational(1) / ratio.den().constant_value());
    out.remainder = Poly();
  } else {
    out.quotient = Poly();
    out.remainder = out.psi;
    out.note = "membership failed: the transverse-free part is not divisible "
               "by the locus polynomial";
  }
  return out;
}

ResidueReduction residue_reduce(const Diagram& dg, const PinchSolution& sol,
                                std::size_t branch) {
  NormalForm nf = normal_form_dets(dg, sol, branch);
  ResidueReduction rr;
  rr.prefactor_power = sol.parallel_rank;
  rr.jacobian = nf.jacobian;
  const PinchBranch& br = sol.branches[branch];
  std::map<int, MomentumExpr> par = branch_parallel(sol, br);
  std::map<int, TransverseSpec> tr;
  for (int a : sol.involved_loops) tr[a] = TransverseSpec{sol.span.at(a)};
  std::set<std::size_t> in_subset(sol.subset.begin(), sol.subset.end());
  for (std::size_t j = 0; j < dg.propagators.size(); ++j) {
    if (in_subset.count(j)) continue;
    try {
      QuadExt v = expand_propagator(dg, j, par, tr);
      rr.integrand.push_back("1/(" + v.str() + ")");
    } catch (const Error& e) {
      if (e.kind() != "ReductionError") throw;
      QuadExt v0 = expand_propagator(dg, j, par, {});
      rr.integrand.push_back("1/(" + v0.str() + ")");
      rr.warnings.push_back("spectator propagator " + std::to_string(j) +
                            ": transverse coupling not representable, kept at "
                            "q_perp = 0");
    }
  }
  rr.integrand.push_back("1/(" + (nf.e_term + nf.q_det).str() + ")");
  return rr;
}

AsymptoticExpansion leading_coefficient(const Diagram& dg, const PinchSolution& sol,
                                        std::size_t branch) {
  NormalForm nf = normal_form_dets(dg, sol, branch);
  AsymptoticExpansion ax;
  ax.subset = sol.subset;
  ax.residue_count = sol.parallel_rank;
  ax.prefactor_power = sol.parallel_rank;
  ax.quad_form = nf.quad_form;
  ax.landau = landau_from_pinch(sol, branch);

  const RatFunc dsc = dg.dimension_scalar();
  const RatFunc n_loops{Rational(static_cast<long>(sol.involved_loops.size()))};
  const RatFunc rr{Rational(static_cast<long>(sol.parallel_rank))};
  const RatFunc n_perp = dsc * n_loops - rr;
  ax.exponent = n_perp * RatFunc(Rational(1, 2)) - RatFunc(Rational(1));

  ax.warnings.push_back(
      "general-coefficient exponent -1+(d-1)|I|/2 (|I| = " +
      std::to_string(sol.subset.size()) +
      ") does not match the worked reductions; using nu = (d*loops - r)/2 - 1");
  if (static_cast<std::size_t>(sol.parallel_rank) != sol.subset.size())
    ax.warnings.push_back(
        "prefactor (2*pi*i)^r uses the residue count r = " +
        std::to_string(sol.parallel_rank) +
        "; the closed-coefficient display writes the power |I| = " +
        std::to_string(sol.subset.size()));
  if (ax.exponent.is_zero())
    ax.warnings.push_back("LogarithmicCandidate: the exponent vanishes; the "
                          "leading term is logarithmic and power-law fits do "
                          "not apply");

  const PinchBranch& br = sol.branches[branch];
  std::map<int, MomentumExpr> par = branch_parallel(sol, br);
  std::set<std::size_t> in_subset(sol.subset.begin(), sol.subset.end());
  std::set<int> involved(sol.involved_loops.begin(), sol.involved_loops.end());

  ax.leading.closed = true;
  ax.leading.spectator_product = QuadExt(Rational(1));
  for (std::size_t j = 0; j < dg.propagators.size(); ++j) {
    if (in_subset.count(j)) continue;
    const Propagator& pj = dg.propagators[j];
    bool free_loop = false;
    for (std::size_t a = 0; a < pj.routing.size(); ++a)
      if (pj.routing[a] != 0 && !involved.count(static_cast<int>(a) + 1))
        free_loop = true;
    QuadExt v = expand_propagator(dg, j, par, {});
    if (free_loop) {
      ax.leading.closed = false;
      ax.leading.residual_integrand.push_back("1/(" + v.str() + ")");
    } else {
      if (v.is_zero())
        throw pole_at_point("spectator propagator " + std::to_string(j) +
                            " vanishes at the pinch point");
      ax.leading.spectator_product = ax.leading.spectator_product * v.inverse();
    }
  }
  ax.leading.quad_det = det_bareiss(nf.quad_form);
  ax.leading.sphere_factor =
      "V(" + (n_perp - RatFunc(Rational(1))).str() + ")";
  return ax;
}

nlohmann::json asympt_to_json(const AsymptoticExpansion& ax) {
  nlohmann::json j;
  j["subset"] = ax.subset;
  j["exponent"] = ax.exponent.str();
  j["prefactor_power"] = ax.prefactor_power;
  if (ax.leading.closed) {
    j["leading"] = "(" + ax.leading.spectator_product.str() + ") * " +
                   ax.leading.sphere_factor + " / sqrt(det(" +
                   ax.leading.quad_det.str() + ") per transverse block)";
  } else {
    nlohmann::json l;
    l["residual_integrand"] = ax.leading.residual_integrand;
    if (!(ax.leading.spectator_product == QuadExt(Rational(1))))
      l["closed_factor"] = ax.leading.spectator_product.str();
    j["leading"] = l;
  }
  j["landau_ref"] = landau_to_json(ax.landau);
  j["warnings"] = ax.warnings;
  return j;
}

} // namespace pinchlab
