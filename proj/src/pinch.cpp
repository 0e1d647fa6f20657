#include "pinchlab/pinch.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "pinchlab/errors.hpp"
#include "pinchlab/expr.hpp"
#include "pinchlab/linalg.hpp"
#include "pinchlab/subst.hpp"
#include "pinchlab/symbols.hpp"

namespace pinchlab {

namespace {

// Write f as c0 + sum c_i x_i; throws if f is not linear over xs.
void linear_decompose(const RatFunc& f, const std::vector<Sym>& xs, RatFunc& c0,
                      std::vector<RatFunc>& cs) {
  const Poly& N = f.num();
  const Poly& D = f.den();
  for (Sym x : xs)
    if (D.depends_on(x)) throw reduction_error("ansatz symbol in a denominator");
  std::map<Sym, Poly> zero;
  for (Sym x : xs) zero.emplace(x, Poly());
  Poly n0 = N.subs(zero);
  Poly rebuilt = n0;
  cs.clear();
  for (Sym x : xs) {
    Poly cx = N.coeff_of(x, 1);
    for (Sym y : xs)
      if (cx.depends_on(y))
        throw reduction_error("difference equation is not linear in the ansatz");
    cs.push_back(RatFunc(cx) / RatFunc(D));
    rebuilt = rebuilt + cx * Poly::var(x);
  }
  if (rebuilt != N) throw reduction_error("difference equation is not linear in the ansatz");
  c0 = RatFunc(n0) / RatFunc(D);
}

std::vector<Sym> free_params_of(const RatFunc& v, const std::vector<Sym>& ts) {
  std::vector<Sym> out;
  for (Sym t : ts)
    if (v.num().depends_on(t)) out.push_back(t);
  return out;
}

struct SolveAction {
  enum Kind { SolveQuadric, Condition } kind;
  std::size_t pos; // position within the subset (element of I it came from)
  Sym t = 0;       // SolveQuadric only
  RatFunc value;   // rational form over the free params
};

struct ExecBranch {
  std::map<Sym, QuadExt> tval;
  std::vector<QuadExt> conditions;
};

} // namespace

std::string to_string(PinchClass c) {
  switch (c) {
    case PinchClass::Finite: return "Finite";
    case PinchClass::AtInfinity: return "AtInfinity";
    case PinchClass::NonIsolated: return "NonIsolated";
  }
  return "?";
}

std::vector<std::vector<std::size_t>> enumerate_subsets(const Diagram& dg,
                                                        std::size_t max_size) {
  const std::size_t n = dg.propagators.size();
  if (max_size < 2 || max_size > n)
    throw validation_error("max_size must lie in [2, propagator count]");

  auto duplicate = [&](std::size_t i, std::size_t j) {
    const Propagator &a = dg.propagators[i], &b = dg.propagators[j];
    return a.routing == b.routing && a.shift == b.shift;
  };

  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx;
  // size-major, lexicographic within each size
  for (std::size_t k = 2; k <= max_size; ++k) {
    idx.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      bool all_dup = true;
      for (std::size_t i = 0; i + 1 < k && all_dup; ++i)
        for (std::size_t j = i + 1; j < k && all_dup; ++j)
          if (!duplicate(idx[i], idx[j])) all_dup = false;
      if (!all_dup) out.push_back(idx);
      // next combination
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

PinchSolution solve_pinch(const Diagram& dg, const std::vector<std::size_t>& I_in) {
  std::vector<std::size_t> I = I_in;
  std::sort(I.begin(), I.end());
  I.erase(std::unique(I.begin(), I.end()), I.end());
  if (I.size() < 2) throw validation_error("pinch subset needs at least 2 propagators");
  for (std::size_t i : I)
    if (i >= dg.propagators.size())
      throw validation_error("subset index " + std::to_string(i) + " out of range");

  PinchSolution sol;
  sol.subset = I;

  // --- involved loops and clusters -----------------------------------------
  std::set<int> inv;
  for (std::size_t i : I)
    for (int a = 1; a <= dg.loops; ++a)
      if (dg.propagators[i].routing[static_cast<std::size_t>(a - 1)] != 0) inv.insert(a);
  sol.involved_loops.assign(inv.begin(), inv.end());

  std::map<int, int> parent;
  for (int a : sol.involved_loops) parent[a] = a;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i : I) {
    int first = 0;
    for (int a : sol.involved_loops) {
      if (dg.propagators[i].routing[static_cast<std::size_t>(a - 1)] == 0) continue;
      if (first == 0)
        first = a;
      else
        parent[find(a)] = find(first);
    }
  }
  std::map<int, std::vector<int>> by_root;
  for (int a : sol.involved_loops) by_root[find(a)].push_back(a);
  for (auto& [root, members] : by_root) {
    (void)root;
    std::sort(members.begin(), members.end());
    sol.clusters.push_back(members);
  }
  std::sort(sol.clusters.begin(), sol.clusters.end());

  // --- per-cluster parallel spans -------------------------------------------
  for (const auto& cluster : sol.clusters) {
    std::set<std::string> seen;
    for (std::size_t i : I) {
      bool touches = false;
      for (int a : cluster)
        if (dg.propagators[i].routing[static_cast<std::size_t>(a - 1)] != 0) touches = true;
      if (!touches) continue;
      for (const auto& [e, c] : dg.propagators[i].shift) {
        (void)c;
        seen.insert(e);
      }
    }
    std::vector<std::string> span;
    for (const auto& e : dg.externals) // diagram order
      if (seen.count(e)) span.push_back(e);
    for (int a : cluster) sol.span[a] = span;
  }
  sol.parallel_rank = 0;
  for (int a : sol.involved_loops)
    sol.parallel_rank += static_cast<int>(sol.span.at(a).size());

  // --- boundary-at-infinity detection ---------------------------------------
  for (const auto& cluster : sol.clusters) {
    const auto& span = sol.span.at(cluster.front());
    if (span.empty()) continue;
    RatFunc det = det_bareiss(dg.gram_matrix(span));
    if (det.is_zero()) {
      sol.classification = PinchClass::AtInfinity;
      sol.note = "span Gram determinant vanishes identically for loop cluster {";
      for (std::size_t k = 0; k < cluster.size(); ++k)
        sol.note += (k ? "," : "") + std::string("q") + std::to_string(cluster[k]);
      sol.note += "}: cycle at infinity";
      return sol;
    }
  }

  // --- ansatz ---------------------------------------------------------------
  std::vector<Sym> xs;
  std::vector<std::pair<int, std::string>> xmeta; // (loop, external) per unknown
  std::map<int, MomentumExpr> par;
  for (int a : sol.involved_loops) {
    MomentumExpr m;
    for (const auto& e : sol.span.at(a)) {
      Sym x = intern_symbol("al_q" + std::to_string(a) + "_" + e);
      xs.push_back(x);
      xmeta.emplace_back(a, e);
      m.add_ext(e, QuadExt(RatFunc(Poly::var(x))));
    }
    par[a] = m;
  }

  std::vector<RatFunc> val(I.size());
  for (std::size_t k = 0; k < I.size(); ++k)
    val[k] = require_ratfunc(expand_propagator(dg, I[k], par, {}),
                             "on-shell value of propagator " + std::to_string(I[k]));

  // --- same-routing groups --------------------------------------------------
  std::vector<std::vector<std::size_t>> groups; // positions into I
  {
    std::map<std::vector<long>, std::size_t> slot;
    for (std::size_t k = 0; k < I.size(); ++k) {
      const auto& r = dg.propagators[I[k]].routing;
      auto it = slot.find(r);
      if (it == slot.end()) {
        slot.emplace(r, groups.size());
        groups.push_back({k});
      } else {
        groups[it->second].push_back(k);
      }
    }
  }

  // --- linear difference system ---------------------------------------------
  std::vector<std::vector<RatFunc>> rows;
  std::vector<RatFunc> rhs;
  for (const auto& g : groups)
    for (std::size_t j = 1; j < g.size(); ++j) {
      RatFunc diff = val[g[j]] - val[g[0]];
      RatFunc c0;
      std::vector<RatFunc> cs;
      linear_decompose(diff, xs, c0, cs);
      rows.push_back(cs);
      rhs.push_back(-c0);
    }
  Matrix<RatFunc> A(rows.size(), xs.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < xs.size(); ++c) A.at(r, c) = rows[r][c];
  auto lin = solve_linear(A, rhs);

  // --- parametrize the solution over the nullspace --------------------------
  std::vector<Sym> ts;
  for (std::size_t f = 0; f < lin.nullspace_dim; ++f)
    ts.push_back(intern_symbol("tpar" + std::to_string(f + 1)));
  std::vector<RatFunc> alpha_expr(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    RatFunc e = lin.particular[j];
    for (std::size_t f = 0; f < lin.nullspace_dim; ++f)
      e = e + lin.nullspace[f][j] * RatFunc(Poly::var(ts[f]));
    alpha_expr[j] = e;
  }
  std::map<Sym, RatFunc> xsub;
  for (std::size_t j = 0; j < xs.size(); ++j) xsub.emplace(xs[j], alpha_expr[j]);

  // --- schedule the on-shell quadrics ---------------------------------------
  struct Pending {
    std::size_t pos; // index into I (group base)
    RatFunc v;
  };
  std::vector<Pending> pending;
  for (const auto& g : groups)
    pending.push_back({g[0], subst_scalar(val[g[0]], xsub)});

  std::vector<SolveAction> plan;
  for (std::size_t r = 0; r < lin.inconsistent_values.size(); ++r)
    plan.push_back({SolveAction::Condition, I.size(), 0, lin.inconsistent_values[r]});

  std::set<Sym> scheduled;
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      std::vector<Sym> frees;
      for (Sym t : free_params_of(it->v, ts))
        if (!scheduled.count(t)) frees.push_back(t);
      if (frees.empty()) {
        plan.push_back({SolveAction::Condition, it->pos, 0, it->v});
        it = pending.erase(it);
        progress = true;
      } else if (frees.size() == 1 && it->v.num().degree(frees[0]) <= 2 &&
                 dg.propagators[I[it->pos]].mass.is_zero()) {
        // massless on-shell quadric: solvable in a quadratic extension
        plan.push_back({SolveAction::SolveQuadric, it->pos, frees[0], it->v});
        scheduled.insert(frees[0]);
        it = pending.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
  }

  if (!pending.empty()) {
    // Unresolved equations: bilinear couplings are out of reach, single-loop
    // massive shells leave a free family.
    for (const auto& p : pending) {
      int nloops = 0;
      for (long l : dg.propagators[I[p.pos]].routing)
        if (l != 0) ++nloops;
      if (nloops >= 2)
        throw unsupported_pinch(
            "propagator " + std::to_string(I[p.pos]) +
            " retains unresolved bilinear terms after the per-loop stage");
    }
    sol.classification = PinchClass::NonIsolated;
    sol.note = "free parameters remain on massive on-shell conditions (" +
               std::to_string(pending.size()) + " equation(s) unresolved)";
    return sol;
  }
  for (Sym t : ts)
    if (!scheduled.count(t)) {
      sol.classification = PinchClass::NonIsolated;
      sol.note = "pinch family with " + std::to_string(ts.size() - scheduled.size()) +
                 " free parameter(s)";
      return sol;
    }

  // --- execute the plan per radical branch ----------------------------------
  std::vector<ExecBranch> branches(1);
  try {
    for (const auto& act : plan) {
      if (act.kind == SolveAction::Condition) {
        for (auto& br : branches)
          br.conditions.push_back(subst_scalar(act.value, br.tval));
        continue;
      }
      std::vector<ExecBranch> next;
      for (auto& br : branches) {
        QuadExt den = subst_scalar(RatFunc(act.value.den()), br.tval);
        QuadExt a2 = subst_scalar(act.value.num().coeff_of(act.t, 2), br.tval) / den;
        QuadExt a1 = subst_scalar(act.value.num().coeff_of(act.t, 1), br.tval) / den;
        QuadExt a0 = subst_scalar(act.value.num().coeff_of(act.t, 0), br.tval) / den;
        std::vector<QuadExt> roots;
        if (a2.is_zero()) {
          if (a1.is_zero())
            throw unsupported_pinch("degenerate on-shell equation for propagator " +
                                    std::to_string(I[act.pos]));
          roots.push_back(-a0 / a1);
        } else {
          if (!(a2.is_rational() && a1.is_rational() && a0.is_rational()))
            throw unsupported_pinch(
                "on-shell quadric needs a nested radical (propagator " +
                std::to_string(I[act.pos]) + ")");
          RatFunc ar = a2.rational_part(), br_ = a1.rational_part(), cr = a0.rational_part();
          RatFunc disc = br_ * br_ - RatFunc(Rational(4)) * ar * cr;
          if (disc.is_zero()) {
            roots.push_back(QuadExt(-br_ / (RatFunc(Rational(2)) * ar)));
          } else {
            QuadExt root = QuadExt::sqrt_of(disc);
            QuadExt two_a{RatFunc(Rational(2)) * ar};
            roots.push_back((QuadExt(-br_) + root) / two_a);
            roots.push_back((QuadExt(-br_) - root) / two_a);
          }
        }
        for (const auto& r : roots) {
          ExecBranch nb = br;
          nb.tval[act.t] = r;
          next.push_back(std::move(nb));
        }
      }
      branches = std::move(next);
      if (branches.size() > 8)
        throw unsupported_pinch("branch explosion while solving on-shell quadrics");
    }

    for (auto& br : branches) {
      PinchBranch out;
      for (std::size_t j = 0; j < xs.size(); ++j)
        out.alpha[xmeta[j].first][xmeta[j].second] =
            subst_scalar(alpha_expr[j], br.tval);
      out.conditions = br.conditions;
      sol.branches.push_back(std::move(out));
    }
  } catch (const Error& e) {
    if (e.kind() == "MixedRadicand")
      throw unsupported_pinch(
          "coupling equation mixes distinct radicands (needs a compositum field): " +
          std::string(e.what()));
    throw;
  }

  // --- classify by the residual condition count -----------------------------
  std::size_t nonzero = 0;
  for (const auto& c : sol.branches.front().conditions)
    if (!c.is_zero()) ++nonzero;
  if (nonzero >= 2) {
    sol.classification = PinchClass::NonIsolated;
    sol.note = "overdetermined: " + std::to_string(nonzero) +
               " independent conditions (deeper stratum candidate)";
  } else {
    sol.classification = PinchClass::Finite;
    if (nonzero == 0)
      sol.note = "trivial locus: the on-shell system closes at all kinematics";
  }
  return sol;
}

std::vector<PinchPointNumeric> eval_pinch(const PinchSolution& sol,
                                          const std::map<Sym, Complex>& kinematics) {
  std::vector<PinchPointNumeric> out;
  for (const auto& br : sol.branches) {
    PinchPointNumeric pt;
    for (const auto& [loop, coeffs] : br.alpha)
      for (const auto& [e, v] : coeffs)
        pt[loop][e] = v.eval_branch(kinematics, +1);
    out.push_back(std::move(pt));
  }
  return out;
}

nlohmann::json pinch_to_json(const PinchSolution& sol) {
  nlohmann::ordered_json j;
  j["subset"] = sol.subset;
  j["classification"] = to_string(sol.classification);
  j["parallel_rank"] = sol.parallel_rank;
  j["involved_loops"] = sol.involved_loops;
  j["clusters"] = sol.clusters;
  nlohmann::ordered_json span = nlohmann::ordered_json::object();
  for (const auto& [a, basis] : sol.span) span["q" + std::to_string(a)] = basis;
  j["span"] = std::move(span);
  nlohmann::ordered_json branches = nlohmann::ordered_json::array();
  for (const auto& br : sol.branches) {
    nlohmann::ordered_json jb;
    nlohmann::ordered_json alpha = nlohmann::ordered_json::object();
    for (const auto& [loop, coeffs] : br.alpha) {
      nlohmann::ordered_json row = nlohmann::ordered_json::object();
      for (const auto& [e, v] : coeffs) row[e] = v.str();
      alpha["q" + std::to_string(loop)] = std::move(row);
    }
    jb["alpha"] = std::move(alpha);
    nlohmann::ordered_json conds = nlohmann::ordered_json::array();
    for (const auto& c : br.conditions) conds.push_back(c.str());
    jb["conditions"] = std::move(conds);
    branches.push_back(std::move(jb));
  }
  j["branches"] = std::move(branches);
  if (!sol.note.empty()) j["note"] = sol.note;
  return j;
}

} // namespace pinchlab
