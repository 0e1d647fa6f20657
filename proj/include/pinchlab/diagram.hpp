#ifndef PINCHLAB_DIAGRAM_HPP
#define PINCHLAB_DIAGRAM_HPP

#include <cstddef>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pinchlab/linalg.hpp"
#include "pinchlab/quadext.hpp"
#include "pinchlab/ratfunc.hpp"
#include "pinchlab/rational.hpp"

namespace pinchlab {

// One denominator (q_i + p_i)^2 + m_i^2 with q_i = sum_a routing[a] * q_{a+1}
// and p_i = sum_e shift[e] * e over the declared external legs.
struct Propagator {
  std::vector<long> routing;             // per-loop integer coefficients
  std::map<std::string, Rational> shift; // external name -> coefficient
  std::string mass_key;                  // key into Diagram::masses ("" = integer literal)
  RatFunc mass;                          // resolved squared mass
};

// Kinematic input: loop structure, external legs, Gram data (dot products of
// externals as exact scalars), squared masses, and the propagator list.
class Diagram {
public:
  std::string name;
  int loops = 0;
  bool dimension_symbolic = true; // true: dimension is the symbol d
  int dimension = 0;              // concrete value when not symbolic
  std::vector<std::string> externals;
  std::map<std::pair<std::string, std::string>, RatFunc> gram; // key ordered by leg index
  std::map<std::string, RatFunc> masses;
  std::vector<Propagator> propagators;

  bool is_external(const std::string& e) const;
  std::size_t external_index(const std::string& e) const; // throws SymbolError

  // Dot product of two external legs; throws SymbolError if undeclared.
  RatFunc dot(const std::string& a, const std::string& b) const;

  // Gram matrix of a list of externals (entries looked up via dot()).
  Matrix<RatFunc> gram_matrix(const std::vector<std::string>& legs) const;

  // The dimension as an exact scalar: the interned symbol d, or a constant.
  RatFunc dimension_scalar() const;
};

Diagram parse_diagram(const nlohmann::json& doc);
Diagram load_diagram_file(const std::string& path); // .json or .toml by extension
std::string serialize_diagram(const Diagram& dg);   // canonical JSON text

// Parallel-space vector written over external legs and still-free loop momenta.
struct MomentumExpr {
  std::map<std::string, QuadExt> ext; // external name -> coefficient
  std::map<int, QuadExt> loop;        // free loop index (1-based) -> coefficient

  static MomentumExpr external(const std::string& name);
  static MomentumExpr free_loop(int a);
  MomentumExpr& add_ext(const std::string& name, const QuadExt& c);
  MomentumExpr& add_loop(int a, const QuadExt& c);
};

// Orthogonality data for a loop that has been split into a parallel part and
// a transverse remainder: the transverse direction is orthogonal to `span`.
struct TransverseSpec {
  std::vector<std::string> span;
};

// Auto-interned invariant names for dot products that are not reducible to
// declared Gram entries. The dotted spelling cannot collide with expression
// symbols (the scalar grammar has no '.').
Sym loop_dot_loop_sym(int a, int b);                 // "q1.q2"
Sym loop_dot_ext_sym(int a, const std::string& ext); // "q1.p2"
Sym perp_sq_sym(int a);                              // "qperp1.qperp1"
Sym perp_cross_sym(int a, int b);                    // "qperp1.qperp2"

// Expand propagator `index` with each loop momentum q_a replaced by
// parallel[a] (+ a transverse remainder when transverse[a] is present; only
// loops with a parallel assignment may carry one). Loops absent from
// `parallel` stay as free vectors and produce q-dot invariants. Dot products
// of a transverse remainder with anything outside its own cluster are not
// representable and raise ReductionError; with a span member they vanish.
QuadExt expand_propagator(const Diagram& dg, std::size_t index,
                          const std::map<int, MomentumExpr>& parallel,
                          const std::map<int, TransverseSpec>& transverse);

} // namespace pinchlab

#endif
