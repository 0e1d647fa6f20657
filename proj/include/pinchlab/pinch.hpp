#ifndef PINCHLAB_PINCH_HPP
#define PINCHLAB_PINCH_HPP

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "pinchlab/diagram.hpp"

namespace pinchlab {

enum class PinchClass { Finite, AtInfinity, NonIsolated };
std::string to_string(PinchClass c);

// One solution branch: the pinch point coefficients and the leftover scalar
// conditions (one nonzero condition for a clean finite pinch, cut out of the
// invariants by the landau module).
struct PinchBranch {
  std::map<int, std::map<std::string, QuadExt>> alpha; // loop -> external -> coeff
  std::vector<QuadExt> conditions;
};

struct PinchSolution {
  std::vector<std::size_t> subset;
  PinchClass classification = PinchClass::NonIsolated;
  int parallel_rank = 0;                        // sum of span dims over involved loops
  std::vector<int> involved_loops;              // 1-based
  std::vector<std::vector<int>> clusters;       // involved loops joined by shared propagators
  std::map<int, std::vector<std::string>> span; // loop -> parallel basis (its cluster's span)
  std::vector<PinchBranch> branches;            // one per radical sign choice
  std::string note;                             // trivial locus / overdetermination details
};

// All index subsets of size 2..max_size, skipping only subsets whose members
// are pairwise exact duplicates (identical routing and identical shift).
// Ordered by size, then lexicographically.
std::vector<std::vector<std::size_t>> enumerate_subsets(const Diagram& dg,
                                                        std::size_t max_size);

// Solve the parallel-space on-shell system for subset I: impose D_i = 0 for
// all i in I under the ansatz q_a = sum_e alpha_{a,e} e over the cluster span.
// Same-routing differences give a linear system; leftover massless on-shell
// quadrics are solved per loop (branching into a quadratic extension); the
// remaining scalar values are the pinch conditions.
PinchSolution solve_pinch(const Diagram& dg, const std::vector<std::size_t>& I);

// Numeric pinch coordinates per branch: loop -> external -> value.
using PinchPointNumeric = std::map<int, std::map<std::string, Complex>>;
std::vector<PinchPointNumeric> eval_pinch(const PinchSolution& sol,
                                          const std::map<Sym, Complex>& kinematics);

nlohmann::json pinch_to_json(const PinchSolution& sol);

} // namespace pinchlab

#endif
