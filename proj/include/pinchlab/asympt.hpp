#ifndef PINCHLAB_ASYMPT_HPP
#define PINCHLAB_ASYMPT_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "pinchlab/landau.hpp"

namespace pinchlab {

// Exact normal-form data of the combined residue denominator E + Q(q_perp)
// at a finite pinch. E is the deformation term: the value/gradient
// determinant times the interned deformation symbol eps (degree 1 in eps,
// zero at eps = 0). Q is the determinant with the value column replaced by
// the transverse quadratic parts, linear in the q_perp dot invariants; its
// coefficients form the symmetric block matrix quad_form over the involved
// loops. jacobian is the determinant of the parallel linear part (the
// z-change minor, base row dropped).
struct NormalForm {
  QuadExt e_term;            // eps * e_coeff
  QuadExt e_coeff;           // value/gradient determinant
  QuadExt q_det;             // transverse determinant over perp invariants
  Matrix<QuadExt> quad_form; // symmetric, indexed by involved loops
  QuadExt jacobian;          // det of the gradient minor (rows/cols 1..r)
  std::string colnote;       // gradient frame used for the columns
};

// Both determinants of the residue denominator. Throws NotFinite off finite
// pinches and NormalFormFailure when the subset cannot be put in normal form
// (|I| != parallel_rank + 1, or a singular parallel linear part).
NormalForm normal_form_dets(const Diagram& dg, const PinchSolution& sol,
                            std::size_t branch = 0);

// Split of the one-loop chain determinant M(t) = det[B_i(t) | 2 x_i.r_j]
// over t = q_perp^2, with x_i the pinch momenta and r_j the shifts relative
// to the chain base: M(t) = 2^k detG t + M(0). Scaled by the volume factor
// [r_1..r_k] = sqrt(detG), this is the familiar split
//   M(t)/vol = 2^k vol t + psi_display,  psi_display = M(0)/vol,
// so `psi` stores the polynomial M(0) (= psi_display * vol) with its
// denominator cleared, and `quotient` the exact division psi/landau
// (remainder zero when the membership holds).
struct MIDecomposition {
  QuadExt volume_factor; // sqrt of the shift Gram determinant
  Poly psi;              // transverse-free part, cleared to a polynomial
  Poly quotient;         // psi / landau, exact
  Poly remainder;        // zero when psi lies in the locus ideal
  Poly landau;           // locus polynomial of the subset
  std::string note;
};

MIDecomposition volume_psi_split(const Diagram& dg, const PinchSolution& sol,
                                 std::size_t branch = 0);

// Residue stage: r = parallel_rank contour integrals collapse onto the
// elementary loops around the solved linear parts; what remains is the
// spectator product at the pinch point and the single combined denominator.
struct ResidueReduction {
  int prefactor_power = 0;            // power of 2*pi*i picked up (= r)
  QuadExt jacobian;                   // det of the z-change linear part
  std::vector<std::string> integrand; // "1/(...)" spectators, then denominator
  std::vector<std::string> warnings;
};

ResidueReduction residue_reduce(const Diagram& dg, const PinchSolution& sol,
                                std::size_t branch = 0);

// Leading coefficient of the expansion near the stratum.
struct LeadingTerm {
  bool closed = false;                         // no free spectator loops
  QuadExt spectator_product;                   // product of 1/P_j at the pinch
  std::vector<std::string> residual_integrand; // spectators with free loops
  std::string sphere_factor;                   // unit-sphere volume in the
                                               // transverse dimension
  QuadExt quad_det;                            // det of the block quad form
};

struct AsymptoticExpansion {
  std::vector<std::size_t> subset;
  RatFunc exponent;          // (d*|involved| - r)/2 - 1 in the dimension symbol
  int residue_count = 0;     // r = parallel_rank
  int prefactor_power = 0;   // power of 2*pi*i (the residue count)
  Matrix<QuadExt> quad_form; // from the normal form
  LeadingTerm leading;
  LandauPolynomial landau;
  std::vector<std::string> warnings;
};

AsymptoticExpansion leading_coefficient(const Diagram& dg, const PinchSolution& sol,
                                        std::size_t branch = 0);

nlohmann::json asympt_to_json(const AsymptoticExpansion& ax);

} // namespace pinchlab

#endif
