#ifndef PINCHLAB_LANDAU_HPP
#define PINCHLAB_LANDAU_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "pinchlab/pinch.hpp"

namespace pinchlab {

// Singular-locus data for one propagator subset: the exact leftover pinch
// condition (`value`, possibly in a quadratic extension of the invariant
// field) together with the polynomial cutting the same locus out of the
// invariants (denominators cleared, radicals removed by conjugate norm,
// primitive coefficients, positive leading coefficient in graded-lex order).
// `normalization` records every factor dropped between value and poly.
struct LandauPolynomial {
  std::vector<std::size_t> subset;
  QuadExt value;             // exact leftover condition
  Poly poly;                 // normalized locus polynomial
  std::string normalization; // cleared denominators / norms / scales, readable
  std::string branch;        // radical sign choice label; empty if unique
};

// Locus polynomial of a solved finite pinch, from the residual on-shell
// condition of the requested branch. A branch with no surviving condition
// yields the zero polynomial (locus is everything: the pinch closes at all
// kinematics). Throws NotFinite unless the solution is classified Finite.
LandauPolynomial landau_from_pinch(const PinchSolution& sol, std::size_t branch = 0);

// Exact bordered Gram determinant of a one-loop chain subset I (all members
// share one single-loop routing): with r_i the shift of member i relative to
// member 0, the matrix is
//   [ r_i.r_j                        -(r_i.r_i + m_i^2 - m_0^2)/2 ]
//   [ -(r_j.r_j + m_j^2 - m_0^2)/2   -m_0^2                       ]
// and its determinant vanishes exactly on the chain's pinch locus: the corner
// carries -m_0^2 so that det = det(G) * (-m_0^2 - b.G^-1.b) is zero when the
// squared pinch momentum equals -m_0^2. Throws ShapeError for subsets that
// are not a one-loop chain.
Poly bordered_gram_det(const Diagram& dg, const std::vector<std::size_t>& I);

// Coefficient frame for the five-pinch block determinant: the two pinched
// loop momenta written over the external pair (e1, e2),
//   q_1'' = alpha1 e1 + beta1 e2 ,  q_2'' = alpha2 e1 + beta2 e2 ,
// and the five propagator values a[0..4] at that point (last column).
struct FivePinchFrame {
  QuadExt alpha1, beta1, alpha2, beta2;
  std::vector<QuadExt> a; // propagator values, chain order
};

// 5x5 block determinant of the five-pinch system over the span (e1, e2):
// two 2-column blocks holding the loop coefficient rows and one value column.
// Each block written in an orthonormal frame of the span contributes a factor
// sqrt(det G), so the full determinant is the coefficient determinant times
// det_gram. Rows are ordered to carry the positive orientation, for which
//   det = beta1 * alpha2 * det_gram *
//         (a5 - a2 - a4 - sigma1 (a2 - a1) - rho1 a1 - sigma2 (a4 - a3) - rho2 a3)
// with sigma/rho the transfer coefficients between the two loop frames.
QuadExt five_pinch_block_det(const FivePinchFrame& fr, const RatFunc& det_gram);

// Five-pinch block determinant evaluated on a solved pinch: subset of five
// propagators over two loops with a rank-4 parallel space (two spans of two).
// The value column holds the residual propagator values at the branch point,
// so the determinant is proportional to the branch's leftover condition; the
// quotient is recorded in `normalization`. Throws ShapeError when the shape
// does not match and NotFinite for non-finite classifications.
LandauPolynomial five_pinch_det(const Diagram& dg, const PinchSolution& sol,
                                std::size_t branch = 0);

// Rows of the residual system at a branch point: column 0 holds P_i at the
// pinch, later columns the derivatives dP_i/dc_{a,e} over the span
// coordinates c_{a,e} (loops in involved order, span order within each).
// With unit_rank1 (and a rank-1 span) the single gradient column is taken
// along the unit direction e/sqrt(e.e); otherwise raw span coordinates are
// kept. `colnote` records the choice. One row per subset member.
Matrix<QuadExt> value_gradient_matrix(const Diagram& dg, const PinchSolution& sol,
                                      std::size_t branch, std::string& colnote,
                                      bool unit_rank1 = true);

// Determinant of the value/gradient matrix; square only when
// |I| = parallel_rank + 1 (ShapeError otherwise). The quotient against the
// plain pinch condition is recorded in `normalization`.
LandauPolynomial value_gradient_det(const Diagram& dg, const PinchSolution& sol,
                                    std::size_t branch = 0);

nlohmann::json landau_to_json(const LandauPolynomial& lp);

} // namespace pinchlab

#endif
