#ifndef PINCHLAB_LINALG_HPP
#define PINCHLAB_LINALG_HPP

#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/quadext.hpp"

namespace pinchlab {

template <class K>
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<K> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  K& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const K& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

namespace detail {
inline Poly exact_div(const Poly& x, const Poly& y) { return divexact(x, y); }
inline RatFunc exact_div(const RatFunc& x, const RatFunc& y) { return x / y; }
inline QuadExt exact_div(const QuadExt& x, const QuadExt& y) { return x / y; }
inline Rational exact_div(const Rational& x, const Rational& y) { return x / y; }
} // namespace detail

// Fraction-free determinant (Bareiss). Entries stay in the coefficient domain
// throughout: every division below is exact by the Sylvester identity, so the
// algorithm applies verbatim to Poly entries (and trivially to field types).
template <class K>
K det_bareiss(Matrix<K> m) {
  if (m.rows != m.cols) throw validation_error("determinant of non-square matrix");
  const std::size_t n = m.rows;
  if (n == 0) return K(Rational(1));
  int sign = 1;
  K prev(Rational(1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // pivot search: first row with nonzero entry in column k
    std::size_t piv = k;
    while (piv < n && m.at(piv, k).is_zero()) ++piv;
    if (piv == n) return K();
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        K t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        m.at(i, j) = detail::exact_div(t, prev);
      }
      m.at(i, k) = K();
    }
    prev = m.at(k, k);
  }
  K d = m.at(n - 1, n - 1);
  if (sign < 0) d = -d;
  return d;
}

template <class K>
struct LinearSolution {
  bool consistent = true;
  std::size_t rank = 0;
  std::size_t nullspace_dim = 0;
  std::vector<K> particular;              // free coordinates set to zero
  std::vector<std::vector<K>> nullspace;  // one basis vector per free column
  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> free_cols;
  std::vector<std::size_t> inconsistent_rows; // 0 = nonzero rows after elimination
  std::vector<K> inconsistent_values;         // the nonzero values of those rows
};

// Gaussian elimination of A x = b over a field K. Exact zero tests; free
// variables are set to zero in the particular solution.
template <class K>
LinearSolution<K> solve_linear(const Matrix<K>& A, const std::vector<K>& b) {
  if (b.size() != A.rows) throw validation_error("rhs length does not match matrix rows");
  const std::size_t nr = A.rows, nc = A.cols;
  Matrix<K> m(nr, nc + 1);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) m.at(i, j) = A.at(i, j);
    m.at(i, nc) = b[i];
  }

  LinearSolution<K> out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = row;
    while (piv < nr && m.at(piv, col).is_zero()) ++piv;
    if (piv == nr) continue;
    if (piv != row)
      for (std::size_t j = col; j <= nc; ++j) std::swap(m.at(row, j), m.at(piv, j));
    K inv = detail::exact_div(K(Rational(1)), m.at(row, col));
    for (std::size_t j = col; j <= nc; ++j) m.at(row, j) = m.at(row, j) * inv;
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == row || m.at(i, col).is_zero()) continue;
      K f = m.at(i, col);
      for (std::size_t j = col; j <= nc; ++j)
        m.at(i, j) = m.at(i, j) - f * m.at(row, j);
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  out.rank = out.pivot_cols.size();

  for (std::size_t i = out.rank; i < nr; ++i)
    if (!m.at(i, nc).is_zero()) {
      out.inconsistent_rows.push_back(i);
      out.inconsistent_values.push_back(m.at(i, nc));
    }
  out.consistent = out.inconsistent_rows.empty();

  std::size_t p = 0;
  for (std::size_t col = 0; col < nc; ++col) {
    if (p < out.pivot_cols.size() && out.pivot_cols[p] == col)
      ++p;
    else
      out.free_cols.push_back(col);
  }
  out.nullspace_dim = out.free_cols.size();

  // Filled even when inconsistent: the pivot-row solution is still the least
  // committal assignment, and callers may treat the leftover rows as side
  // conditions rather than failures.
  out.particular.assign(nc, K());
  for (std::size_t r = 0; r < out.rank; ++r)
    out.particular[out.pivot_cols[r]] = m.at(r, nc);
  for (std::size_t f : out.free_cols) {
    std::vector<K> v(nc, K());
    v[f] = K(Rational(1));
    for (std::size_t r = 0; r < out.rank; ++r)
      v[out.pivot_cols[r]] = -m.at(r, f);
    out.nullspace.push_back(std::move(v));
  }
  return out;
}

} // namespace pinchlab

#endif
