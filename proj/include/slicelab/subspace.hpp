#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slicelab {

/// d orthonormal rows u_1..u_d in R^n spanning the orthogonal complement of
/// the section subspace H. Column j is the vector v_j in R^d.
class SubspaceBasis {
 public:
  /// Takes d*n row-major entries; rows must already be orthonormal.
  SubspaceBasis(int d, int n, std::vector<double> rows);

  /// Orthonormalizes the given rows by modified Gram-Schmidt. Throws
  /// std::domain_error if a pivot norm falls below `pivot_tol`.
  static SubspaceBasis from_rows(int d, int n, std::vector<double> rows, double pivot_tol = 1e-12);

  int n() const { return n_; }
  int d() const { return d_; }
  int section_dim() const { return n_ - d_; }

  std::span<const double> row(int i) const { return {rows_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }
  double at(int i, int j) const { return rows_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<const double> data() const { return rows_; }

  /// max over i,j of |<u_i,u_j> - delta_ij|
  double orthonormality_defect() const;

 private:
  int d_;
  int n_;
  std::vector<double> rows_;
};

/// Modified Gram-Schmidt on d rows of length n, in place. Returns the
/// pre-normalization pivot norms |G_l - P_{l-1} G_l|.
std::vector<double> modified_gram_schmidt(int d, int n, std::span<double> rows);

}  // namespace slicelab
