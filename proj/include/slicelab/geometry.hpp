#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slicelab/pnorm.hpp"
#include "slicelab/subspace.hpp"

namespace slicelab {

/// det(sum_j x_j v_j v_j^T) by Cholesky. Throws std::domain_error when the
/// accumulated matrix is not positive definite.
double gram_det(const SubspaceBasis& basis, std::span<const double> x);

/// Precomputed outer products v_j v_j^T (upper triangle) for repeated
/// gram_det evaluations over the same basis.
class GramAccumulator {
 public:
  explicit GramAccumulator(const SubspaceBasis& basis);
  int d() const { return d_; }
  int n() const { return n_; }
  double det(std::span<const double> x) const;

 private:
  int d_;
  int n_;
  int tri_;
  std::vector<double> outer_;  // n blocks of d(d+1)/2 entries
};

/// Squared d x d minors of the row matrix, one per increasing column tuple.
/// Summing over ordered tuples with weight 1/d! per ordering gives the same
/// total, which is 1 for orthonormal rows.
class CauchyBinetCoeffs {
 public:
  static constexpr std::uint64_t kMaxTuples = 10'000'000;

  /// Throws EnumerationGuardError if C(n, d) exceeds kMaxTuples.
  explicit CauchyBinetCoeffs(const SubspaceBasis& basis);

  int d() const { return d_; }
  std::size_t size() const { return squared_minors_.size(); }
  std::span<const int> tuple(std::size_t k) const {
    return {tuples_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  /// det(A_S)^2 for the k-th increasing tuple S.
  double squared_minor(std::size_t k) const { return squared_minors_[k]; }
  /// Weight a_ii of one ordering of the k-th tuple.
  double ordered_coefficient(std::size_t k) const;
  double total() const;
  /// sum over tuples of det(A_S)^2 prod_{j in S} x_j
  double weighted_sum(std::span<const double> x) const;

 private:
  int d_;
  std::vector<int> tuples_;
  std::vector<double> squared_minors_;
};

/// Number of k-subsets of an n-set, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Determinant of a small dense row-major matrix by partial pivoting.
double small_det(std::span<const double> m, int dim);

/// (n-d) x n orthonormal rows spanning H, the orthogonal complement of the rows.
SubspaceBasis complement_basis(const SubspaceBasis& basis);

/// (sum |v_j|^p)^{1/p}, or max |v_j| for p = inf.
double lp_norm(PNorm p, std::span<const double> v);

/// Vol_k(B_p^n cap H) for k = n - d in {1, 2}. Throws RegimeError otherwise.
double section_volume_oracle(PNorm p, const SubspaceBasis& basis);

/// Density at x of sum_i u_i Y_i, Y_i uniform on [-1, 1], which equals
/// 2^{-n} Vol_{n-1}(B_inf^n cap (x u + u^perp)). Requires d = 1 and at least
/// two nonzero coordinates.
double cube_parallel_section_oracle(double x, const SubspaceBasis& basis);

/// Same density from the exact piecewise-polynomial formula for small
/// numbers of nonzero coordinates; throws RegimeError when the formula's
/// cancellation would exceed `max_growth`.
double cube_density_exact(double x, std::span<const double> u, double max_growth = 1e6);
/// Same density by quadrature of the characteristic function product.
double cube_density_cf(double x, std::span<const double> u);

}  // namespace slicelab
