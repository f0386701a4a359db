#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slicelab/pnorm.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

/// Kernel of order 2d-1 on points x_1..x_{2d-1} in R^d, given row-major
/// (point i occupies entries [i d, (i+1) d)):
/// (1/(2d-1)!) sum_k sum_J det(x_k, x_J)^2 det(x_k, x_{J'})^2 over
/// (d-1)-subsets J of the other points, J' their complement.
double kernel_h(int d, std::span<const double> points);

/// First Hoeffding projection in closed form, with S = |gamma|^2:
/// ((2d-2)(d+2)(S-d) + S^2 - d(d+2)) / (2d-1).
double pi1_h_closed(int d, std::span<const double> gamma);

struct McValue {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// pi_k h at `fixed` (k points, row-major) by inclusion-exclusion over the k
/// slots, each term an m-sample average over Gaussian fillers.
McValue hoeffding_projection_mc(int d, int k, std::span<const double> fixed, std::int64_t m, RngStream& rng);

/// E (pi_k h)^2 by nested Monte Carlo, unbiased via two independent inner
/// estimates per outer point.
McValue projection_second_moment_mc(int d, int k, std::int64_t outer, std::int64_t inner, RngStream& rng);

/// E h^2 by plain Monte Carlo.
McValue kernel_second_moment_mc(int d, std::int64_t samples, RngStream& rng);

struct ZIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error() const;
};

/// For a d x n Gaussian matrix G (row-major): lhs sums a_S a_T over ordered
/// pairs of d-subsets meeting in exactly one column, built from the
/// orthonormalized rows; rhs = S_n(h) / V_n with S_n the kernel summed over
/// injective (2d-1)-tuples of raw columns and V_n = prod_l |G_l - P_{l-1} G_l|^4.
/// Requires 2d-1 <= n <= 12, d <= 3.
ZIdentity z_identity_check(int d, int n, std::span<const double> g);

// Closed forms for the kernel parameters.
double kernel_mean(int d);                 ///< E h = d(d+2)
double pi1_variance_closed(int d);         ///< (8d^3(d+2)^2 + 24d + 4d(d-1)) / (2d-1)^2
double pi1_variance_chi2(int d);           ///< Var pi_1 h from chi-square moment algebra
double pi1_covariance_closed(int d);       ///< Cov(pi_1 h, |Gamma|^2 - d) = 4d^2(d+2)/(2d-1)

/// prefactor^2 9 nu^2/(64 mu^5) (8 (Eh)^2 d + (2d-1)^2 Var - 4(2d-1) Eh Cov).
double assembled_sigma2(PNorm p, int d, double eh, double var_pi1, double cov);

struct UstatReport {
  int d = 1;
  std::int64_t samples = 0;
  McValue eh;
  McValue var_pi1;
  McValue cov;
  double eh_target = 0.0;
  double var_target = 0.0;
  double var_chi2 = 0.0;
  double cov_target = 0.0;
  double z_eh() const { return (eh.value - eh_target) / eh.stderr_; }
  double z_var() const { return (var_pi1.value - var_target) / var_pi1.stderr_; }
  double z_var_chi2() const { return (var_pi1.value - var_chi2) / var_pi1.stderr_; }
  double z_cov() const { return (cov.value - cov_target) / cov.stderr_; }
};

/// Monte Carlo estimates of (E h, Var pi_1 h, Cov(pi_1 h, |Gamma|^2 - d)).
UstatReport ustat_check(int d, std::int64_t samples, RngStream& rng);

}  // namespace slicelab
