#pragma once

#include <cstdint>
#include <string>

#include "slicelab/pnorm.hpp"
#include "slicelab/rng.hpp"
#include "slicelab/subspace.hpp"

namespace slicelab {

enum class EstimateMethod { DetFormula, CfQuadrature, Oracle };

std::string to_string(EstimateMethod m);

/// Normalized section volume Vol_{n-d}(B_p^n cap H) / Vol_{n-d}(B_p^{n-d}).
struct VolumeEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t samples = 0;
  EstimateMethod method = EstimateMethod::Oracle;
};

/// Monte Carlo over the stable-mixture determinant formula, p in (0, 2):
/// prefactor * E det(sum_j W_j^{-1} v_j v_j^T)^{-1/2}. Requires m >= 1000.
VolumeEstimate det_formula_ratio(PNorm p, const SubspaceBasis& basis, std::int64_t m, RngStream& rng);

/// Density at 0 of sum_i v_i Y_i with generalized Gaussian Y_i, by
/// characteristic function inversion. d in {1, 2}.
VolumeEstimate cf_density_ratio(PNorm p, const SubspaceBasis& basis);

/// Oracle ratio for sections of dimension 1 or 2.
VolumeEstimate oracle_ratio(PNorm p, const SubspaceBasis& basis);

/// m = c^2 n^2 / delta^2, which keeps the inner standard error of
/// det_formula_ratio near delta n^{-3/2}.
std::int64_t choose_inner_samples(int n, double delta, double c = 1.0);

/// Pilot estimate of c: the per-sample standard deviation of the determinant
/// integrand (times the prefactor) scaled by sqrt(n), averaged over bases.
double calibrate_inner_constant(PNorm p, int d, int n, int bases, std::int64_t m, RngStream& rng);

}  // namespace slicelab
