#pragma once

#include <array>
#include <span>

#include "slicelab/pnorm.hpp"

namespace slicelab {

/// Weights g_1..g_n with cumulants of the base law. Odd cumulants are zero
/// unless `kappa3`/`kappa5` are set.
struct EdgeworthInput {
  std::span<const double> g;
  double kappa2 = 1.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double kappa5 = 0.0;
};

/// n^{(k-2)/2} / B_n^{k/2} sum_i g_i^k kappa_k with B_n = kappa2 sum g_i^2, k in {3,4,5}.
double lambda_kn(const EdgeworthInput& in, int k, int n);

/// lambda_3, lambda_4, lambda_5
using EdgeworthLambdas = std::array<double, 3>;

/// Edgeworth term q_k(x), k <= 3, built from the partition formula
/// phi(x) sum prod_j (lambda_{j+2}/(j+2)!)^{r_j}/r_j! He_{k+2 sum r_j}(x).
double q_kn(double x, int k, const EdgeworthLambdas& lambdas);

/// sum g^4 / (sum g^2)^2
double fourth_power_ratio(std::span<const double> g);

struct DensityPrediction {
  double leading = 0.0;
  double correction = 0.0;  ///< relative correction, order 1/n
  double predicted = 0.0;   ///< leading * (1 + correction)
};

/// f(0) ~ (2 pi kappa2)^{-1/2} (1 + kappa4/(8 kappa2^2) sum g^4/(sum g^2)^2)
/// for sum_i u_i Y_i with u = g/|g| and generalized Gaussian Y_i.
DensityPrediction predicted_ratio_d1(PNorm p, std::span<const double> g);

/// Density at x of sum u_i Y_i with Y_i uniform on [-1,1] and u = g/|g|.
DensityPrediction predicted_cube_density(double x, std::span<const double> g);

}  // namespace slicelab
