#include "slicelab/edgeworth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double lambda_kn(const EdgeworthInput& in, int k, int n) {
  double kappa = 0.0;
  switch (k) {
    case 3: kappa = in.kappa3; break;
    case 4: kappa = in.kappa4; break;
    case 5: kappa = in.kappa5; break;
    default: throw std::invalid_argument("lambda_kn: k must be 3, 4 or 5");
  }
  if (kappa == 0.0) return 0.0;
  double s2 = 0.0;
  double sk = 0.0;
  for (double gi : in.g) {
    s2 += gi * gi;
    sk += std::pow(gi, k);
  }
  const double bn = in.kappa2 * s2;
  return std::pow(static_cast<double>(n), 0.5 * (k - 2)) / std::pow(bn, 0.5 * k) * sk * kappa;
}

double q_kn(double x, int k, const EdgeworthLambdas& lambdas) {
  if (k < 0 || k > 3) throw std::invalid_argument("q_kn: k must lie in [0, 3]");
  // r_1 + 2 r_2 + 3 r_3 = k, with r_j counting copies of lambda_{j+2}
  double sum = 0.0;
  for (int r3 = 0; 3 * r3 <= k; ++r3) {
    for (int r2 = 0; 3 * r3 + 2 * r2 <= k; ++r2) {
      const int r1 = k - 3 * r3 - 2 * r2;
      double coef = 1.0;
      const int r[3] = {r1, r2, r3};
      for (int j = 0; j < 3; ++j) {
        coef *= std::pow(lambdas[j] / factorial(j + 3), r[j]) / factorial(r[j]);
      }
      if (coef != 0.0) sum += coef * hermite(k + 2 * (r1 + r2 + r3), x);
    }
  }
  return std_normal_pdf(x) * sum;
}

double fourth_power_ratio(std::span<const double> g) {
  double s2 = 0.0;
  double s4 = 0.0;
  for (double gi : g) {
    const double q = gi * gi;
    s2 += q;
    s4 += q * q;
  }
  if (!(s2 > 0.0)) throw std::invalid_argument("fourth_power_ratio: weights vanish");
  return s4 / (s2 * s2);
}

DensityPrediction predicted_ratio_d1(PNorm p, std::span<const double> g) {
  const SymmetricCumulants k = pgauss_cumulants(p);
  DensityPrediction out;
  out.leading = 1.0 / std::sqrt(2.0 * std::numbers::pi * k.kappa2);
  out.correction = k.excess() / 8.0 * fourth_power_ratio(g);
  out.predicted = out.leading * (1.0 + out.correction);
  return out;
}

DensityPrediction predicted_cube_density(double x, std::span<const double> g) {
  const SymmetricCumulants k = uniform_cumulants();
  const double var = k.kappa2;
  const double z2 = x * x / var;
  DensityPrediction out;
  out.leading = std::exp(-0.5 * z2) / std::sqrt(2.0 * std::numbers::pi * var);
  out.correction = (z2 * z2 - 6.0 * z2 + 3.0) / 24.0 * k.excess() * fourth_power_ratio(g);
  out.predicted = out.leading * (1.0 + out.correction);
  return out;
}

}  // namespace slicelab
