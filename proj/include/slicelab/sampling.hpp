#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "slicelab/pnorm.hpp"
#include "slicelab/rng.hpp"
#include "slicelab/subspace.hpp"

namespace slicelab {

/// Zolotarev's auxiliary function of the one-sided stable law,
/// A(u) = [sin(a u)/sin u]^{1/(1-a)} sin((1-a)u)/sin(a u), returned as log A.
/// `comp` is pi - u, passed separately to keep precision near u = pi.
double zolotarev_log_a(double alpha, double u, double comp);

/// One draw with Laplace transform exp(-t^alpha), 0 < alpha < 1 (Kanter).
double sample_positive_stable(double alpha, RngStream& rng);

/// Inverse-CDF sampler for W, the law with density t^{-1/2} g_alpha(t) / Z.
///
/// The CDF is computed exactly from Zolotarev's representation, tabulated on
/// a log-spaced grid with cubic Hermite interpolation inside the central
/// quantile range, and inverted by root finding on the exact CDF beyond it.
class WSamplerTable {
 public:
  static WSamplerTable build(double alpha, double accuracy = 1e-8);

  double alpha() const { return alpha_; }
  double accuracy() const { return accuracy_; }
  /// Z = E Y^{-1/2}, closed form.
  double normalizer() const { return z_; }
  double tail_exponent() const { return 1.5 + alpha_; }

  double cdf(double t) const;
  double survival(double t) const;
  double density(double t) const;
  /// Interpolated inverse CDF; exact inversion beyond the tabulated range.
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

  std::size_t knot_count() const { return log_t_.size(); }
  double lower_knot() const { return std::exp(log_t_.front()); }
  double upper_knot() const { return std::exp(log_t_.back()); }
  /// Tabulated CDF values, strictly increasing.
  const std::vector<double>& knot_cdf() const { return f_; }

 private:
  double exact_quantile(double u) const;
  double hermite_cdf(std::size_t seg, double x) const;

  double alpha_ = 0.5;
  double accuracy_ = 1e-8;
  double z_ = 1.0;
  std::vector<double> log_t_;
  std::vector<double> f_;      // CDF at knots
  std::vector<double> slope_;  // dF/dlog t at knots
  std::vector<std::uint32_t> guide_;
};

/// Shared immutable table per alpha, built on first use (thread safe).
std::shared_ptr<const WSamplerTable> shared_w_table(double alpha);

double sample_w(const WSamplerTable& table, RngStream& rng);

/// Draw with density exp(-beta_p^p |x|^p).
double sample_pgauss(PNorm p, RngStream& rng);

/// Haar-distributed basis: d Gaussian rows orthonormalized by modified
/// Gram-Schmidt, redrawn if a pivot falls below 1e-12 sqrt(n).
SubspaceBasis sample_haar_basis(int n, int d, RngStream& rng);

/// As sample_haar_basis, also returning the raw Gaussian rows.
SubspaceBasis sample_haar_basis(int n, int d, RngStream& rng, std::vector<double>& raw_rows);

}  // namespace slicelab
