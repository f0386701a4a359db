#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "slicelab/pnorm.hpp"

namespace slicelab {

struct PsiValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// psi_p(s) = int_0^inf cos(s y) exp(-y^p) dy and its derivative, by
/// quadrature along the ray arg y = pi/(2(p+1)) where the integrand is
/// damped rather than oscillatory.
PsiValue psi_direct(double p, double s, bool with_derivative = true);

/// Large-s series psi_p(s) ~ sum_k (-1)^{k+1} Gamma(kp+1) sin(k p pi/2) / (k! s^{kp+1}).
/// Returns NaN when the terms stop decreasing before reaching double precision.
double psi_tail_series(double p, double s);

/// Characteristic function of the law with density exp(-beta_p^p |x|^p),
/// phi_p(t) = (2/beta_p) psi_p(t/beta_p), computed directly.
double pgauss_charfn_direct(PNorm p, double t);

/// Tabulated phi_p: cubic Hermite on an adaptively refined grid, direct
/// quadrature beyond the table. Immutable after construction.
class PGaussCharFn {
 public:
  static PGaussCharFn build(PNorm p, double tolerance = 1e-14);

  PNorm p() const { return p_; }
  double beta() const { return beta_; }
  double operator()(double t) const;
  /// Largest tabulated argument t.
  double table_limit() const { return beta_ * s_.back(); }
  std::size_t knot_count() const { return s_.size(); }

 private:
  explicit PGaussCharFn(PNorm p) : p_(p) {}
  double psi(double s) const;

  PNorm p_;
  double beta_ = 1.0;
  std::vector<double> s_;
  std::vector<double> v_;
  std::vector<double> dv_;
  std::vector<std::uint32_t> guide_;
  double guide_step_ = 1.0;
  bool tail_series_ = false;
};

/// Shared table per p, built on first use (thread safe).
std::shared_ptr<const PGaussCharFn> shared_charfn(PNorm p);

}  // namespace slicelab
