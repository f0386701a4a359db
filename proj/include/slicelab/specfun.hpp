#pragma once

#include <span>
#include <vector>

#include "slicelab/pnorm.hpp"

namespace slicelab {

/// log Vol_n(B_p^n) = n log(2 Gamma(1+1/p)) - log Gamma(1+n/p).
double log_ball_volume(PNorm p, int n);
double ball_volume(PNorm p, int n);

/// E Y^q for the positive alpha-stable law with Laplace transform exp(-t^alpha).
/// Requires q < alpha; alpha = 1 is the point mass at 1.
double stable_moment(double alpha, double q);

/// E W^q for the law with density proportional to t^{-1/2} g_alpha(t).
/// Requires q < alpha + 1/2; alpha = 1 gives W = 1.
double w_moment(double alpha, double q);

struct CltConstants {
  double a = 0.0;       ///< limit of the normalized section volume
  double b = 0.0;       ///< coefficient of the 1/n correction
  double sigma2 = 0.0;  ///< variance of the Gaussian limit
  bool degenerate = false;  ///< true at p = 2, where the ratio is identically 1
};

/// Throws RegimeError for d >= 2 with p > 2.
CltConstants clt_constants(PNorm p, int d);

struct CubeExpansion {
  double x = 0.0;
  double a = 0.0;
  double b = 0.0;
  double sigma2 = 0.0;
};

CubeExpansion cube_expansion(double x);

struct IntersectionConstants {
  double center = 0.0;    ///< 1/a
  double shift = 0.0;     ///< b/a^2
  double variance = 0.0;  ///< Sigma^2/a^4
};

IntersectionConstants intersection_constants(PNorm p);

/// Probabilists' Hermite polynomial He_k(x), k <= 12.
double hermite(int k, double x);

/// kappa_1..kappa_K from raw moments m_1..m_K, K <= 4.
std::vector<double> cumulants_from_moments(std::span<const double> moments, int order);
/// Inverse of cumulants_from_moments.
std::vector<double> moments_from_cumulants(std::span<const double> cumulants, int order);

/// E|Y|^k for Y with density exp(-beta_p^p |x|^p), beta_p = 2 Gamma(1+1/p).
double pgauss_abs_moment(PNorm p, double k);

struct SymmetricCumulants {
  double kappa2 = 0.0;
  double kappa4 = 0.0;
  double excess() const { return kappa4 / (kappa2 * kappa2); }
};

SymmetricCumulants pgauss_cumulants(PNorm p);
/// Uniform law on [-1, 1].
SymmetricCumulants uniform_cumulants();

/// beta_p = 2 Gamma(1 + 1/p).
double pgauss_beta(PNorm p);

/// mu = E prod of the mixing weights, (2 Gamma(3/p)/Gamma(1/p))^d.
double mixing_mu(PNorm p, int d);
/// nu = (E X)^{2d-2} Var X with X = 1/W.
double mixing_nu(PNorm p, int d);
/// 2^d Gamma(1+1/p)^d / pi^{d/2}, the constant in front of E det^{-1/2}.
double det_prefactor(PNorm p, int d);

}  // namespace slicelab
