#include "slicelab/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "slicelab/errors.hpp"

namespace slicelab {
namespace {

using std::numbers::pi;

double lgam(double x) { return boost::math::lgamma(x); }

void require_finite(PNorm p, const char* what) {
  if (p.cube()) throw RegimeError(std::string(what) + ": p must be finite");
}

// Gamma-ratio building blocks shared by all finite-p constants.
struct GammaRatios {
  double log_g;  // log Gamma(1+1/p)
  double r;      // Gamma(3/p)/Gamma(1/p)
  double k;      // Gamma(5/p)/Gamma(1/p) - 3 r^2
};

GammaRatios gamma_ratios(PNorm p) {
  const double ip = 1.0 / p.value();
  const double l1 = lgam(ip);
  const double r = std::exp(lgam(3.0 * ip) - l1);
  const double r5 = std::exp(lgam(5.0 * ip) - l1);
  return {lgam(1.0 + ip), r, r5 - 3.0 * r * r};
}

}  // namespace

double log_ball_volume(PNorm p, int n) {
  if (n < 1) throw std::invalid_argument("ball_volume: n must be positive");
  if (p.cube()) return n * std::log(2.0);
  const double ip = 1.0 / p.value();
  return n * (std::log(2.0) + lgam(1.0 + ip)) - lgam(1.0 + n * ip);
}

double ball_volume(PNorm p, int n) { return std::exp(log_ball_volume(p, n)); }

double stable_moment(double alpha, double q) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("stable_moment: alpha must lie in (0,1]");
  if (!(q < alpha) && alpha < 1.0) throw RegimeError("stable_moment: moment of order q >= alpha is infinite");
  if (q == 0.0 || alpha == 1.0) return 1.0;
  // Gamma(-q/alpha)/(alpha Gamma(-q)); for 0 < q < alpha both gammas are negative.
  const double num = boost::math::tgamma(-q / alpha);
  const double den = alpha * boost::math::tgamma(-q);
  return num / den;
}

double w_moment(double alpha, double q) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("w_moment: alpha must lie in (0,1]");
  if (!(q < alpha + 0.5)) throw RegimeError("w_moment: moment of order q >= alpha + 1/2 is infinite");
  if (alpha == 1.0) return 1.0;
  const double s = 1.0 - 2.0 * q;
  // Gamma(s/2) changes sign for s < 0 (alpha < q - 1/2 is excluded above, but s/2 may be negative).
  const double num = boost::math::tgamma(s / (2.0 * alpha)) * std::sqrt(pi);
  const double den = boost::math::tgamma(s / 2.0) * boost::math::tgamma(1.0 / (2.0 * alpha));
  return num / den;
}

double pgauss_beta(PNorm p) {
  require_finite(p, "pgauss_beta");
  return 2.0 * boost::math::tgamma(1.0 + 1.0 / p.value());
}

CltConstants clt_constants(PNorm p, int d) {
  require_finite(p, "clt_constants");
  if (d < 1) throw std::invalid_argument("clt_constants: d must be positive");
  if (d >= 2 && p.value() > 2.0) {
    throw RegimeError("clt_constants: no limit theorem is available for p > 2 with codimension d >= 2");
  }
  if (p.value() == 2.0) return {1.0, 0.0, 0.0, true};
  const auto [log_g, r, k] = gamma_ratios(p);
  const double dd = d;
  const double log_r = std::log(r);
  const double log_pi = std::log(pi);
  const double ln2 = std::numbers::ln2;

  CltConstants c;
  c.a = std::exp(0.5 * dd * ln2 + dd * log_g - 0.5 * dd * log_r - 0.5 * dd * log_pi);
  c.b = (dd + 2.0) * dd * k *
        std::exp(-(0.5 * dd + 2.0) * log_r + (0.5 * dd - 3.0) * ln2 + dd * log_g - 0.5 * dd * log_pi);
  c.sigma2 = dd * (dd + 5.0) * k * k *
             std::exp((dd - 4.0) * ln2 + 2.0 * dd * log_g - dd * log_pi - (dd + 4.0) * log_r);
  return c;
}

CubeExpansion cube_expansion(double x) {
  const double x2 = x * x;
  const double quartic = 3.0 * x2 * x2 - 6.0 * x2 + 1.0;
  const double e = std::exp(-1.5 * x2);
  CubeExpansion c;
  c.x = x;
  c.a = std::sqrt(3.0 / (2.0 * pi)) * e;
  c.b = -(9.0 * std::sqrt(3.0) / (20.0 * std::sqrt(2.0 * pi))) * quartic * e;
  c.sigma2 = 81.0 / (100.0 * pi) * e * e * quartic * quartic;
  return c;
}

IntersectionConstants intersection_constants(PNorm p) {
  const CltConstants c = clt_constants(p, 1);
  const double a2 = c.a * c.a;
  return {1.0 / c.a, c.b / a2, c.sigma2 / (a2 * a2)};
}

double hermite(int k, double x) {
  if (k < 0 || k > 12) throw std::invalid_argument("hermite: order must lie in [0, 12]");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> cumulants_from_moments(std::span<const double> m, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("cumulants_from_moments: order must lie in [1, 4]");
  if (static_cast<int>(m.size()) < order) throw std::invalid_argument("cumulants_from_moments: too few moments");
  std::vector<double> k(order);
  const double m1 = m[0];
  k[0] = m1;
  if (order >= 2) k[1] = m[1] - m1 * m1;
  if (order >= 3) k[2] = m[2] - 3.0 * m[1] * m1 + 2.0 * m1 * m1 * m1;
  if (order >= 4) {
    k[3] = m[3] - 4.0 * m[2] * m1 - 3.0 * m[1] * m[1] + 12.0 * m[1] * m1 * m1 - 6.0 * m1 * m1 * m1 * m1;
  }
  return k;
}

std::vector<double> moments_from_cumulants(std::span<const double> k, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("moments_from_cumulants: order must lie in [1, 4]");
  if (static_cast<int>(k.size()) < order) throw std::invalid_argument("moments_from_cumulants: too few cumulants");
  std::vector<double> m(order);
  const double k1 = k[0];
  m[0] = k1;
  if (order >= 2) m[1] = k[1] + k1 * k1;
  if (order >= 3) m[2] = k[2] + 3.0 * k[1] * k1 + k1 * k1 * k1;
  if (order >= 4) {
    m[3] = k[3] + 4.0 * k[2] * k1 + 3.0 * k[1] * k[1] + 6.0 * k[1] * k1 * k1 + k1 * k1 * k1 * k1;
  }
  return m;
}

double pgauss_abs_moment(PNorm p, double k) {
  require_finite(p, "pgauss_abs_moment");
  const double ip = 1.0 / p.value();
  return std::exp(lgam((k + 1.0) * ip) - lgam(ip) - k * std::log(pgauss_beta(p)));
}

SymmetricCumulants pgauss_cumulants(PNorm p) {
  require_finite(p, "pgauss_cumulants");
  const auto [log_g, r, k] = gamma_ratios(p);
  const double g2 = std::exp(2.0 * log_g);
  return {r / (4.0 * g2), k / (16.0 * g2 * g2)};
}

SymmetricCumulants uniform_cumulants() { return {1.0 / 3.0, -2.0 / 15.0}; }

double mixing_mu(PNorm p, int d) {
  require_finite(p, "mixing_mu");
  return std::pow(2.0 * gamma_ratios(p).r, d);
}

double mixing_nu(PNorm p, int d) {
  require_finite(p, "mixing_nu");
  const double ip = 1.0 / p.value();
  const double r = gamma_ratios(p).r;
  const double r5 = std::exp(lgam(5.0 * ip) - lgam(ip));
  return std::pow(2.0 * r, 2 * d - 2) * (4.0 * r5 / 3.0 - 4.0 * r * r);
}

double det_prefactor(PNorm p, int d) {
  require_finite(p, "det_prefactor");
  return std::exp(d * (std::numbers::ln2 + gamma_ratios(p).log_g) - 0.5 * d * std::log(pi));
}

}  // namespace slicelab
