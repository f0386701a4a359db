#include "slicelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slicelab/charfn.hpp"
#include "slicelab/errors.hpp"
#include "slicelab/geometry.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

using std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

constexpr double kRelTol = 1e-13;

struct DetSample {
  double mean = 0.0;
  double sd = 0.0;
};

DetSample det_integrand_moments(const WSamplerTable& table, const SubspaceBasis& basis, std::int64_t m,
                                RngStream& rng) {
  const GramAccumulator gram(basis);
  std::vector<double> x(basis.n());
  // Welford accumulation keeps the variance stable for large m
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t k = 0; k < m; ++k) {
    for (double& xj : x) xj = 1.0 / table.sample(rng);
    const double f = 1.0 / std::sqrt(gram.det(x));
    const double delta = f - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (f - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(m - 1))};
}

// int_0^inf f(t) dt over doubling panels, stopping once a panel adds
// less than kRelTol of the running total.
double integrate_halfline(const std::function<double(double)>& f, double t0) {
  double total = 0.0;
  double a = 0.0;
  double b = t0;
  for (int panel = 0; panel < 80; ++panel) {
    double err = 0.0;
    double l1 = 0.0;
    const double piece = GK::integrate(f, a, b, 12, kRelTol, &err, &l1);
    total += piece;
    if (panel >= 3 && l1 <= kRelTol * std::abs(total) * 1e-2) return total;
    if (panel >= 3 && l1 < 1e-300) return total;
    a = b;
    b *= 2.0;
  }
  throw QuadratureError("cf_density_ratio: characteristic function integral did not converge");
}

}  // namespace

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::DetFormula: return "det";
    case EstimateMethod::CfQuadrature: return "cf";
    case EstimateMethod::Oracle: return "oracle";
  }
  return "unknown";
}

VolumeEstimate det_formula_ratio(PNorm p, const SubspaceBasis& basis, std::int64_t m, RngStream& rng) {
  if (!(p.finite() && p.sub2())) throw RegimeError("det_formula_ratio: requires p in (0, 2)");
  if (m < 1000) throw std::invalid_argument("det_formula_ratio: need at least 1000 inner samples");
  const auto table = shared_w_table(0.5 * p.value());
  const DetSample s = det_integrand_moments(*table, basis, m, rng);
  const double pre = det_prefactor(p, basis.d());
  return {pre * s.mean, pre * s.sd / std::sqrt(static_cast<double>(m)), m, EstimateMethod::DetFormula};
}

VolumeEstimate cf_density_ratio(PNorm p, const SubspaceBasis& basis) {
  if (p.cube()) throw RegimeError("cf_density_ratio: p must be finite");
  const int d = basis.d();
  if (d != 1 && d != 2) throw RegimeError("cf_density_ratio: only d = 1 and d = 2 are supported");
  const int n = basis.n();
  int nonzero = 0;
  for (int j = 0; j < n; ++j) {
    bool any = false;
    for (int i = 0; i < d; ++i) any = any || basis.at(i, j) != 0.0;
    nonzero += any;
  }
  if (nonzero < d) throw std::domain_error("cf_density_ratio: rows are not independent");
  // Gaussian sections and coordinate sections have ratio exactly 1
  if (p.value() == 2.0 || nonzero == d) return {1.0, 0.0, 0, EstimateMethod::CfQuadrature};

  const auto phi = shared_charfn(p);
  const double t0 = 1.0 / std::sqrt(pgauss_cumulants(p).kappa2);

  if (d == 1) {
    const auto u = basis.row(0);
    auto f = [&](double t) {
      double prod = 1.0;
      for (double ui : u) {
        prod *= (*phi)(ui * t);
        if (prod == 0.0) break;
      }
      return prod;
    };
    return {integrate_halfline(f, t0) / pi, 0.0, 0, EstimateMethod::CfQuadrature};
  }

  const auto u1 = basis.row(0);
  const auto u2 = basis.row(1);
  auto radial = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto f = [&](double r) {
      double prod = r;
      for (int j = 0; j < n; ++j) {
        prod *= (*phi)(r * (c * u1[j] + s * u2[j]));
        if (prod == 0.0) break;
      }
      return prod;
    };
    return integrate_halfline(f, t0);
  };
  // the radial integral loses decay where a column is orthogonal to the ray
  std::vector<double> cuts{0.0, pi};
  if (n <= 16) {
    for (int j = 0; j < n; ++j) {
      double t = std::atan2(-u1[j], u2[j]);
      if (t < 0.0) t += pi;
      if (t > 0.0 && t < pi) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, cuts[i], cuts[i + 1], 10, 1e-11, &err);
  }
  return {total / (2.0 * pi * pi), 0.0, 0, EstimateMethod::CfQuadrature};
}

VolumeEstimate oracle_ratio(PNorm p, const SubspaceBasis& basis) {
  const double vol = section_volume_oracle(p, basis);
  const int k = basis.section_dim();
  const double unit = p.cube() ? std::pow(2.0, k) : ball_volume(p, k);
  return {vol / unit, 0.0, 0, EstimateMethod::Oracle};
}

std::int64_t choose_inner_samples(int n, double delta, double c) {
  if (n < 10) throw std::invalid_argument("choose_inner_samples: n must be at least 10");
  if (!(delta > 0.0) || !(c > 0.0)) throw std::invalid_argument("choose_inner_samples: delta and c must be positive");
  const double m = c * c * static_cast<double>(n) * n / (delta * delta);
  return std::max<std::int64_t>(1000, static_cast<std::int64_t>(std::ceil(m)));
}

double calibrate_inner_constant(PNorm p, int d, int n, int bases, std::int64_t m, RngStream& rng) {
  if (!(p.finite() && p.sub2())) throw RegimeError("calibrate_inner_constant: requires p in (0, 2)");
  const auto table = shared_w_table(0.5 * p.value());
  const double pre = det_prefactor(p, d);
  double sum_var = 0.0;
  for (int b = 0; b < bases; ++b) {
    const SubspaceBasis basis = sample_haar_basis(n, d, rng);
    const DetSample s = det_integrand_moments(*table, basis, m, rng);
    sum_var += pre * pre * s.sd * s.sd;
  }
  return std::sqrt(sum_var / bases * n);
}

}  // namespace slicelab
