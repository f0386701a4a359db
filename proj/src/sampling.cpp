#include "slicelab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "slicelab/specfun.hpp"

namespace slicelab {

double sample_positive_stable(double alpha, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_positive_stable: alpha must lie in (0,1)");
  const double u = std::numbers::pi * rng.uniform01();
  const double e = rng.exponential();
  const double log_a = zolotarev_log_a(alpha, u, std::numbers::pi - u);
  return std::exp((1.0 - alpha) / alpha * (log_a - std::log(e)));
}

double sample_pgauss(PNorm p, RngStream& rng) {
  if (p.cube()) throw std::invalid_argument("sample_pgauss: p must be finite");
  const double shape = 1.0 / p.value();
  std::gamma_distribution<double> gamma(shape, 1.0);
  const double g = gamma(rng);
  const double magnitude = std::pow(g, shape) / pgauss_beta(p);
  return (rng() & 1u) ? magnitude : -magnitude;
}

SubspaceBasis sample_haar_basis(int n, int d, RngStream& rng, std::vector<double>& raw_rows) {
  if (d < 1 || n < d) throw std::invalid_argument("sample_haar_basis: need 1 <= d <= n");
  const double tol = 1e-12 * std::sqrt(static_cast<double>(n));
  for (;;) {
    raw_rows.resize(static_cast<std::size_t>(d) * n);
    for (double& x : raw_rows) x = rng.normal();
    std::vector<double> rows = raw_rows;
    const auto pivots = modified_gram_schmidt(d, n, rows);
    bool ok = true;
    for (double piv : pivots) ok = ok && piv > tol;
    if (ok) return SubspaceBasis(d, n, std::move(rows));
  }
}

SubspaceBasis sample_haar_basis(int n, int d, RngStream& rng) {
  std::vector<double> raw;
  return sample_haar_basis(n, d, rng, raw);
}

}  // namespace slicelab
