#include "slicelab/ustat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "slicelab/errors.hpp"
#include "slicelab/geometry.hpp"
#include "slicelab/specfun.hpp"
#include "slicelab/subspace.hpp"

namespace slicelab {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void fill_gaussian(std::span<double> out, RngStream& rng) {
  for (double& v : out) v = rng.normal();
}

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments mean_and_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  long double s = 0.0L;
  for (double x : xs) s += x;
  const double mean = static_cast<double>(s / n);
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(static_cast<double>(ss / (n - 1.0)) / n)};
}

}  // namespace

double kernel_h(int d, std::span<const double> points) {
  const int m = 2 * d - 1;
  if (d < 1 || static_cast<int>(points.size()) != m * d) throw std::invalid_argument("kernel_h: need 2d-1 points in R^d");
  std::vector<int> others;
  std::vector<double> mat(static_cast<std::size_t>(d) * d);
  auto squared_det = [&](int k, const std::vector<int>& cols) {
    std::copy_n(points.begin() + k * d, d, mat.begin());
    for (int r = 0; r < d - 1; ++r) std::copy_n(points.begin() + cols[r] * d, d, mat.begin() + (r + 1) * d);
    const double det = small_det(mat, d);
    return det * det;
  };
  double total = 0.0;
  std::vector<int> pick;
  std::vector<int> rest;
  for (int k = 0; k < m; ++k) {
    others.clear();
    for (int i = 0; i < m; ++i) {
      if (i != k) others.push_back(i);
    }
    const int r = static_cast<int>(others.size());
    for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
      if (std::popcount(mask) != d - 1) continue;
      pick.clear();
      rest.clear();
      for (int i = 0; i < r; ++i) ((mask >> i) & 1u ? pick : rest).push_back(others[i]);
      total += squared_det(k, pick) * squared_det(k, rest);
    }
  }
  return total / factorial(m);
}

double pi1_h_closed(int d, std::span<const double> gamma) {
  if (static_cast<int>(gamma.size()) != d) throw std::invalid_argument("pi1_h_closed: gamma must have d entries");
  double s = 0.0;
  for (double g : gamma) s += g * g;
  const double dd = d;
  return ((2 * dd - 2) * (dd + 2) * (s - dd) + s * s - dd * (dd + 2)) / (2 * dd - 1);
}

McValue hoeffding_projection_mc(int d, int k, std::span<const double> fixed, std::int64_t m, RngStream& rng) {
  const int order = 2 * d - 1;
  if (k < 0 || k > order) throw std::invalid_argument("hoeffding_projection_mc: k must lie in [0, 2d-1]");
  if (static_cast<int>(fixed.size()) != k * d) throw std::invalid_argument("hoeffding_projection_mc: need k fixed points");
  if (m < 2) throw std::invalid_argument("hoeffding_projection_mc: need at least 2 samples");
  std::vector<double> pts(static_cast<std::size_t>(order) * d);
  double value = 0.0;
  double var = 0.0;
  for (std::uint32_t subset = 0; subset < (1u << k); ++subset) {
    const int size = std::popcount(subset);
    const double sign = ((k - size) % 2 == 0) ? 1.0 : -1.0;
    int slot = 0;
    for (int i = 0; i < k; ++i) {
      if ((subset >> i) & 1u) {
        std::copy_n(fixed.begin() + i * d, d, pts.begin() + slot * d);
        ++slot;
      }
    }
    std::vector<double> hs(static_cast<std::size_t>(m));
    for (auto& h : hs) {
      fill_gaussian(std::span<double>(pts).subspan(static_cast<std::size_t>(slot) * d), rng);
      h = kernel_h(d, pts);
    }
    const Moments mo = mean_and_se(hs);
    value += sign * mo.mean;
    var += mo.stderr_ * mo.stderr_;
  }
  return {value, std::sqrt(var)};
}

McValue projection_second_moment_mc(int d, int k, std::int64_t outer, std::int64_t inner, RngStream& rng) {
  std::vector<double> fixed(static_cast<std::size_t>(k) * d);
  std::vector<double> products(static_cast<std::size_t>(outer));
  for (auto& prod : products) {
    fill_gaussian(fixed, rng);
    const double first = hoeffding_projection_mc(d, k, fixed, inner, rng).value;
    const double second = hoeffding_projection_mc(d, k, fixed, inner, rng).value;
    prod = first * second;
  }
  const Moments mo = mean_and_se(products);
  return {mo.mean, mo.stderr_};
}

McValue kernel_second_moment_mc(int d, std::int64_t samples, RngStream& rng) {
  std::vector<double> pts(static_cast<std::size_t>(2 * d - 1) * d);
  std::vector<double> hs(static_cast<std::size_t>(samples));
  for (auto& h : hs) {
    fill_gaussian(pts, rng);
    const double v = kernel_h(d, pts);
    h = v * v;
  }
  const Moments mo = mean_and_se(hs);
  return {mo.mean, mo.stderr_};
}

double ZIdentity::relative_error() const { return std::abs(lhs - rhs) / std::abs(rhs); }

ZIdentity z_identity_check(int d, int n, std::span<const double> g) {
  const int order = 2 * d - 1;
  if (d < 1 || d > 3 || n < order || n > 12) throw EnumerationGuardError("z_identity_check: need d <= 3 and 2d-1 <= n <= 12");
  if (static_cast<int>(g.size()) != d * n) throw std::invalid_argument("z_identity_check: matrix must be d x n");

  std::vector<double> rows(g.begin(), g.end());
  const auto pivots = modified_gram_schmidt(d, n, rows);
  double v_n = 1.0;
  for (double piv : pivots) v_n *= piv * piv * piv * piv;
  const SubspaceBasis basis(d, n, std::move(rows));
  const CauchyBinetCoeffs coeffs(basis);

  ZIdentity out;
  for (std::size_t s = 0; s < coeffs.size(); ++s) {
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
      int shared = 0;
      for (int i : coeffs.tuple(s)) {
        for (int j : coeffs.tuple(t)) shared += i == j;
      }
      if (shared == 1) out.lhs += coeffs.squared_minor(s) * coeffs.squared_minor(t);
    }
  }

  // kernel summed over injective tuples of raw columns
  std::vector<double> pts(static_cast<std::size_t>(order) * d);
  std::vector<int> chosen(order);
  std::vector<char> used(n, 0);
  double s_n = 0.0;
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == order) {
      for (int slot = 0; slot < order; ++slot) {
        for (int r = 0; r < d; ++r) pts[slot * d + r] = g[r * n + chosen[slot]];
      }
      s_n += kernel_h(d, pts);
      return;
    }
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      chosen[depth] = j;
      self(self, depth + 1);
      used[j] = 0;
    }
  };
  recurse(recurse, 0);
  out.rhs = s_n / v_n;
  return out;
}

double kernel_mean(int d) { return static_cast<double>(d) * (d + 2); }

double pi1_variance_closed(int d) {
  const double dd = d;
  return (8 * dd * dd * dd * (dd + 2) * (dd + 2) + 24 * dd + 4 * dd * (dd - 1)) / ((2 * dd - 1) * (2 * dd - 1));
}

double pi1_variance_chi2(int d) {
  const double dd = d;
  const double c = (2 * dd - 2) * (dd + 2);
  const double var_s = 2 * dd;
  const double var_s2 = dd * (dd + 2) * (dd + 4) * (dd + 6) - dd * dd * (dd + 2) * (dd + 2);
  const double cov_s_s2 = 4 * dd * (dd + 2);
  return (c * c * var_s + var_s2 + 2 * c * cov_s_s2) / ((2 * dd - 1) * (2 * dd - 1));
}

double pi1_covariance_closed(int d) {
  const double dd = d;
  return 4 * dd * dd * (dd + 2) / (2 * dd - 1);
}

double assembled_sigma2(PNorm p, int d, double eh, double var_pi1, double cov) {
  const double mu = mixing_mu(p, d);
  const double nu = mixing_nu(p, d);
  const double pre = det_prefactor(p, d);
  const double k = 2.0 * d - 1.0;
  const double bracket = 8.0 * eh * eh * d + k * k * var_pi1 - 4.0 * k * eh * cov;
  return pre * pre * 9.0 * nu * nu / (64.0 * std::pow(mu, 5)) * bracket;
}

UstatReport ustat_check(int d, std::int64_t samples, RngStream& rng) {
  if (d < 1 || samples < 2) throw std::invalid_argument("ustat_check: need d >= 1 and at least 2 samples");
  const int order = 2 * d - 1;
  std::vector<double> pts(static_cast<std::size_t>(order) * d);
  std::vector<double> hs(samples), p1(samples), sq(samples);
  for (std::int64_t i = 0; i < samples; ++i) {
    fill_gaussian(pts, rng);
    hs[i] = kernel_h(d, pts);
    const std::span<const double> gamma(pts.data(), static_cast<std::size_t>(d));
    p1[i] = pi1_h_closed(d, gamma);
    double s = 0.0;
    for (double v : gamma) s += v * v;
    sq[i] = s - d;
  }
  UstatReport rep;
  rep.d = d;
  rep.samples = samples;
  const Moments eh = mean_and_se(hs);
  rep.eh = {eh.mean, eh.stderr_};

  const double n = static_cast<double>(samples);
  const Moments m1 = mean_and_se(p1);
  const Moments m2 = mean_and_se(sq);
  std::vector<double> centered2(samples), cross(samples);
  for (std::int64_t i = 0; i < samples; ++i) {
    const double a = p1[i] - m1.mean;
    centered2[i] = a * a;
    cross[i] = a * (sq[i] - m2.mean);
  }
  const Moments var = mean_and_se(centered2);
  const Moments cov = mean_and_se(cross);
  // n/(n-1) bias correction on the plug-in second moments
  rep.var_pi1 = {var.mean * n / (n - 1.0), var.stderr_};
  rep.cov = {cov.mean * n / (n - 1.0), cov.stderr_};
  rep.eh_target = kernel_mean(d);
  rep.var_target = pi1_variance_closed(d);
  rep.var_chi2 = pi1_variance_chi2(d);
  rep.cov_target = pi1_covariance_closed(d);
  return rep;
}

}  // namespace slicelab
