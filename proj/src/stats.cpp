#include "slicelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace slicelab {

SampleSummary summarize(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("summarize: need at least 2 samples");
  const double n = static_cast<double>(xs.size());
  long double s = 0.0L;
  for (double x : xs) s += x;
  const double mean = static_cast<double>(s / n);
  long double m2 = 0.0L, m3 = 0.0L;
  for (double x : xs) {
    const long double c = x - mean;
    m2 += c * c;
    m3 += c * c * c;
  }
  SampleSummary out;
  out.mean = mean;
  out.var = static_cast<double>(m2 / (n - 1.0));
  const double pop2 = static_cast<double>(m2 / n);
  out.skew = pop2 > 0.0 ? static_cast<double>(m3 / n) / std::pow(pop2, 1.5) : 0.0;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, u);
}

double ks_normal(std::span<const double> xs, double mean, double sd) {
  const double n = static_cast<double>(xs.size());
  if (!(sd > 0.0)) {
    // distance to the step at `mean`
    const auto below = std::count_if(xs.begin(), xs.end(), [&](double x) { return x < mean; });
    const auto above = std::count_if(xs.begin(), xs.end(), [&](double x) { return x > mean; });
    return static_cast<double>(std::max(below, above)) / n;
  }
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf((v[i] - mean) / sd);
    worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::clamp(worst, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return worst;
}

double ks_pvalue(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double wasserstein1(std::span<const double> xs, double mean, double sd) {
  if (xs.size() < 2) throw std::invalid_argument("wasserstein1: need at least 2 samples");
  if (sd < 0.0) throw std::invalid_argument("wasserstein1: sd must be nonnegative");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double r = static_cast<double>(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = sd > 0.0 ? mean + sd * normal_quantile((static_cast<double>(i) + 0.5) / r) : mean;
    total += std::abs(v[i] - q);
  }
  return total / r;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two equal-length samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) return 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
  }
  return fit_line(lx, ly).slope;
}

}  // namespace slicelab
