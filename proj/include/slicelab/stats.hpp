#pragma once

#include <span>
#include <vector>

namespace slicelab {

struct SampleSummary {
  double mean = 0.0;
  double var = 0.0;  ///< unbiased
  double skew = 0.0;
};

SampleSummary summarize(std::span<const double> xs);

double normal_cdf(double x);
double normal_quantile(double u);

/// sup |F_emp - Phi((x - mean)/sd)|; for sd = 0 the reference is the point mass at mean.
double ks_normal(std::span<const double> xs, double mean, double sd);
/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic Kolmogorov p-value for statistic D with effective size n_eff.
double ks_pvalue(double d, double n_eff);

/// W1 between the empirical law and N(mean, sd^2), midpoint rule on the
/// (i - 1/2)/R quantiles.
double wasserstein1(std::span<const double> xs, double mean, double sd);

/// Spearman rank correlation.
double spearman(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least squares y = intercept + slope x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Slope of log|y| against log x; 0 when every y vanishes.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace slicelab
