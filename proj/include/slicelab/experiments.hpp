#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slicelab/estimators.hpp"
#include "slicelab/pnorm.hpp"
#include "slicelab/stats.hpp"

namespace slicelab {

enum class ExperimentKind { Clt, MeanExpansion, Cube, Intersection };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Clt;
  PNorm p = PNorm::finite_value(1.0);
  int d = 1;
  int n = 1000;
  std::vector<int> n_grid;  ///< mean expansion only
  int replicas = 100;
  std::uint64_t seed = 1;
  EstimateMethod estimator = EstimateMethod::CfQuadrature;
  std::int64_t inner_samples = 0;  ///< det path; 0 selects from the budget below
  double inner_delta = 0.2;
  double inner_constant = 0.0;  ///< 0 runs a pilot calibration
  double x = 0.0;               ///< cube offset
  int threads = 0;              ///< 0 uses default_thread_count()

  /// Throws std::invalid_argument or RegimeError on inconsistent settings.
  void validate() const;
};

/// SLICELAB_THREADS if set, else the hardware concurrency.
int default_thread_count();

/// Runs body(i) for i in [0, count) on `threads` workers. The first exception
/// is rethrown after all workers stop, tagged with its index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

struct Summary {
  double mean = 0.0;
  double var = 0.0;
  double skew = 0.0;
  double ks = 0.0;
  double w1 = 0.0;
};

Summary summarize_against_normal(std::span<const double> stats, double sigma2);

struct ExperimentReport {
  ExperimentConfig config;
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double sigma2 = 0.0;
  bool degenerate = false;
  std::int64_t inner_samples = 0;
  std::vector<double> ratio;  ///< raw value per replica
  std::vector<double> stat;   ///< n^{3/2}(value - a - b/n)
  Summary summary;
  std::vector<std::pair<std::string, double>> diagnostics;
  double wall_seconds = 0.0;
};

/// Normalized section volumes over Haar subspaces against N(0, Sigma^2).
ExperimentReport run_clt_experiment(const ExperimentConfig& cfg);

/// Parallel cube sections at offset cfg.x against N(0, Sigma(x)^2).
ExperimentReport run_cube_experiment(const ExperimentConfig& cfg);

/// Reciprocal ratios (intersection body gauge) against N(0, Sigma^2/a^4).
/// Adds diagnostics for the pathwise delta-method identity.
ExperimentReport run_intersection_experiment(const ExperimentConfig& cfg);

struct MeanExpansionRow {
  int n = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double cv_mean = 0.0;  ///< control variate sum u^4 with known mean 3/(n+2)
  double cv_se = 0.0;
  double predicted = 0.0;  ///< a + b/n
  double residual = 0.0;
  double cv_residual = 0.0;
  double floor = 0.0;  ///< Sigma / sqrt(R) n^{-3/2}
  double b_estimate = 0.0;     ///< (cv_mean - a) n
  double b_estimate_se = 0.0;  ///< n times floor
};

struct MeanExpansionReport {
  ExperimentConfig config;
  double a = 0.0;
  double b = 0.0;
  double sigma2 = 0.0;
  std::vector<MeanExpansionRow> rows;
  double exponent = 0.0;     ///< minus log-log slope of |cv_residual|
  double exponent_plain = 0.0;
  double b_z = 0.0;          ///< (b_estimate - b)/floor error at the largest n
  double wall_seconds = 0.0;
};

MeanExpansionReport run_mean_expansion(const ExperimentConfig& cfg);

}  // namespace slicelab
