#include "slicelab/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "slicelab/charfn.hpp"
#include "slicelab/errors.hpp"
#include "slicelab/geometry.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

constexpr std::uint64_t kPilotStream = 0xFFFF'FFFF'0000'0000ull;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_thread_count(); }

double unit_fourth_sum(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v * v * v;
  return s;
}

void finish(ExperimentReport& rep) {
  rep.degenerate = rep.sigma2 == 0.0;
  rep.summary = summarize_against_normal(rep.stat, rep.sigma2);
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Clt: return "clt";
    case ExperimentKind::MeanExpansion: return "mean";
    case ExperimentKind::Cube: return "cube";
    case ExperimentKind::Intersection: return "intersection";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "clt") return ExperimentKind::Clt;
  if (s == "mean") return ExperimentKind::MeanExpansion;
  if (s == "cube") return ExperimentKind::Cube;
  if (s == "intersection") return ExperimentKind::Intersection;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (replicas < 2) throw std::invalid_argument("experiment: need at least 2 replicas");
  if (d < 1) throw std::invalid_argument("experiment: d must be positive");
  if (kind == ExperimentKind::MeanExpansion) {
    if (n_grid.size() < 3) throw std::invalid_argument("experiment: mean expansion needs an n grid of at least 3 points");
    for (int m : n_grid) {
      if (m < 2) throw std::invalid_argument("experiment: grid values must be at least 2");
    }
  } else if (n <= d) {
    throw std::invalid_argument("experiment: need n > d");
  }
  if (kind == ExperimentKind::Cube) {
    if (d != 1) throw RegimeError("experiment: cube sections are codimension one");
    return;
  }
  if (p.cube()) throw RegimeError("experiment: p = inf is only available for cube sections");
  if ((kind == ExperimentKind::MeanExpansion || kind == ExperimentKind::Intersection) && d != 1) {
    throw RegimeError("experiment: this experiment is codimension one");
  }
  (void)clt_constants(p, d);
  if (estimator == EstimateMethod::DetFormula && !p.sub2()) {
    throw RegimeError("experiment: the determinant estimator requires p in (0, 2)");
  }
  if (estimator == EstimateMethod::CfQuadrature && d > 2) {
    throw RegimeError("experiment: the characteristic function estimator requires d <= 2");
  }
  if (estimator == EstimateMethod::Oracle) throw RegimeError("experiment: the oracle is not an experiment estimator");
  if (estimator == EstimateMethod::DetFormula && inner_samples == 0 && !(inner_delta > 0.0)) {
    throw std::invalid_argument("experiment: inner budget delta must be positive");
  }
}

int default_thread_count() {
  if (const char* env = std::getenv("SLICELAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = 0;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error || i < error_index) {
          error = std::current_exception();
          error_index = i;
        }
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("replica " + std::to_string(error_index) + ": " + e.what());
    }
  }
}

Summary summarize_against_normal(std::span<const double> stats, double sigma2) {
  const SampleSummary s = summarize(stats);
  const double sd = std::sqrt(std::max(sigma2, 0.0));
  return {s.mean, s.var, s.skew, ks_normal(stats, 0.0, sd), wasserstein1(stats, 0.0, sd)};
}

ExperimentReport run_clt_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  rep.n = cfg.n;
  const CltConstants c = clt_constants(cfg.p, cfg.d);
  rep.a = c.a;
  rep.b = c.b;
  rep.sigma2 = c.sigma2;

  if (cfg.estimator == EstimateMethod::DetFormula) {
    rep.inner_samples = cfg.inner_samples;
    if (rep.inner_samples == 0) {
      double k = cfg.inner_constant;
      if (!(k > 0.0)) {
        RngStream pilot(cfg.seed, kPilotStream);
        k = calibrate_inner_constant(cfg.p, cfg.d, cfg.n, 8, 20000, pilot);
        rep.diagnostics.emplace_back("inner_constant", k);
      }
      rep.inner_samples = choose_inner_samples(cfg.n, cfg.inner_delta, k);
    }
    (void)shared_w_table(0.5 * cfg.p.value());
  } else {
    (void)shared_charfn(cfg.p);
  }

  const auto r = static_cast<std::size_t>(cfg.replicas);
  rep.ratio.assign(r, 0.0);
  rep.stat.assign(r, 0.0);
  const double n = cfg.n;
  const double scale = std::pow(n, 1.5);
  parallel_for(r, resolve_threads(cfg.threads), [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    const SubspaceBasis basis = sample_haar_basis(cfg.n, cfg.d, rng);
    const VolumeEstimate est = cfg.estimator == EstimateMethod::DetFormula
                                   ? det_formula_ratio(cfg.p, basis, rep.inner_samples, rng)
                                   : cf_density_ratio(cfg.p, basis);
    rep.ratio[i] = est.value;
    rep.stat[i] = scale * (est.value - c.a - c.b / n);
  });
  finish(rep);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_cube_experiment(const ExperimentConfig& cfg) {
  ExperimentConfig local = cfg;
  local.kind = ExperimentKind::Cube;
  local.d = 1;
  local.p = PNorm::infinity();
  local.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = local;
  rep.n = local.n;
  const CubeExpansion c = cube_expansion(local.x);
  rep.a = c.a;
  rep.b = c.b;
  rep.sigma2 = c.sigma2;
  const auto r = static_cast<std::size_t>(local.replicas);
  rep.ratio.assign(r, 0.0);
  rep.stat.assign(r, 0.0);
  const double n = local.n;
  const double scale = std::pow(n, 1.5);
  parallel_for(r, resolve_threads(local.threads), [&](std::size_t i) {
    RngStream rng(local.seed, i);
    const SubspaceBasis basis = sample_haar_basis(local.n, 1, rng);
    const double value = cube_parallel_section_oracle(local.x, basis);
    rep.ratio[i] = value;
    rep.stat[i] = scale * (value - c.a - c.b / n);
  });
  finish(rep);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_intersection_experiment(const ExperimentConfig& cfg) {
  ExperimentConfig local = cfg;
  local.kind = ExperimentKind::Intersection;
  local.d = 1;
  local.estimator = EstimateMethod::CfQuadrature;
  local.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = local;
  rep.n = local.n;
  const CltConstants c = clt_constants(local.p, 1);
  const IntersectionConstants ic = intersection_constants(local.p);
  // the reciprocal is centred at 1/a with 1/n coefficient -b/a^2
  rep.a = ic.center;
  rep.b = -ic.shift;
  rep.sigma2 = ic.variance;
  (void)shared_charfn(local.p);

  const auto r = static_cast<std::size_t>(local.replicas);
  rep.ratio.assign(r, 0.0);
  rep.stat.assign(r, 0.0);
  std::vector<double> direct(r), remainder(r);
  const double n = local.n;
  const double scale = std::pow(n, 1.5);
  parallel_for(r, resolve_threads(local.threads), [&](std::size_t i) {
    RngStream rng(local.seed, i);
    const SubspaceBasis basis = sample_haar_basis(local.n, 1, rng);
    const double ratio = cf_density_ratio(local.p, basis).value;
    rep.ratio[i] = ratio;
    rep.stat[i] = scale * (1.0 / ratio - ic.center + ic.shift / n);
    direct[i] = scale * (ratio - c.a - c.b / n);
    const double dev = ratio - c.a;
    remainder[i] = scale * dev * dev / (c.a * c.a * ratio);
  });
  // stat_recip + stat/a^2 equals the quadratic remainder exactly
  double worst = 0.0;
  double max_remainder = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double gap = rep.stat[i] + direct[i] / (c.a * c.a) - remainder[i];
    worst = std::max(worst, std::abs(gap));
    max_remainder = std::max(max_remainder, remainder[i]);
  }
  finish(rep);
  rep.diagnostics.emplace_back("delta_identity_max_gap", worst);
  rep.diagnostics.emplace_back("delta_remainder_max", max_remainder);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

MeanExpansionReport run_mean_expansion(const ExperimentConfig& cfg) {
  ExperimentConfig local = cfg;
  local.kind = ExperimentKind::MeanExpansion;
  local.d = 1;
  local.estimator = EstimateMethod::CfQuadrature;
  local.validate();
  const auto t0 = std::chrono::steady_clock::now();
  MeanExpansionReport rep;
  rep.config = local;
  const CltConstants c = clt_constants(local.p, 1);
  rep.a = c.a;
  rep.b = c.b;
  rep.sigma2 = c.sigma2;
  const double cv_coef = c.a * pgauss_cumulants(local.p).excess() / 8.0;
  (void)shared_charfn(local.p);

  const auto r = static_cast<std::size_t>(local.replicas);
  std::vector<double> ns, abs_cv, abs_plain;
  for (std::size_t g = 0; g < local.n_grid.size(); ++g) {
    const int n_val = local.n_grid[g];
    std::vector<double> ratio(r), adjusted(r);
    const double eq = 3.0 / (n_val + 2.0);
    parallel_for(r, resolve_threads(local.threads), [&](std::size_t i) {
      // separate stream block per grid point
      RngStream rng(local.seed, (static_cast<std::uint64_t>(g) << 40) | i);
      const SubspaceBasis basis = sample_haar_basis(n_val, 1, rng);
      ratio[i] = cf_density_ratio(local.p, basis).value;
      adjusted[i] = ratio[i] - cv_coef * (unit_fourth_sum(basis.row(0)) - eq);
    });
    const SampleSummary plain = summarize(ratio);
    const SampleSummary cv = summarize(adjusted);
    const double n = n_val;
    const double rr = static_cast<double>(r);
    MeanExpansionRow row;
    row.n = n_val;
    row.mean = plain.mean;
    row.mean_se = std::sqrt(plain.var / rr);
    row.cv_mean = cv.mean;
    row.cv_se = std::sqrt(cv.var / rr);
    row.predicted = c.a + c.b / n;
    row.residual = plain.mean - row.predicted;
    row.cv_residual = cv.mean - row.predicted;
    row.floor = std::sqrt(c.sigma2 / rr) * std::pow(n, -1.5);
    row.b_estimate = (cv.mean - c.a) * n;
    row.b_estimate_se = n * row.floor;
    rep.rows.push_back(row);
    ns.push_back(n);
    abs_cv.push_back(row.cv_residual);
    abs_plain.push_back(row.residual);
  }
  rep.exponent = -loglog_slope(ns, abs_cv);
  rep.exponent_plain = -loglog_slope(ns, abs_plain);
  const MeanExpansionRow& last = rep.rows.back();
  rep.b_z = (last.b_estimate - c.b) / last.b_estimate_se;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace slicelab
