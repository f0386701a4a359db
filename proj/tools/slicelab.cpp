// Command-line front end.
//
// Exit codes: 0 all checks passed, 1 a pinned invariant failed, 2 usage or
// regime error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicelab/edgeworth.hpp"
#include "slicelab/errors.hpp"
#include "slicelab/estimators.hpp"
#include "slicelab/experiments.hpp"
#include "slicelab/report.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"
#include "slicelab/stats.hpp"
#include "slicelab/ustat.hpp"

using namespace slicelab;
using nlohmann::json;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counts may be written as 1e6.
std::int64_t parse_count(const std::string& text, const char* flag) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0) || v != std::floor(v) || v > 9e18) {
    throw UsageError(std::string(flag) + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(static_cast<int>(parse_count(item, "--grid")));
  if (out.empty()) throw UsageError("--grid: empty list");
  return out;
}

EstimateMethod parse_method(const std::string& s) {
  if (s == "det") return EstimateMethod::DetFormula;
  if (s == "cf") return EstimateMethod::CfQuadrature;
  if (s == "oracle") return EstimateMethod::Oracle;
  throw UsageError("--method: expected det, cf or oracle");
}

struct Output {
  bool quiet = false;
  void print(const json& j) const {
    if (!quiet) std::cout << j.dump(2) << '\n';
  }
};

struct Check {
  std::string name;
  double value;
  double limit;
  bool pass;
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  return arr;
}

int verdict(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) {
      std::cerr << "failed invariant: " << c.name << " (value " << format_double(c.value) << ", limit "
                << format_double(c.limit) << ")\n";
      return kExitFailed;
    }
  }
  return 0;
}

SubspaceBasis basis_from_seed(int n, int d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample_haar_basis(n, d, rng);
}

// ---- subcommands ---------------------------------------------------------

struct ConstantsArgs {
  std::string p = "1";
  int d = 1;
  bool cube = false;
  bool intersection = false;
  double x = 0.0;
};

int cmd_constants(const ConstantsArgs& a, const Output& out) {
  if (a.cube) {
    out.print(to_json(cube_expansion(a.x)));
    return 0;
  }
  const PNorm p = PNorm::parse(a.p);
  if (p.cube()) throw RegimeError("constants: use --cube for p = inf");
  if (a.intersection) {
    out.print(to_json(intersection_constants(p)));
    return 0;
  }
  out.print(to_json(clt_constants(p, a.d)));
  return 0;
}

struct EstimateArgs {
  std::string p = "1";
  int n = 2;
  int d = 1;
  std::uint64_t seed = 1;
  std::string method = "cf";
  std::string inner = "1e6";
};

int cmd_estimate(const EstimateArgs& a, const Output& out) {
  const PNorm p = PNorm::parse(a.p);
  const auto method = parse_method(a.method);
  if (a.d < 1 || a.n <= a.d) throw UsageError("need 1 <= d < n");
  const auto basis = basis_from_seed(a.n, a.d, a.seed);
  VolumeEstimate est;
  switch (method) {
    case EstimateMethod::DetFormula: {
      RngStream rng(a.seed, 1);
      est = det_formula_ratio(p, basis, parse_count(a.inner, "--inner-samples"), rng);
      break;
    }
    case EstimateMethod::CfQuadrature: est = cf_density_ratio(p, basis); break;
    case EstimateMethod::Oracle: est = oracle_ratio(p, basis); break;
  }
  json j = to_json(est);
  j["p"] = p.to_string();
  j["n"] = a.n;
  j["d"] = a.d;
  j["seed"] = a.seed;
  if (a.n - a.d <= 2 && p.finite() && method != EstimateMethod::Oracle) j["oracle"] = oracle_ratio(p, basis).value;
  out.print(j);
  return 0;
}

struct OracleCompareArgs {
  std::string p = "1";
  int n = 3;
  int d = 1;
  int cases = 100;
  std::uint64_t seed = 1;
  std::string inner = "1e6";
  int threads = 0;
};

int cmd_oracle_compare(const OracleCompareArgs& a, const Output& out) {
  const PNorm p = PNorm::parse(a.p);
  if (!p.sub2()) throw RegimeError("oracle-compare: the determinant estimator requires p in (0, 2)");
  if (a.n - a.d < 1 || a.n - a.d > 2) throw RegimeError("oracle-compare: the oracle needs n - d in {1, 2}");
  if (a.d > 2) throw RegimeError("oracle-compare: the characteristic function estimator needs d <= 2");
  if (a.cases < 1) throw UsageError("--cases must be positive");
  const auto m = parse_count(a.inner, "--inner-samples");

  struct Row {
    double oracle, cf, det, se;
  };
  std::vector<Row> rows(static_cast<std::size_t>(a.cases));
  parallel_for(rows.size(), a.threads > 0 ? a.threads : default_thread_count(), [&](std::size_t i) {
    RngStream rng(a.seed, i);
    const auto basis = sample_haar_basis(a.n, a.d, rng);
    const auto det = det_formula_ratio(p, basis, m, rng);
    rows[i] = {oracle_ratio(p, basis).value, cf_density_ratio(p, basis).value, det.value, det.stderr_};
  });
  double max_z = 0.0, max_gap = 0.0, max_se = 0.0;
  json cases = json::array();
  for (const auto& r : rows) {
    max_z = std::max(max_z, std::abs(r.det - r.oracle) / r.se);
    max_gap = std::max(max_gap, std::abs(r.cf - r.oracle));
    max_se = std::max(max_se, r.se);
    cases.push_back({{"oracle", r.oracle}, {"cf", r.cf}, {"det", r.det}, {"det_stderr", r.se}});
  }
  const std::vector<Check> checks = {{"max |det - oracle| / stderr", max_z, 3.0, max_z < 3.0},
                                     {"max |cf - oracle|", max_gap, 1e-6, max_gap < 1e-6}};
  out.print({{"p", p.to_string()},
             {"n", a.n},
             {"d", a.d},
             {"cases", a.cases},
             {"inner_samples", m},
             {"max_det_z", max_z},
             {"max_cf_gap", max_gap},
             {"max_det_stderr", max_se},
             {"checks", checks_json(checks)},
             {"results", cases}});
  return verdict(checks);
}

struct UstatArgs {
  int d = 1;
  std::string samples = "1e6";
  std::uint64_t seed = 1;
};

int cmd_ustat_check(const UstatArgs& a, const Output& out) {
  if (a.d < 1 || a.d > 3) throw RegimeError("ustat-check: d must lie in {1, 2, 3}");
  RngStream rng(a.seed, 0);
  const auto rep = ustat_check(a.d, parse_count(a.samples, "--samples"), rng);
  const std::vector<Check> checks = {{"|z| E h", std::abs(rep.z_eh()), 4.0, std::abs(rep.z_eh()) < 4.0},
                                     {"|z| Var pi_1 h", std::abs(rep.z_var()), 4.0, std::abs(rep.z_var()) < 4.0},
                                     {"|z| Cov", std::abs(rep.z_cov()), 4.0, std::abs(rep.z_cov()) < 4.0}};
  json j = to_json(rep);
  j["checks"] = checks_json(checks);
  out.print(j);
  return verdict(checks);
}

struct EdgeworthArgs {
  std::string p = "1";
  std::string grid = "200,400,800,1600";
  std::uint64_t seed = 1;
};

int cmd_edgeworth_check(const EdgeworthArgs& a, const Output& out) {
  const PNorm p = PNorm::parse(a.p);
  if (p.cube()) throw RegimeError("edgeworth-check: p must be finite");
  const auto grid = parse_grid(a.grid);
  if (grid.size() < 2) throw UsageError("--grid: need at least two sizes");
  int longest = 0;
  for (int n : grid) {
    if (n < 2) throw UsageError("--grid: sizes must be at least 2");
    longest = std::max(longest, n);
  }
  // one direction sequence; each n uses its first n entries
  RngStream rng(a.seed, 0);
  std::vector<double> g(static_cast<std::size_t>(longest));
  for (auto& v : g) v = rng.normal();

  std::vector<double> ns, gaps;
  json rows = json::array();
  for (int n : grid) {
    std::span<const double> head(g.data(), static_cast<std::size_t>(n));
    const auto basis = SubspaceBasis::from_rows(1, n, {head.begin(), head.end()});
    const double cf = cf_density_ratio(p, basis).value;
    const auto pred = predicted_ratio_d1(p, head);
    ns.push_back(n);
    gaps.push_back(std::abs(cf - pred.predicted));
    rows.push_back({{"n", n}, {"cf", cf}, {"predicted", pred.predicted}, {"leading", pred.leading}, {"gap", gaps.back()}});
  }
  const double slope = loglog_slope(ns, gaps);
  std::vector<Check> checks;
  if (p.value() != 2.0) checks.push_back({"log-log slope of the remainder", slope, -1.2, slope <= -1.2});
  out.print({{"p", p.to_string()}, {"rows", rows}, {"slope", slope}, {"checks", checks_json(checks)}});
  return verdict(checks);
}

struct ExperimentArgs {
  std::string kind = "clt";
  std::string p = "1";
  int d = 1;
  int n = 1000;
  std::string grid = "250,500,1000,2000";
  double x = 0.0;
  int replicas = 100;
  std::uint64_t seed = 1;
  std::string method = "";
  std::string inner = "0";
  double delta = 0.2;
  int threads = 0;
  std::string out;
  std::string samples_out;
  std::string format = "json";
  bool replicas_in_report = false;
  bool timing = false;
};

std::vector<Check> experiment_checks(const ExperimentReport& rep) {
  std::vector<Check> checks;
  const double r = rep.config.replicas;
  if (rep.degenerate) {
    double worst = 0.0;
    for (double s : rep.stat) worst = std::max(worst, std::abs(s));
    checks.push_back({"degenerate statistic", worst, 1e-9, worst <= 1e-9});
    return checks;
  }
  const bool det = rep.config.kind == ExperimentKind::Clt && rep.config.estimator == EstimateMethod::DetFormula;
  const double inner = det ? rep.config.inner_delta * rep.config.inner_delta : 0.0;
  const double mean_tol = 4.0 * std::sqrt((rep.sigma2 + inner) / r);
  checks.push_back({"|mean|", std::abs(rep.summary.mean), mean_tol, std::abs(rep.summary.mean) <= mean_tol});
  const double rel = std::abs(rep.summary.var / rep.sigma2 - 1.0);
  const double var_tol = det ? 0.3 : 0.2;
  checks.push_back({"|var / sigma2 - 1|", rel, var_tol, rel <= var_tol});
  return checks;
}

int cmd_experiment(const ExperimentArgs& a, const Output& out) {
  ExperimentConfig cfg;
  cfg.kind = parse_experiment_kind(a.kind);
  cfg.p = cfg.kind == ExperimentKind::Cube ? PNorm::infinity() : PNorm::parse(a.p);
  cfg.d = a.d;
  cfg.n = a.n;
  cfg.replicas = a.replicas;
  cfg.seed = a.seed;
  cfg.x = a.x;
  cfg.threads = a.threads;
  cfg.inner_samples = parse_count(a.inner, "--inner-samples");
  cfg.inner_delta = a.delta;
  if (!a.method.empty()) {
    cfg.estimator = parse_method(a.method);
  } else {
    cfg.estimator = cfg.d == 1 ? EstimateMethod::CfQuadrature : EstimateMethod::DetFormula;
  }
  if (a.format != "json" && a.format != "csv") throw UsageError("--format: expected json or csv");

  json report;
  std::vector<Check> checks;
  std::optional<ExperimentReport> samples;
  if (cfg.kind == ExperimentKind::MeanExpansion) {
    cfg.n_grid = parse_grid(a.grid);
    cfg.n = cfg.n_grid.back();
    const auto rep = run_mean_expansion(cfg);
    report = to_json(rep);
    if (rep.sigma2 > 0.0) {
      checks.push_back({"|b z-score| at the largest n", std::abs(rep.b_z), 4.0, std::abs(rep.b_z) < 4.0});
      checks.push_back({"residual decay exponent", rep.exponent, 1.25, rep.exponent > 1.25});
    } else {
      double worst = 0.0;
      for (const auto& row : rep.rows) worst = std::max(worst, std::abs(row.residual));
      checks.push_back({"degenerate residual", worst, 1e-12, worst <= 1e-12});
    }
  } else {
    ExperimentReport rep;
    switch (cfg.kind) {
      case ExperimentKind::Clt: rep = run_clt_experiment(cfg); break;
      case ExperimentKind::Cube: rep = run_cube_experiment(cfg); break;
      case ExperimentKind::Intersection: rep = run_intersection_experiment(cfg); break;
      case ExperimentKind::MeanExpansion: break;
    }
    report = to_json(rep, a.replicas_in_report);
    checks = experiment_checks(rep);
    samples = std::move(rep);
  }
  if (!a.timing) report.erase("wall_seconds");
  report["checks"] = checks_json(checks);

  if (!a.out.empty()) write_text_file(a.out, report.dump(2) + "\n");
  if (!a.samples_out.empty()) {
    if (!samples) throw UsageError("--samples-out is not available for the mean expansion");
    std::ostringstream csv;
    write_samples_csv(csv, *samples);
    write_text_file(a.samples_out, csv.str());
  }
  if (!out.quiet) {
    if (a.format == "csv") {
      if (!samples) throw UsageError("--format csv is not available for the mean expansion");
      write_samples_csv(std::cout, *samples);
    } else {
      std::cout << report.dump(2) << '\n';
    }
  }
  return verdict(checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random sections of l_p balls: constants, estimators and limit-theorem experiments"};
  app.require_subcommand(1);
  Output out;

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Limit constants a, b, sigma2");
  constants->add_option("--p", ca.p, "Exponent p (number or inf)");
  constants->add_option("--d", ca.d, "Codimension d")->check(CLI::PositiveNumber);
  constants->add_flag("--cube", ca.cube, "Parallel cube sections at offset --x");
  constants->add_option("--x", ca.x, "Offset for --cube");
  constants->add_flag("--intersection", ca.intersection, "Intersection body constants (d = 1)");

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "One normalized section volume for a Haar subspace drawn from --seed");
  estimate->add_option("--p", ea.p, "Exponent p");
  estimate->add_option("--n", ea.n, "Ambient dimension")->required();
  estimate->add_option("--d", ea.d, "Codimension");
  estimate->add_option("--seed", ea.seed, "Seed");
  estimate->add_option("--method", ea.method, "det, cf or oracle");
  estimate->add_option("--inner-samples", ea.inner, "Monte Carlo samples for det");

  OracleCompareArgs oa;
  auto* compare = app.add_subcommand("oracle-compare", "Estimators against the geometric oracle on random bases");
  compare->add_option("--p", oa.p, "Exponent p in (0, 2)");
  compare->add_option("--n", oa.n, "Ambient dimension");
  compare->add_option("--d", oa.d, "Codimension");
  compare->add_option("--cases", oa.cases, "Number of random bases");
  compare->add_option("--seed", oa.seed, "Seed");
  compare->add_option("--inner-samples", oa.inner, "Monte Carlo samples per det estimate");
  compare->add_option("--threads", oa.threads, "Worker threads (default SLICELAB_THREADS or all cores)");

  UstatArgs ua;
  auto* ustat = app.add_subcommand("ustat-check", "Monte Carlo check of the U-statistic closed forms");
  ustat->add_option("--d", ua.d, "Dimension d in {1, 2, 3}");
  ustat->add_option("--samples", ua.samples, "Monte Carlo samples");
  ustat->add_option("--seed", ua.seed, "Seed");

  EdgeworthArgs wa;
  auto* edgeworth = app.add_subcommand("edgeworth-check", "Density expansion remainder along one direction sequence");
  edgeworth->add_option("--p", wa.p, "Exponent p");
  edgeworth->add_option("--grid", wa.grid, "Comma-separated sizes n");
  edgeworth->add_option("--seed", wa.seed, "Seed");

  ExperimentArgs xa;
  auto* experiment = app.add_subcommand("experiment", "Replicated limit-theorem experiment");
  experiment->add_option("--kind", xa.kind, "clt, mean, cube or intersection");
  experiment->add_option("--p", xa.p, "Exponent p");
  experiment->add_option("--d", xa.d, "Codimension");
  experiment->add_option("--n", xa.n, "Ambient dimension");
  experiment->add_option("--grid", xa.grid, "Sizes for --kind mean");
  experiment->add_option("--x", xa.x, "Offset for --kind cube");
  experiment->add_option("--replicas", xa.replicas, "Number of replicas");
  experiment->add_option("--seed", xa.seed, "Seed");
  experiment->add_option("--method", xa.method, "det or cf (default cf for d = 1, det otherwise)");
  experiment->add_option("--inner-samples", xa.inner, "Fixed det samples per replica (0 uses the --delta budget)");
  experiment->add_option("--delta", xa.delta, "Inner noise budget for det");
  experiment->add_option("--threads", xa.threads, "Worker threads (default SLICELAB_THREADS or all cores)");
  experiment->add_option("--out", xa.out, "Write the JSON report here");
  experiment->add_option("--samples-out", xa.samples_out, "Write per-replica samples as CSV here");
  experiment->add_option("--format", xa.format, "Stdout format: json or csv");
  experiment->add_flag("--replicas-in-report", xa.replicas_in_report, "Include per-replica values in the JSON report");
  experiment->add_flag("--timing", xa.timing, "Include wall-clock seconds in the report");

  for (auto* sub : {constants, estimate, compare, ustat, edgeworth, experiment})
    sub->add_flag("-q,--quiet", out.quiet, "Suppress stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*constants) return cmd_constants(ca, out);
    if (*estimate) return cmd_estimate(ea, out);
    if (*compare) return cmd_oracle_compare(oa, out);
    if (*ustat) return cmd_ustat_check(ua, out);
    if (*edgeworth) return cmd_edgeworth_check(wa, out);
    if (*experiment) return cmd_experiment(xa, out);
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
