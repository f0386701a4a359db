// Acceptance suite: one PASS/FAIL line per criterion.
//
//   slicelab_acceptance            run all criteria
//   slicelab_acceptance 4 7        run the listed criteria
//
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "slicelab/charfn.hpp"
#include "slicelab/edgeworth.hpp"
#include "slicelab/estimators.hpp"
#include "slicelab/experiments.hpp"
#include "slicelab/geometry.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"
#include "slicelab/stats.hpp"
#include "slicelab/ustat.hpp"

using namespace slicelab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_.size() < 6) failures_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }

  Outcome outcome() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < notes_.size(); ++i) out << (i ? "; " : "") << notes_[i];
    for (const auto& f : failures_) out << " | failed: " << f;
    return {pass_, out.str()};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome degenerate_constants() {
  Checker c;
  double worst = 0.0;
  for (int d = 1; d <= 6; ++d) {
    const auto k = clt_constants(PNorm::finite_value(2.0), d);
    const double err = std::max({std::abs(k.a - 1.0), std::abs(k.b), std::abs(k.sigma2)});
    worst = std::max(worst, err);
    c.expect(err <= 1e-12, fmt("d=%d err %.3g", d, err));
  }
  c.note(fmt("max deviation %.3g", worst));
  return c.outcome();
}

Outcome laplace_constants() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Checker c;
  const Big pi = boost::math::constants::pi<Big>();
  // a, b, Sigma^2 at d = 1 from gamma ratios in 50-digit arithmetic
  const Big p = 1;
  const Big g = boost::math::tgamma(1 + 1 / p);
  const Big r = boost::math::tgamma(3 / p) / boost::math::tgamma(1 / p);
  const Big k = boost::math::tgamma(5 / p) / boost::math::tgamma(1 / p) - 3 * r * r;
  const Big a = sqrt(Big(2)) * g / sqrt(r * pi);
  const Big b = 3 * k * pow(r, Big(-2.5)) * g / (sqrt(Big(2)) * 4 * sqrt(pi));
  const Big s2 = 6 * k * k * g * g / (8 * pi * pow(r, Big(5)));

  const double closed[3] = {1.0 / std::sqrt(std::numbers::pi), 9.0 / (8.0 * std::sqrt(std::numbers::pi)),
                            27.0 / (8.0 * std::numbers::pi)};
  const double big[3] = {a.convert_to<double>(), b.convert_to<double>(), s2.convert_to<double>()};
  const auto got = clt_constants(PNorm::finite_value(1.0), 1);
  const double mine[3] = {got.a, got.b, got.sigma2};
  const char* names[3] = {"a", "b", "sigma2"};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e1 = std::abs(mine[i] - closed[i]);
    const double e2 = std::abs(mine[i] - big[i]);
    worst = std::max({worst, e1, e2});
    c.expect(e1 <= 1e-12 && e2 <= 1e-12, fmt("%s: %.17g vs %.17g / %.17g", names[i], mine[i], closed[i], big[i]));
  }
  c.note(fmt("a=%.15f b=%.15f sigma2=%.15f, max deviation %.3g", got.a, got.b, got.sigma2, worst));
  return c.outcome();
}

struct Mean {
  double value = 0.0;
  double se = 0.0;
};

Mean mean_of(std::int64_t count, const std::function<double()>& draw) {
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = draw();
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count))};
}

Outcome sampler_audits() {
  Checker c;
  constexpr std::int64_t draws = 1'000'000;
  double worst_laplace = 0.0, worst_w = 0.0, worst_y = 0.0;

  std::uint64_t stream = 0;
  for (double alpha : {0.25, 0.5, 0.75}) {
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      RngStream rng(301, stream++);
      const auto m = mean_of(draws, [&] { return std::exp(-t * sample_positive_stable(alpha, rng)); });
      const double z = (m.value - std::exp(-std::pow(t, alpha))) / m.se;
      worst_laplace = std::max(worst_laplace, std::abs(z));
      c.expect(std::abs(z) < 5.0, fmt("Laplace alpha=%g t=%g z=%.2f", alpha, t, z));
    }
  }

  for (double alpha : {0.25, 0.5}) {
    const auto table = shared_w_table(alpha);
    for (double q : {-1.0, -2.0}) {
      RngStream rng(302, stream++);
      const auto m = mean_of(draws, [&] { return std::pow(sample_w(*table, rng), q); });
      const double z = (m.value - w_moment(alpha, q)) / m.se;
      worst_w = std::max(worst_w, std::abs(z));
      c.expect(std::abs(z) < 4.0, fmt("E W^%g alpha=%g z=%.2f", q, alpha, z));
    }
  }

  for (double pv : {0.5, 1.0, 1.5}) {
    const auto p = PNorm::finite_value(pv);
    const auto table = shared_w_table(pv / 2.0);
    const double g1 = boost::math::tgamma(1.0 / pv);
    for (double k : {2.0, 4.0}) {
      RngStream direct_rng(303, stream++);
      const auto direct = mean_of(draws, [&] { return std::pow(std::abs(sample_pgauss(p, direct_rng)), k); });
      const double zd = (direct.value - pgauss_abs_moment(p, k)) / direct.se;

      // Gaussian scale mixture (2W)^{-1/2} N has density proportional to exp(-|x|^p)
      RngStream mix_rng(304, stream++);
      const auto mixed = mean_of(draws, [&] {
        const double w = sample_w(*table, mix_rng);
        return std::pow(std::abs(mix_rng.normal()) / std::sqrt(2.0 * w), k);
      });
      const double zm = (mixed.value - boost::math::tgamma((k + 1.0) / pv) / g1) / mixed.se;
      worst_y = std::max({worst_y, std::abs(zd), std::abs(zm)});
      c.expect(std::abs(zd) < 4.0, fmt("direct p=%g k=%g z=%.2f", pv, k, zd));
      c.expect(std::abs(zm) < 4.0, fmt("mixture p=%g k=%g z=%.2f", pv, k, zm));
    }
  }
  c.note(fmt("max |z|: Laplace %.2f, W moments %.2f, p-Gaussian moments %.2f", worst_laplace, worst_w, worst_y));
  return c.outcome();
}

Outcome cross_formula() {
  Checker c;
  constexpr int bases = 100;
  constexpr std::int64_t m = 1'000'000;
  struct Case {
    double p;
    int n;
  };
  std::vector<Case> cases;
  for (double p : {0.5, 1.0, 1.5})
    for (int n : {2, 3}) cases.push_back({p, n});

  struct Row {
    double cf_gap = 0.0;
    double z = 0.0;
    double se = 0.0;
  };
  std::vector<Row> rows(cases.size() * bases);
  parallel_for(rows.size(), default_thread_count(), [&](std::size_t i) {
    const auto& cs = cases[i / bases];
    const auto p = PNorm::finite_value(cs.p);
    RngStream rng(401, i);
    const auto basis = sample_haar_basis(cs.n, 1, rng);
    const double oracle = oracle_ratio(p, basis).value;
    const auto det = det_formula_ratio(p, basis, m, rng);
    rows[i] = {std::abs(cf_density_ratio(p, basis).value - oracle), (det.value - oracle) / det.stderr_, det.stderr_};
  });

  for (std::size_t k = 0; k < cases.size(); ++k) {
    double gap = 0.0, zmax = 0.0, semax = 0.0;
    int over = 0;
    for (int j = 0; j < bases; ++j) {
      const auto& r = rows[k * bases + j];
      gap = std::max(gap, r.cf_gap);
      zmax = std::max(zmax, std::abs(r.z));
      semax = std::max(semax, r.se);
      if (std::abs(r.z) >= 3.0) ++over;
    }
    c.expect(gap < 1e-6, fmt("p=%g n=%d cf gap %.3g", cases[k].p, cases[k].n, gap));
    c.expect(over == 0, fmt("p=%g n=%d %d bases with |z|>=3 (max %.2f)", cases[k].p, cases[k].n, over, zmax));
    c.expect(semax <= 1e-3, fmt("p=%g n=%d max stderr %.3g", cases[k].p, cases[k].n, semax));
    c.note(fmt("p=%g n=%d: cf gap %.1e, max|z| %.2f, max se %.2e", cases[k].p, cases[k].n, gap, zmax, semax));
  }
  return c.outcome();
}

Outcome sum_representation() {
  Checker c;
  RngStream rng(501, 0);
  double worst = 0.0;
  for (auto [n, d] : {std::pair{6, 1}, {8, 2}, {9, 3}}) {
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> g(static_cast<std::size_t>(n) * d);
      for (auto& x : g) x = rng.normal();
      const double err = z_identity_check(d, n, g).relative_error();
      worst = std::max(worst, err);
      c.expect(err <= 1e-10, fmt("(n,d)=(%d,%d) rep %d rel %.3g", n, d, rep, err));
    }
  }
  c.note(fmt("max relative error %.3g over 600 matrices", worst));
  return c.outcome();
}

Outcome ustat_forms() {
  Checker c;
  RngStream rng(601, 0);
  for (int d = 1; d <= 3; ++d) {
    const auto r = ustat_check(d, 1'000'000, rng);
    c.expect(std::abs(r.z_eh()) < 4.0, fmt("d=%d E h z=%.2f", d, r.z_eh()));
    c.expect(std::abs(r.z_var()) < 4.0, fmt("d=%d Var z=%.2f", d, r.z_var()));
    c.expect(std::abs(r.z_cov()) < 4.0, fmt("d=%d Cov z=%.2f", d, r.z_cov()));
    c.note(fmt("d=%d z (E h, Var, Cov) = (%.2f, %.2f, %.2f), Var vs chi-square form z=%.2f", d, r.z_eh(), r.z_var(),
               r.z_cov(), r.z_var_chi2()));
  }
  double worst = 0.0;
  for (double pv : {0.25, 0.5, 1.0, 1.5, 1.9, 3.0, 6.0}) {
    for (int d = 1; d <= 3; ++d) {
      if (pv > 2.0 && d > 1) continue;
      const auto p = PNorm::finite_value(pv);
      const double assembled =
          assembled_sigma2(p, d, kernel_mean(d), pi1_variance_closed(d), pi1_covariance_closed(d));
      const double closed = clt_constants(p, d).sigma2;
      const double rel = std::abs(assembled / closed - 1.0);
      worst = std::max(worst, rel);
      c.expect(rel <= 1e-10, fmt("p=%g d=%d assembled %.15g vs %.15g", pv, d, assembled, closed));
    }
  }
  c.note(fmt("assembled variance max relative gap %.3g", worst));
  return c.outcome();
}

Outcome edgeworth_scaling() {
  Checker c;
  const std::vector<int> grid = {200, 400, 800, 1600};
  RngStream rng(701, 0);
  std::vector<double> g(static_cast<std::size_t>(grid.back()));
  for (auto& x : g) x = rng.normal();

  for (double pv : {0.5, 1.0, 1.5}) {
    const auto p = PNorm::finite_value(pv);
    std::vector<double> ns, gaps;
    for (int n : grid) {
      std::span<const double> head(g.data(), static_cast<std::size_t>(n));
      const auto basis = SubspaceBasis::from_rows(1, n, {head.begin(), head.end()});
      const double gap = std::abs(cf_density_ratio(p, basis).value - predicted_ratio_d1(p, head).predicted);
      ns.push_back(n);
      gaps.push_back(gap);
    }
    const double slope = loglog_slope(ns, gaps);
    c.expect(slope <= -1.2, fmt("p=%g slope %.3f", pv, slope));
    c.note(fmt("p=%g slope %.2f (gap %.2e at n=%d)", pv, slope, gaps.back(), grid.back()));
  }
  return c.outcome();
}

Outcome clt_d1() {
  Checker c;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Clt;
  cfg.p = PNorm::finite_value(1.0);
  cfg.d = 1;
  cfg.n = 1000;
  cfg.replicas = 2000;
  cfg.seed = 801;
  cfg.estimator = EstimateMethod::CfQuadrature;
  const auto rep = run_clt_experiment(cfg);
  const double sigma2 = 27.0 / (8.0 * std::numbers::pi);
  const double mean_tol = 4.0 * std::sqrt(sigma2 / cfg.replicas);
  c.expect(std::abs(rep.summary.mean) <= mean_tol, fmt("mean %.4f vs tolerance %.4f", rep.summary.mean, mean_tol));
  c.expect(std::abs(rep.summary.var / sigma2 - 1.0) <= 0.2, fmt("var %.4f vs %.4f", rep.summary.var, sigma2));
  c.expect(rep.summary.ks < 0.05, fmt("KS %.4f", rep.summary.ks));
  c.note(fmt("mean %.4f (tol %.4f), var %.4f vs %.4f, KS %.4f, W1 %.4f", rep.summary.mean, mean_tol, rep.summary.var,
             sigma2, rep.summary.ks, rep.summary.w1));
  return c.outcome();
}

Outcome clt_d2() {
  Checker c;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Clt;
  cfg.p = PNorm::finite_value(1.0);
  cfg.d = 2;
  cfg.n = 100;
  cfg.replicas = 500;
  cfg.seed = 901;
  cfg.estimator = EstimateMethod::DetFormula;
  cfg.inner_delta = 0.2;
  const auto rep = run_clt_experiment(cfg);
  const double sigma2 = clt_constants(cfg.p, 2).sigma2;
  // the inner Monte Carlo budget adds delta^2 to the replica variance
  const double floor = std::sqrt((sigma2 + cfg.inner_delta * cfg.inner_delta) / cfg.replicas);
  c.expect(std::abs(rep.summary.var / sigma2 - 1.0) <= 0.3, fmt("var %.4f vs %.4f", rep.summary.var, sigma2));
  c.expect(std::abs(rep.summary.mean) <= 4.0 * floor, fmt("mean %.4f vs 4 x %.4f", rep.summary.mean, floor));
  c.note(fmt("var %.4f vs %.4f (ratio %.3f), mean %.4f (floor %.4f), inner samples %lld", rep.summary.var, sigma2,
             rep.summary.var / sigma2, rep.summary.mean, floor, static_cast<long long>(rep.inner_samples)));
  return c.outcome();
}

Outcome mean_expansion() {
  Checker c;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MeanExpansion;
  cfg.p = PNorm::finite_value(1.0);
  cfg.d = 1;
  cfg.n_grid = {250, 500, 1000, 2000};
  cfg.n = cfg.n_grid.back();
  cfg.replicas = 5000;
  cfg.seed = 1001;
  const auto rep = run_mean_expansion(cfg);
  const auto& last = rep.rows.back();
  c.expect(std::abs(rep.b_z) < 4.0, fmt("b estimate %.4f vs %.4f (z %.2f)", last.b_estimate, rep.b, rep.b_z));
  c.expect(rep.exponent > 1.25, fmt("residual exponent %.3f", rep.exponent));
  c.note(fmt("b estimate %.4f +- %.4f vs %.4f (z %.2f), residual exponent %.2f (without control variate %.2f)",
             last.b_estimate, last.b_estimate_se, rep.b, rep.b_z, rep.exponent, rep.exponent_plain));
  return c.outcome();
}

Outcome cube_theorem() {
  Checker c;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Cube;
  cfg.p = PNorm::infinity();
  cfg.d = 1;
  cfg.n = 1000;
  cfg.replicas = 2000;
  cfg.seed = 1101;
  cfg.x = 0.0;
  const auto center = run_cube_experiment(cfg);
  const double target = cube_expansion(0.0).sigma2;
  c.expect(std::abs(center.summary.var / target - 1.0) <= 0.2, fmt("x=0 var %.4f vs %.4f", center.summary.var, target));

  cfg.x = std::sqrt(1.0 - std::sqrt(2.0 / 3.0));
  const auto root = run_cube_experiment(cfg);
  c.expect(root.summary.var < 0.05 * center.summary.var,
           fmt("root var %.4g vs 5%% of %.4f", root.summary.var, center.summary.var));
  c.note(fmt("x=0 var %.4f vs %.6f; x=%.6f var %.3g (%.2f%% of x=0)", center.summary.var, target, cfg.x,
             root.summary.var, 100.0 * root.summary.var / center.summary.var));
  return c.outcome();
}

Outcome intersection_body() {
  Checker c;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Intersection;
  cfg.p = PNorm::finite_value(1.0);
  cfg.d = 1;
  cfg.n = 1000;
  cfg.replicas = 2000;
  cfg.seed = 1201;
  const auto rep = run_intersection_experiment(cfg);
  const double target = 27.0 * std::numbers::pi / 8.0;
  c.expect(std::abs(rep.summary.var / target - 1.0) <= 0.2, fmt("var %.4f vs %.4f", rep.summary.var, target));
  c.note(fmt("var %.4f vs %.4f (ratio %.3f), mean %.4f", rep.summary.var, target, rep.summary.var / target,
             rep.summary.mean));
  return c.outcome();
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion criteria[] = {
    {1, "constants degenerate at p=2", degenerate_constants},
    {2, "constants at p=1, d=1", laplace_constants},
    {3, "sampler audits", sampler_audits},
    {4, "cross-formula agreement", cross_formula},
    {5, "sum representation identity", sum_representation},
    {6, "U-statistic closed forms", ustat_forms},
    {7, "Edgeworth scaling", edgeworth_scaling},
    {8, "CLT d=1 (characteristic function path)", clt_d1},
    {9, "CLT d=2 (determinant path)", clt_d2},
    {10, "mean expansion", mean_expansion},
    {11, "cube theorem", cube_theorem},
    {12, "intersection body", intersection_body},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    try {
      selected.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::fprintf(stderr, "usage: %s [criterion ...]\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& cr : criteria) selected.push_back(cr.id);

  int failed = 0;
  for (int id : selected) {
    const auto it = std::find_if(std::begin(criteria), std::end(criteria), [&](const Criterion& c) { return c.id == id; });
    if (it == std::end(criteria)) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s  [%.1f s]  %s\n", id, out.pass ? "PASS" : "FAIL", it->name, secs,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
