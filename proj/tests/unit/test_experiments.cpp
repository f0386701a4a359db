#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "slicelab/errors.hpp"
#include "slicelab/experiments.hpp"
#include "slicelab/report.hpp"
#include "slicelab/rng.hpp"
#include "slicelab/stats.hpp"

using namespace slicelab;
using doctest::Approx;

namespace {

ExperimentConfig small_clt(int threads) {
  ExperimentConfig cfg;
  cfg.p = PNorm::finite_value(1.0);
  cfg.n = 40;
  cfg.replicas = 24;
  cfg.seed = 9;
  cfg.threads = threads;
  return cfg;
}

std::string stable_dump(nlohmann::json j) {
  j.erase("wall_seconds");
  return j.dump();
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("summary") {
    const std::vector<double> xs = {1, 2, 3, 4, 10};
    const auto s = summarize(xs);
    CHECK(s.mean == Approx(4.0));
    CHECK(s.var == Approx(12.5));
    CHECK(s.skew > 0.0);
  }

  TEST_CASE("normal distribution helpers") {
    CHECK(normal_cdf(0.0) == Approx(0.5));
    CHECK(normal_quantile(normal_cdf(1.3)) == Approx(1.3).epsilon(1e-12));
  }

  TEST_CASE("Wasserstein distance") {
    const std::vector<double> flat(50, 0.7);
    CHECK(wasserstein1(flat, 0.7, 0.0) == 0.0);
    for (int r : {100, 400, 2000}) {
      std::vector<double> q(r);
      for (int i = 0; i < r; ++i) q[i] = normal_quantile((i + 0.5) / r);
      CHECK(wasserstein1(q, 0.0, 1.0) < 2.0 / r);
    }
    RngStream rng(71, 0);
    std::vector<double> shifted(20000);
    for (auto& v : shifted) v = rng.normal() + 0.8;
    CHECK(wasserstein1(shifted, 0.0, 1.0) == Approx(0.8).epsilon(0.03));
  }

  TEST_CASE("KS distance on Gaussian samples") {
    RngStream rng(72, 0);
    const int r = 500;
    const double sigma = 1.3;
    int below = 0;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> xs(r);
      for (auto& v : xs) v = sigma * rng.normal();
      if (ks_normal(xs, 0.0, sigma) < 1.63 / std::sqrt(r)) ++below;
    }
    CHECK(below >= 95);
    const std::vector<double> point(10, 0.0);
    CHECK(ks_normal(point, 0.0, 0.0) == 0.0);
  }

  TEST_CASE("two-sample KS and rank correlation") {
    const std::vector<double> a = {1, 2, 3, 4}, b = {5, 6, 7, 8};
    CHECK(ks_two_sample(a, b) == Approx(1.0));
    CHECK(ks_two_sample(a, a) == 0.0);
    CHECK(ks_pvalue(0.0, 100) == Approx(1.0));
    const std::vector<double> y = {10, 20, 25, 100};
    CHECK(spearman(a, y) == Approx(1.0));
    const std::vector<double> x = {1, 10, 100, 1000}, p = {2, 20, 200, 2000};
    CHECK(fit_line(a, b).slope == Approx(1.0));
    CHECK(loglog_slope(x, p) == Approx(1.0));
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("configuration validation") {
    ExperimentConfig cfg;
    cfg.p = PNorm::finite_value(3.0);
    cfg.d = 2;
    cfg.n = 20;
    CHECK_THROWS_AS(cfg.validate(), RegimeError);
    cfg.d = 1;
    cfg.estimator = EstimateMethod::DetFormula;
    CHECK_THROWS_AS(cfg.validate(), RegimeError);
    cfg.estimator = EstimateMethod::CfQuadrature;
    CHECK_NOTHROW(cfg.validate());
    cfg.kind = ExperimentKind::MeanExpansion;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.kind = ExperimentKind::Cube;
    cfg.d = 2;
    CHECK_THROWS_AS(cfg.validate(), RegimeError);
    CHECK(parse_experiment_kind("cube") == ExperimentKind::Cube);
    CHECK_THROWS(parse_experiment_kind("nope"));
  }

  TEST_CASE("parallel_for reports the failing index") {
    std::vector<int> hits(50, 0);
    parallel_for(50, 3, [&](std::size_t i) { hits[i] = 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
    try {
      parallel_for(20, 1, [](std::size_t i) {
        if (i == 7) throw std::runtime_error("boom");
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "replica 7: boom");
    }
  }

  TEST_CASE("reports do not depend on the worker count") {
    const auto one = run_clt_experiment(small_clt(1));
    const auto three = run_clt_experiment(small_clt(3));
    CHECK(stable_dump(to_json(one, true)) == stable_dump(to_json(three, true)));
    std::ostringstream a, b;
    write_samples_csv(a, one);
    write_samples_csv(b, three);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("replica,raw_ratio,normalized_stat\n", 0) == 0);
  }

  TEST_CASE("determinant path reproducibility") {
    auto cfg = small_clt(1);
    cfg.estimator = EstimateMethod::DetFormula;
    cfg.inner_samples = 2000;
    cfg.d = 2;
    cfg.replicas = 6;
    const auto one = run_clt_experiment(cfg);
    cfg.threads = 2;
    const auto two = run_clt_experiment(cfg);
    CHECK(stable_dump(to_json(one, true)) == stable_dump(to_json(two, true)));
  }

  TEST_CASE("p = 2 is degenerate") {
    auto cfg = small_clt(1);
    cfg.p = PNorm::finite_value(2.0);
    const auto rep = run_clt_experiment(cfg);
    CHECK(rep.degenerate);
    for (double r : rep.ratio) CHECK(r == 1.0);
    for (double s : rep.stat) CHECK(s == 0.0);
    CHECK(rep.summary.ks == 0.0);

    cfg.kind = ExperimentKind::MeanExpansion;
    cfg.n_grid = {10, 20, 40};
    const auto mean = run_mean_expansion(cfg);
    for (const auto& row : mean.rows) CHECK(row.residual == 0.0);

    const auto inter = run_intersection_experiment(cfg);
    for (double s : inter.stat) CHECK(s == 0.0);
  }

  TEST_CASE("intersection experiment: pathwise delta identity") {
    auto cfg = small_clt(1);
    cfg.n = 200;
    const auto rep = run_intersection_experiment(cfg);
    const auto find = [&](const std::string& key) {
      for (const auto& [k, v] : rep.diagnostics)
        if (k == key) return v;
      return -1.0;
    };
    CHECK(find("delta_identity_max_gap") >= 0.0);
    CHECK(find("delta_identity_max_gap") < 1e-8);
    CHECK(find("delta_remainder_max") < 1.0);
  }

  TEST_CASE("cube experiment tracks the predicted centre") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Cube;
    cfg.n = 300;
    cfg.replicas = 200;
    cfg.seed = 4;
    cfg.x = 0.5;
    const auto rep = run_cube_experiment(cfg);
    CHECK(std::abs(rep.summary.mean) < 5.0 * std::sqrt(rep.sigma2 / cfg.replicas) + 0.1);
  }

  TEST_CASE("KS distance decreases along the n grid") {
    std::vector<double> ns, ks;
    for (int n : {8, 16, 32, 64, 128, 256, 512}) {
      ExperimentConfig cfg;
      cfg.p = PNorm::finite_value(1.0);
      cfg.n = n;
      cfg.replicas = 1000;
      cfg.seed = 33;
      ns.push_back(n);
      ks.push_back(run_clt_experiment(cfg).summary.ks);
    }
    CAPTURE(ks);
    CHECK(spearman(ns, ks) < -0.7);
  }

  TEST_CASE("JSON schema") {
    const auto rep = run_clt_experiment(small_clt(1));
    const auto j = to_json(rep, false);
    for (const char* key : {"config", "predicted", "summary", "diagnostics", "wall_seconds"}) CHECK(j.contains(key));
    CHECK_FALSE(j.contains("replicas"));
    for (const char* key : {"mean", "var", "skew", "ks", "w1"}) CHECK(j["summary"].contains(key));
    CHECK(j["config"]["p"] == "1");
  }

  TEST_CASE("decimal formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9})
      CHECK(std::stod(format_double(v)) == v);
  }
}
