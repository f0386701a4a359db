#include "slicelab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace slicelab {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  j["p"] = cfg.p.to_string();
  j["d"] = cfg.d;
  if (cfg.kind == ExperimentKind::MeanExpansion) {
    j["n_grid"] = cfg.n_grid;
  } else {
    j["n"] = cfg.n;
  }
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  j["estimator"] = to_string(cfg.estimator);
  if (cfg.estimator == EstimateMethod::DetFormula) {
    j["inner_delta"] = cfg.inner_delta;
    j["inner_constant"] = cfg.inner_constant;
  }
  if (cfg.kind == ExperimentKind::Cube) j["x"] = cfg.x;
  return j;
}

json to_json(const ExperimentReport& rep, bool include_replicas) {
  json j;
  j["config"] = to_json(rep.config);
  j["predicted"] = {{"a", rep.a}, {"b", rep.b}, {"sigma2", rep.sigma2}};
  j["summary"] = {{"mean", rep.summary.mean},
                  {"var", rep.summary.var},
                  {"skew", rep.summary.skew},
                  {"ks", rep.summary.ks},
                  {"w1", rep.summary.w1}};
  j["degenerate"] = rep.degenerate;
  if (rep.inner_samples > 0) j["inner_samples"] = rep.inner_samples;
  json diag = json::object();
  for (const auto& [k, v] : rep.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  if (include_replicas) {
    json reps = json::array();
    for (std::size_t i = 0; i < rep.ratio.size(); ++i) {
      reps.push_back({{"replica", i}, {"raw_ratio", rep.ratio[i]}, {"normalized_stat", rep.stat[i]}});
    }
    j["replicas"] = reps;
  }
  j["wall_seconds"] = rep.wall_seconds;
  return j;
}

json to_json(const MeanExpansionReport& rep) {
  json j;
  j["config"] = to_json(rep.config);
  j["predicted"] = {{"a", rep.a}, {"b", rep.b}, {"sigma2", rep.sigma2}};
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"n", r.n},
                    {"mean", r.mean},
                    {"mean_se", r.mean_se},
                    {"cv_mean", r.cv_mean},
                    {"cv_se", r.cv_se},
                    {"predicted", r.predicted},
                    {"residual", r.residual},
                    {"cv_residual", r.cv_residual},
                    {"residual_n32", r.cv_residual * std::pow(static_cast<double>(r.n), 1.5)},
                    {"floor", r.floor},
                    {"b_estimate", r.b_estimate},
                    {"b_estimate_se", r.b_estimate_se}});
  }
  j["rows"] = rows;
  j["exponent"] = rep.exponent;
  j["exponent_plain"] = rep.exponent_plain;
  j["b_z"] = rep.b_z;
  j["wall_seconds"] = rep.wall_seconds;
  return j;
}

json to_json(const VolumeEstimate& est) {
  return {{"value", est.value}, {"stderr", est.stderr_}, {"samples", est.samples}, {"method", to_string(est.method)}};
}

json to_json(const CltConstants& c) {
  return {{"a", c.a}, {"b", c.b}, {"sigma2", c.sigma2}, {"degenerate", c.degenerate}};
}

json to_json(const CubeExpansion& c) { return {{"x", c.x}, {"a", c.a}, {"b", c.b}, {"sigma2", c.sigma2}}; }

json to_json(const IntersectionConstants& c) {
  return {{"center", c.center}, {"shift", c.shift}, {"variance", c.variance}};
}

json to_json(const UstatReport& rep) {
  auto entry = [](const McValue& v, double target, double z) {
    return json{{"estimate", v.value}, {"stderr", v.stderr_}, {"target", target}, {"z", z}};
  };
  json j;
  j["d"] = rep.d;
  j["samples"] = rep.samples;
  j["eh"] = entry(rep.eh, rep.eh_target, rep.z_eh());
  j["var_pi1"] = entry(rep.var_pi1, rep.var_target, rep.z_var());
  j["var_pi1"]["chi2_target"] = rep.var_chi2;
  j["var_pi1"]["chi2_z"] = rep.z_var_chi2();
  j["cov"] = entry(rep.cov, rep.cov_target, rep.z_cov());
  return j;
}

void write_samples_csv(std::ostream& out, const ExperimentReport& rep) {
  out << "replica,raw_ratio,normalized_stat\n";
  for (std::size_t i = 0; i < rep.ratio.size(); ++i) {
    out << i << ',' << format_double(rep.ratio[i]) << ',' << format_double(rep.stat[i]) << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace slicelab
