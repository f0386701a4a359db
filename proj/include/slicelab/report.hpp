#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "slicelab/estimators.hpp"
#include "slicelab/experiments.hpp"
#include "slicelab/specfun.hpp"
#include "slicelab/ustat.hpp"

namespace slicelab {

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Schema: config, predicted{a,b,sigma2}, summary{mean,var,skew,ks,w1},
/// optional replicas, diagnostics, wall_seconds.
nlohmann::json to_json(const ExperimentReport& rep, bool include_replicas);
nlohmann::json to_json(const MeanExpansionReport& rep);
nlohmann::json to_json(const VolumeEstimate& est);
nlohmann::json to_json(const CltConstants& c);
nlohmann::json to_json(const CubeExpansion& c);
nlohmann::json to_json(const IntersectionConstants& c);
nlohmann::json to_json(const UstatReport& rep);

/// Header `replica,raw_ratio,normalized_stat`, shortest round-trip decimals.
void write_samples_csv(std::ostream& out, const ExperimentReport& rep);

/// Shortest decimal string that round-trips, independent of locale.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace slicelab
