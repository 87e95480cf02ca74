#pragma once

#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "psloc/estimators.hpp"
#include "psloc/harness.hpp"
#include "psloc/pp_sim.hpp"

namespace psloc {

/// {"n": ..., "T": ..., "events": [[...], ...]}, plus "retention" when it is
/// not 1.
nlohmann::json observation_to_json(const ObservationSet& obs);
ObservationSet observation_from_json(const nlohmann::json& doc);
ObservationSet read_observation(const std::filesystem::path& path);
void write_observation(const std::filesystem::path& path, const ObservationSet& obs);

nlohmann::json estimate_to_json(const EstimationResult& result);

/// Report document with "schema": 1. Wall-clock numbers go to a separate
/// "timing" section that is left out when `include_timing` is false, so two
/// runs can be compared byte for byte.
nlohmann::json report_to_json(const ExperimentReport& report, const ExperimentConfig& config,
                              bool include_timing = true);

/// One row per replication and position method:
/// rep,method,n,x,y,status,seed
void write_runs_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace psloc
