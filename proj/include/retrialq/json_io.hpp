#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "retrialq/config.hpp"
#include "retrialq/regen.hpp"
#include "retrialq/simulation.hpp"
#include "retrialq/stability.hpp"

namespace retrialq {

using json = nlohmann::json;

// Shortest round-trippable decimal representation; identical input bits
// always print identical bytes, which is what keeps CSV reruns identical.
std::string format_double(double x);

// Strict parsers: unknown keys are rejected with ConfigError.
DistributionSpec distribution_from_json(const json& j);
json distribution_to_json(const DistributionSpec& spec);

SystemConfig system_config_from_json(const json& j);
json system_config_to_json(const SystemConfig& config);

StopRule stop_rule_from_json(const json& j);

json ratio_estimate_to_json(const RatioEstimate& est);
json stability_report_to_json(const StabilityReport& rep);
json path_stats_to_json(const SimOutput& out);

// CycleRecord CSV: one comment line with tool version and seed, a header
// row, then one row per cycle.
void write_cycles_csv(std::ostream& os, const std::vector<CycleRecord>& cycles,
                      std::uint64_t seed);
std::vector<CycleRecord> read_cycles_csv(std::istream& is);

// Throws ConfigError when `j` is not an object or contains a key outside
// `allowed`.
void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context);

} // namespace retrialq
