#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ristrack/metrics.hpp"
#include "ristrack/scenario.hpp"
#include "ristrack/scheduler.hpp"

namespace ristrack {

// Overrides applied on top of the scenario section (and by `sweep`).
struct Overrides {
  std::optional<double> dt_s;
  std::optional<int> steps_per_ris_update;
  std::optional<double> rice_ris;
  std::optional<double> orientation_error_std_deg;
  std::optional<int> ris_rows;
  std::optional<int> ris_cols;
  std::optional<int> episode_steps;
};

struct SweepSpec {
  std::string parameter;  // dt_s | steps_per_ris_update | ris_period_s | rice_ris | orientation_error_std_deg
  std::vector<double> values;
};

struct MapSpec {
  GridSpec grid;
  int ris = -1;  // -1: sum over every RIS
};

struct CampaignConfig {
  std::string scenario_path;
  std::vector<Policy> policies{Policy::kBetaOptAo, Policy::kOptAo, Policy::kFocus};
  int runs = 10;
  std::uint64_t seed = 1;
  std::string out = "out";
  int parallel = 1;
  Overrides overrides;
  bool record_rate = true;
  bool record_peb = true;
  bool write_traces = true;
  int cdf_points = 201;
  int rate_bins = 40;
  std::optional<MapSpec> map;
  std::optional<SweepSpec> sweep;
};

struct LoadedConfig {
  Scenario scenario;
  CampaignConfig campaign;
  nlohmann::json resolved;  // every value after defaults and overrides
};

// Reads a JSON file (or a campaign manifest, which embeds its resolved
// config under "config"). Throws kIo, kParse (with line/column) or
// kInvalidConfig listing every problem found.
LoadedConfig load_config(const std::string& path);
LoadedConfig parse_config(const std::string& text, const std::string& origin = "<string>");
LoadedConfig from_json(const nlohmann::json& doc);

void apply_overrides(Scenario& scenario, const Overrides& overrides);

// Fully resolved document for a scenario + campaign (round-trips through from_json).
nlohmann::json to_json(const Scenario& scenario, const CampaignConfig& campaign);

// Recomputes `resolved` after the scenario or campaign was edited in place.
void refresh_resolved(LoadedConfig& config);

// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved);

}  // namespace ristrack
