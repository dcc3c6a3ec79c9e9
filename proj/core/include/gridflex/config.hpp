#pragma once

// Scenario configuration: a versioned `key = value` text file.
//
//   schema_version = 1
//   strategy = aggregated            # or baseline-rtp
//   start = 2025-01-01T00:00:00+01:00
//   days = 365
//   seed = 2025
//   spot_csv = spot.csv              # relative paths resolve against the
//   baseload_csv = baseload.csv      # directory holding the config file
//   intensity_csv = intensity.csv
//   fleet_csv = fleet.csv
//
// Every other key is optional; see README for the full list and defaults.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gridflex/fleet.hpp"
#include "gridflex/market_data.hpp"
#include "gridflex/time.hpp"

namespace gridflex {

enum class Strategy { baseline_rtp, aggregated };

const char* to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

inline constexpr int kSchemaVersion = 1;

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  Strategy strategy = Strategy::aggregated;
  TimePoint start = parse_timestamp("2025-01-01T00:00:00+01:00");
  int days = 365;
  std::uint64_t seed = 2025;
  int num_households = 126;
  double ev_adoption = 1.0;
  double transformer_capacity_kw = 400.0;
  int tick_minutes = 1;
  double soc_target = 1.0;
  bool revenue_includes_baseload = false;

  std::filesystem::path spot_csv;
  std::filesystem::path baseload_csv;
  std::filesystem::path intensity_csv;
  std::filesystem::path fleet_csv;

  hours utc_offset{1};
  SeasonRule season;
  // Defaults: Trefor Tariff Model 3.0, C-customers.
  std::vector<TariffBand> winter_bands{
      {0, 6, 9.04}, {6, 17, 27.10}, {17, 21, 81.31}, {21, 24, 27.10}};
  std::vector<TariffBand> summer_bands{
      {0, 6, 9.04}, {6, 17, 13.55}, {17, 21, 35.24}, {21, 24, 13.55}};

  BehaviorModel behavior;

  TimePoint end() const { return start + kMinutesPerDay * days; }
  TariffSchedule tariff() const;
  // Throws ConfigError describing the first invalid field.
  void validate() const;
};

// Parses config text; relative data paths resolve against `base_dir`.
ScenarioConfig parse_scenario_config(std::string_view text,
                                     const std::filesystem::path& base_dir);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// Inverse of parse_scenario_config, used for manifests and tests.
std::string format_scenario_config(const ScenarioConfig& config);

}  // namespace gridflex
