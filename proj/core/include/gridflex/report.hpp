#pragma once

// Output files of a simulation run and the KPI file reader used by `compare`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridflex/config.hpp"
#include "gridflex/engine.hpp"
#include "gridflex/kpi.hpp"

namespace gridflex {

void write_load_csv(std::ostream& out, const SimulationResult& result);
void write_sessions_csv(std::ostream& out, const SimulationResult& result);
void write_compensation_csv(std::ostream& out, const SimulationResult& result);
void write_event_log(std::ostream& out, const SimulationResult& result);

// One header row and one value row, in report column order. Values are
// written with round-trip precision.
void write_kpi_csv(std::ostream& out, const KpiReport& report);
// DataError naming the file and row on a malformed or incomplete file.
KpiReport read_kpi_csv(const std::filesystem::path& path);

std::string format_kpi_table(const KpiReport& report);
// Rows `baseline`, `other` and `percent_difference`.
void write_comparison_csv(std::ostream& out, const KpiReport& baseline,
                          const KpiReport& other, const KpiDifference& difference);
std::string format_comparison(const KpiReport& baseline, const KpiReport& other,
                              const KpiDifference& difference);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

struct ManifestEntry {
  std::string key;
  std::string value;
};

struct RunManifest {
  std::string tool_version;
  std::string command_line;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string strategy;
  std::string start;
  int days = 0;
  std::vector<ManifestEntry> inputs;   // data file -> checksum
  std::vector<ManifestEntry> outputs;  // output file -> checksum
  std::vector<std::string> warnings;
};
void write_manifest(std::ostream& out, const RunManifest& manifest);
// DataError naming the file and row on a malformed manifest.
RunManifest read_manifest(const std::filesystem::path& path);

// Manifest of a run that has not produced outputs yet.
RunManifest make_manifest(const ScenarioConfig& config,
                          const std::filesystem::path& config_path,
                          const std::filesystem::path& out_dir,
                          const std::vector<std::string>& warnings,
                          const std::string& command_line);

inline constexpr const char* kManifestName = "manifest.txt";
void write_manifest_file(const std::filesystem::path& dir, const RunManifest& manifest);

// Writes load.csv, sessions.csv, compensation.csv, kpi.csv, kpi.txt and
// events.log
// into `dir`, then rewrites the manifest with their checksums.
void write_run_outputs(const std::filesystem::path& dir,
                       const SimulationResult& result, const KpiReport& report,
                       RunManifest& manifest);

}  // namespace gridflex
