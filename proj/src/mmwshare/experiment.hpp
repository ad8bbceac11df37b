#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mmwshare/harness.hpp"

namespace mmwshare {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Verb { kPrivacySweep, kNlosSweep, kSingleRun, kFootprintExport, kOracleCheck };

std::string_view verb_name(Verb verb);
Verb parse_verb(std::string_view name);

/// Comment block written at the top of every CSV: tool version, verb, seed
/// and the fully resolved config, one "# key: value" line per key.
void write_provenance(std::ostream& out, Verb verb, const ScenarioConfig& config);

void write_privacy_csv(std::ostream& out, const ScenarioConfig& config, const PrivacySweep& sweep);
void write_nlos_csv(std::ostream& out, const ScenarioConfig& config, std::span<const NlosSweepRow> rows);
void write_single_run_csv(std::ostream& out, const ScenarioConfig& config, const RunMetrics& metrics);

struct OracleInstance {
  double exhaustive = 0.0;
  std::vector<double> successive;  // ideal_sinr, ideal_slnr, low_overhead, robust K=0, uncoordinated
};

struct OracleCheck {
  std::vector<OracleInstance> instances;
  std::size_t violations = 0;
};

inline constexpr std::size_t kOracleInstances = 100;

/// Frame sum-rates on tiny instances (U = N_s = 2 per BS) drawn from the
/// config's geometry; counts instances where some successive policy beats
/// the exhaustive schedule.
OracleCheck oracle_check(const ScenarioConfig& config, const ScenarioContext& context,
                         std::size_t instances = kOracleInstances);

struct ExperimentOutcome {
  bool passed = true;
  std::vector<std::string> files;  // relative to the output directory
  std::string summary;
};

/// Runs one verb and writes its CSV files plus manifest.json into `out_dir`
/// (created if missing). CSV bytes depend only on the config.
ExperimentOutcome run_experiment(Verb verb, const ScenarioConfig& config, const std::filesystem::path& out_dir,
                                 std::size_t workers);

}  // namespace mmwshare
