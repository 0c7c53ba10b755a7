#pragma once

// Dispatch from an experiment config to the owning module, with the
// acceptance assertions each experiment can check on its own rows.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcma/harness/config.hpp"
#include "qcma/harness/report.hpp"

namespace qcma::harness {

struct AssertionResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunRecord {
  ExperimentConfig config;
  std::uint64_t config_hash = 0;
  std::vector<Table> tables;
  std::vector<AssertionResult> assertions;
  double wall_seconds = 0.0;
  std::string version = kLibraryVersion;

  bool all_pass() const;
  /// Config, hash (hex), version, wall time, assertions and every table.
  std::string to_json() const;
};

/// Validates, runs and evaluates assertions. Rows come out sorted by cell key
/// and do not depend on config.threads.
RunRecord run(const ExperimentConfig& config);

/// Writes <schema>.csv for every table and <experiment>.json into `dir`.
/// Returns the paths written.
std::vector<std::filesystem::path> write_record(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace qcma::harness
