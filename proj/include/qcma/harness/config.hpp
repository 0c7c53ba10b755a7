#pragma once

// Experiment configuration: a typed parameter map checked against a fixed
// schema per experiment, JSON round trip, key=value overrides and a stable hash.

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qcma::harness {

enum class ParamType { kInt, kReal, kBool, kString, kIntList, kStringList };

using ParamValue =
    std::variant<std::int64_t, double, bool, std::string, std::vector<std::int64_t>, std::vector<std::string>>;

struct ParamSpec {
  std::string key;
  ParamType type;
  ParamValue default_value;
  std::string help;
};

struct ExperimentSchema {
  std::string id;
  std::string summary;
  int default_trials = 1;
  std::vector<ParamSpec> params;

  const ParamSpec* find(const std::string& key) const;
};

/// grover-advice, hybrid, ensemble, randstate, gnm, affine-check.
const std::vector<ExperimentSchema>& experiment_schemas();
const ExperimentSchema& schema_for(const std::string& experiment);

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, ParamValue> params;
  std::uint64_t seed = 1;
  int trials = 0;
  /// Worker threads; never changes results, so it is left out of the hash.
  int threads = 1;
  std::string out = "results";

  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;
  const std::vector<std::string>& get_strings(const std::string& key) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Schema defaults for every key; trials from the schema.
ExperimentConfig default_config(const std::string& experiment);

/// Parses `text` as a value of `type`. Lists are comma separated.
ParamValue parse_param(ParamType type, const std::string& text);
std::string format_param(const ParamValue& value);

/// "key=value" for a schema key, or one of seed / trials / threads / out.
void apply_override(ExperimentConfig& config, const std::string& assignment);

/// Object with "experiment", "seed", "trials", "threads", "out" and
/// "params"; unknown keys and type mismatches throw ValidationError. Missing
/// parameters take their defaults.
ExperimentConfig parse_config_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config, int indent = 2);

/// Range checks on the resolved values; throws ValidationError.
void validate(const ExperimentConfig& config);

/// FNV-1a over the canonical JSON without threads and out.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace qcma::harness
