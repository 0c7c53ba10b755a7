#include "qcma/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "qcma/errors.hpp"
#include "qcma/group/explicit_group.hpp"

namespace qcma::harness {

using nlohmann::json;

const ParamSpec* ExperimentSchema::find(const std::string& key) const {
  for (const auto& p : params) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

const std::vector<ExperimentSchema>& experiment_schemas() {
  using V = std::vector<std::int64_t>;
  using S = std::vector<std::string>;
  static const std::vector<ExperimentSchema> schemas = {
      {"grover-advice",
       "honest advice witnesses through qcma_verify",
       200,
       {{"n", ParamType::kIntList, V{8}, "register qubits"},
        {"m", ParamType::kIntList, V{40}, "witness bits"}}},
      {"hybrid",
       "hybrid transcripts and the success-vs-budget sweep",
       50,
       {{"algorithm", ParamType::kString, std::string("verifier"), "verifier | grover"},
        {"n", ParamType::kIntList, V{6, 8}, "register qubits"},
        {"m", ParamType::kIntList, V{24}, "witness bits (verifier only)"},
        {"T", ParamType::kIntList, V{0, 1, 2, 3, 4, 6, 8, -1}, "iteration caps (-1 = full schedule) or Grover rounds"},
        {"scaling_trials", ParamType::kInt, std::int64_t{0}, "states per n for the T* fit (0 = skip)"}}},
      {"ensemble",
       "collision statistic of Haar and layered phase ensembles",
       2000,
       {{"n", ParamType::kIntList, V{8}, "qubits"},
        {"k", ParamType::kIntList, V{1, 2, 3}, "phase layers"},
        {"haar", ParamType::kBool, true, "include the Haar reference row"}}},
      {"randstate",
       "flagged Gaussian-amplitude state preparation",
       200,
       {{"n", ParamType::kIntList, V{6}, "qubits"},
        {"p", ParamType::kInt, std::int64_t{-1}, "precision polynomial value p(n) (-1 = n)"},
        {"max_attempts", ParamType::kInt, std::int64_t{10000}, "attempts per preparation"}}},
      {"gnm",
       "group non-membership verification over the catalog",
       200,
       {{"groups", ParamType::kStringList, S{"catalog"}, "group names (Z12, D5, S4, Z2xZ4, Q8) or catalog"},
        {"max_order", ParamType::kInt, std::int64_t{120}, "largest catalog order"},
        {"kernel_checks", ParamType::kInt, std::int64_t{10}, "trials per row that compare both kernel modes"},
        {"label_bits", ParamType::kInt, std::int64_t{0}, "label width (0 = smallest allowed)"}}},
      {"affine-check",
       "affine unitary families and random extensions",
       100,
       {{"families", ParamType::kStringList, S{"diagonal", "pauli", "phase-diagonal"}, "families to check"},
        {"dim", ParamType::kInt, std::int64_t{4}, "dimension of the phase-diagonal family"}}},
  };
  return schemas;
}

const ExperimentSchema& schema_for(const std::string& experiment) {
  for (const auto& s : experiment_schemas()) {
    if (s.id == experiment) return s;
  }
  throw ValidationError("unknown experiment '" + experiment + "'");
}

namespace {

template <typename T>
const T& typed(const std::map<std::string, ParamValue>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ValidationError("missing parameter '" + key + "'");
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  throw ValidationError("parameter '" + key + "' has the wrong type");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::int64_t parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ValidationError("not an integer: '" + raw + "'");
  return v;
}

double parse_real(const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + raw + "'");
  }
  if (used != s.size()) throw ValidationError("not a number: '" + raw + "'");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

json param_to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

ParamValue param_from_json(const ParamSpec& spec, const json& j) {
  const auto fail = [&] { throw ValidationError("parameter '" + spec.key + "' has the wrong type"); };
  switch (spec.type) {
    case ParamType::kInt:
      if (!j.is_number_integer()) fail();
      return j.get<std::int64_t>();
    case ParamType::kReal:
      if (!j.is_number()) fail();
      return j.get<double>();
    case ParamType::kBool:
      if (!j.is_boolean()) fail();
      return j.get<bool>();
    case ParamType::kString:
      if (!j.is_string()) fail();
      return j.get<std::string>();
    case ParamType::kIntList: {
      if (j.is_number_integer()) return std::vector<std::int64_t>{j.get<std::int64_t>()};
      if (!j.is_array()) fail();
      std::vector<std::int64_t> out;
      for (const auto& e : j) {
        if (!e.is_number_integer()) fail();
        out.push_back(e.get<std::int64_t>());
      }
      return out;
    }
    case ParamType::kStringList: {
      if (j.is_string()) return std::vector<std::string>{j.get<std::string>()};
      if (!j.is_array()) fail();
      std::vector<std::string> out;
      for (const auto& e : j) {
        if (!e.is_string()) fail();
        out.push_back(e.get<std::string>());
      }
      return out;
    }
  }
  fail();
  return {};
}

json canonical_json(const ExperimentConfig& c, bool with_runtime) {
  json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  if (with_runtime) {
    j["threads"] = c.threads;
    j["out"] = c.out;
  }
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = param_to_json(v);
  j["params"] = params;
  return j;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

std::int64_t ExperimentConfig::get_int(const std::string& key) const { return typed<std::int64_t>(params, key); }
double ExperimentConfig::get_real(const std::string& key) const { return typed<double>(params, key); }
bool ExperimentConfig::get_bool(const std::string& key) const { return typed<bool>(params, key); }
const std::string& ExperimentConfig::get_string(const std::string& key) const {
  return typed<std::string>(params, key);
}
std::vector<int> ExperimentConfig::get_ints(const std::string& key) const {
  const auto& v = typed<std::vector<std::int64_t>>(params, key);
  return {v.begin(), v.end()};
}
const std::vector<std::string>& ExperimentConfig::get_strings(const std::string& key) const {
  return typed<std::vector<std::string>>(params, key);
}

ExperimentConfig default_config(const std::string& experiment) {
  const ExperimentSchema& schema = schema_for(experiment);
  ExperimentConfig c;
  c.experiment = experiment;
  c.trials = schema.default_trials;
  for (const auto& p : schema.params) c.params[p.key] = p.default_value;
  return c;
}

ParamValue parse_param(ParamType type, const std::string& text) {
  switch (type) {
    case ParamType::kInt: return parse_int(text);
    case ParamType::kReal: return parse_real(text);
    case ParamType::kBool: {
      const std::string s = trim(text);
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw ValidationError("not a boolean: '" + text + "'");
    }
    case ParamType::kString: return trim(text);
    case ParamType::kIntList: {
      std::vector<std::int64_t> out;
      for (const auto& item : split(text)) out.push_back(parse_int(item));
      return out;
    }
    case ParamType::kStringList: return split(text);
  }
  throw ValidationError("unknown parameter type");
}

std::string format_param(const ParamValue& value) {
  struct {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return json(v).dump(); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(const std::vector<std::int64_t>& v) const {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
      return s;
    }
    std::string operator()(const std::vector<std::string>& v) const {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
      return s;
    }
  } visitor;
  return std::visit(visitor, value);
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override must look like key=value: '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = assignment.substr(eq + 1);
  if (key == "seed") {
    const auto v = parse_int(value);
    require(v >= 0, "seed must be nonnegative");
    config.seed = std::uint64_t(v);
  } else if (key == "trials") {
    config.trials = int(parse_int(value));
  } else if (key == "threads") {
    config.threads = int(parse_int(value));
  } else if (key == "out") {
    config.out = trim(value);
  } else {
    const ParamSpec* spec = schema_for(config.experiment).find(key);
    if (!spec) throw ValidationError("unknown key '" + key + "' for experiment " + config.experiment);
    config.params[key] = parse_param(spec->type, value);
  }
}

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  require(j.contains("experiment") && j["experiment"].is_string(), "config needs a string 'experiment'");
  ExperimentConfig c = default_config(j["experiment"].get<std::string>());
  const ExperimentSchema& schema = schema_for(c.experiment);
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") continue;
    if (key == "seed") {
      require(value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0),
              "seed must be a nonnegative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      require(value.is_number_integer(), "trials must be an integer");
      c.trials = value.get<int>();
    } else if (key == "threads") {
      require(value.is_number_integer(), "threads must be an integer");
      c.threads = value.get<int>();
    } else if (key == "out") {
      require(value.is_string(), "out must be a string");
      c.out = value.get<std::string>();
    } else if (key == "params") {
      require(value.is_object(), "params must be an object");
      for (const auto& [pk, pv] : value.items()) {
        const ParamSpec* spec = schema.find(pk);
        if (!spec) throw ValidationError("unknown key '" + pk + "' for experiment " + c.experiment);
        c.params[pk] = param_from_json(*spec, pv);
      }
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& config, int indent) {
  return canonical_json(config, true).dump(indent);
}

void validate(const ExperimentConfig& c) {
  const ExperimentSchema& schema = schema_for(c.experiment);
  for (const auto& p : schema.params) require(c.params.count(p.key) == 1, "missing parameter '" + p.key + "'");
  require(c.params.size() == schema.params.size(), "unknown parameter present");
  require(c.trials >= 1, "trials must be positive");
  require(c.threads >= 0, "threads must be nonnegative");

  auto nonempty = [&](const std::string& key) {
    require(!c.get_ints(key).empty(), "'" + key + "' must not be empty");
    return c.get_ints(key);
  };
  if (c.experiment == "grover-advice") {
    for (int n : nonempty("n")) {
      require(n >= 1 && n <= 12, "n must lie in [1, 12]");
      for (int m : nonempty("m")) require(m >= n + 2, "m must be at least n + 2 so that a witness fits");
    }
  } else if (c.experiment == "hybrid") {
    const std::string& alg = c.get_string("algorithm");
    require(alg == "verifier" || alg == "grover", "algorithm must be verifier or grover");
    for (int n : nonempty("n")) {
      require(n >= 1 && n <= 12, "n must lie in [1, 12]");
      if (alg == "verifier") {
        for (int m : nonempty("m")) require(m >= n + 2, "m must be at least n + 2 so that a witness fits");
      }
    }
    for (int t : nonempty("T")) require(t >= (alg == "grover" ? 0 : -1) && t <= 4096, "T out of range");
    require(c.get_int("scaling_trials") >= 0, "scaling_trials must be nonnegative");
    if (c.get_int("scaling_trials") > 0) require(c.get_ints("n").size() >= 2, "the T* fit needs two values of n");
  } else if (c.experiment == "ensemble") {
    for (int n : nonempty("n")) require(n >= 1 && n <= 14, "n must lie in [1, 14]");
    for (int k : c.get_ints("k")) require(k >= 0 && k <= 64, "k must lie in [0, 64]");
    require(c.trials >= 1000, "ensemble estimates need at least 1000 samples");
  } else if (c.experiment == "randstate") {
    require(c.get_int("p") >= -1, "p must be nonnegative (or -1 for p(n) = n)");
    for (int n : nonempty("n")) {
      require(n >= 1 && n <= 12, "n must lie in [1, 12]");
      const auto p = c.get_int("p") < 0 ? n : c.get_int("p");
      require((n + p) * (n + p) <= 1000, "precision (n + p)^2 must not exceed 1000 bits");
    }
    require(c.get_int("max_attempts") >= 1, "max_attempts must be positive");
  } else if (c.experiment == "gnm") {
    const auto& groups = c.get_strings("groups");
    require(!groups.empty(), "'groups' must not be empty");
    for (const auto& g : groups) {
      if (g != "catalog") group::ExplicitGroup::make(group::GroupDescriptor::from_name(g));
    }
    const auto max_order = c.get_int("max_order");
    require(max_order >= 2 && max_order <= group::kMaxGroupOrder, "max_order out of range");
    require(c.get_int("kernel_checks") >= 0, "kernel_checks must be nonnegative");
    const auto bits = c.get_int("label_bits");
    require(bits == 0 || (bits >= 2 && bits <= 62), "label_bits must be 0 or lie in [2, 62]");
  } else if (c.experiment == "affine-check") {
    const auto& families = c.get_strings("families");
    require(!families.empty(), "'families' must not be empty");
    for (const auto& f : families) {
      require(f == "diagonal" || f == "pauli" || f == "phase-diagonal", "unknown family '" + f + "'");
    }
    const auto dim = c.get_int("dim");
    require(dim >= 1 && dim <= 64, "dim must lie in [1, 64]");
  }
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qcma::harness
