#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tickwork/error.hpp"

namespace tickwork::cli {

using json = nlohmann::ordered_json;

/// Invalid scenario configuration; the message names the offending key.
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct RunSettings {
  double dt = 1e-3;
  double horizon = 100.0;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::size_t record_every = 1;
};

struct OutputSelection {
  bool trajectory = true;
  bool events = false;
  bool ledger = false;
  bool metrics = true;
};

struct ScenarioConfig {
  std::string model;
  json params;  // every parameter of the model, defaults filled in
  RunSettings run;
  OutputSelection outputs;
  std::string out_path = "out";
};

const std::vector<std::string>& model_names();

/// Closest candidate to `key`: a candidate that is a prefix of it (or the
/// reverse), otherwise the nearest by edit distance within 3. Empty if none.
std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates);

/// Parses and resolves a JSON config. Unknown keys, wrong types and unknown
/// models raise ConfigError.
ScenarioConfig parse_config(const json& j);
/// Builds the model's parameter structs and runs their invariant checks.
void validate_config(const ScenarioConfig& cfg);
/// Fully resolved config, suitable for re-running.
json to_json(const ScenarioConfig& cfg);

struct Preset {
  std::string name;
  std::string figure;
  json config;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

/// File name -> content, computed entirely in memory.
using Artifacts = std::map<std::string, std::string>;

Artifacts run_scenario(const ScenarioConfig& cfg);

/// Writes every artifact to `<name>.tmp` inside `dir`, then renames them all.
void write_artifacts(const Artifacts& files, const std::filesystem::path& dir);

/// %.17g formatting.
std::string format_number(double x);

}  // namespace tickwork::cli
