#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pansim/engine.hpp"
#include "pansim/sac.hpp"

namespace pansim {

/// Everything a CLI run needs, loadable from one commented JSON file.
struct RunConfig {
  std::string preset = "town1k";
  SimConfig sim;
  std::string policy = "s040gi";
  int horizon_days = 120;
  std::vector<std::uint64_t> seeds;  // defaults to 0..29
  std::string out_dir = "results";
  int jobs = 0;  // 0 = available parallelism
  int action_period_days = 1;
  SacHyperparams sac;

  RunConfig();
  void validate() const;
};

RunConfig preset_run_config(const std::string& name);  // "town1k" or "town10k"

nlohmann::json to_json(const RunConfig& cfg);
// Overlays `j` onto `cfg`. Unknown keys and bad types throw ConfigError
// naming the offending path (e.g. "population.locations.grocery.count").
void apply_json(RunConfig& cfg, const nlohmann::json& j, const std::string& path = "");

// Same as apply_json but only for the SimConfig part (used by the service).
void apply_sim_json(SimConfig& sim, const nlohmann::json& j, const std::string& path = "");
nlohmann::json sim_to_json(const SimConfig& sim);

// Scalar leaves can be overridden by PANDEMIC_<PATH>, path segments joined
// with '_' and upper-cased, e.g. PANDEMIC_POPULATION_SPREAD_RATE_MEAN.
std::map<std::string, std::string> env_override_names(const RunConfig& cfg);
void apply_env_overrides(RunConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

// `source` is a preset name or a path to a config file. Env overrides are
// applied on top.
RunConfig load_run_config(const std::string& source,
                          const std::map<std::string, std::string>& env = {});

nlohmann::json parse_commented_json(const std::string& text);

}  // namespace pansim
