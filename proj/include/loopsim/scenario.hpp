#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopsim/engine.hpp"
#include "loopsim/games.hpp"

namespace loopsim {

struct OutputSpec {
  std::string trajectory = "trajectory.jsonl";
  std::string summary = "summary.csv";
  std::string metrics = "metrics.csv";
  std::string equilibrium = "equilibrium.csv";
  std::string run_id = "run";
};

// A validated scenario file: the runnable Scenario plus the optional game
// section and output naming. `canonical` is the normalized JSON (defaults
// materialized, keys sorted) whose parse is a fixed point.
struct ScenarioConfig {
  nlohmann::json canonical;
  Scenario scenario;
  OutputSpec outputs;
  std::optional<games::GameSpec> game;
  games::Profile game_init;
  int game_max_rounds = 100;
};

ScenarioConfig parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioConfig& config);

// One runnable cell of a sweep: a self-contained config plus its directory name.
struct SweepCell {
  std::string dir_name;
  std::string config_text;
};

struct SweepSpec {
  nlohmann::json base;
  std::vector<std::string> paths;          // parameter paths, e.g. users[0].params.alpha
  std::vector<std::vector<nlohmann::json>> values;  // one value list per path
  std::vector<uint64_t> seeds;
};

// `dir` resolves a relative base path ("base": "cfg.json") against the spec file's directory.
SweepSpec parse_sweep(const std::string& text, const std::string& dir);
std::vector<SweepCell> expand_sweep(const SweepSpec& spec, long budget);

// Sets `path` (dot/[index] syntax) inside a raw config document.
void set_config_path(nlohmann::json& config, const std::string& path, const nlohmann::json& value);

}  // namespace loopsim
