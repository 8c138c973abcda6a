#pragma once

// Experiment configuration: JSON on disk, with dotted-key overrides from the
// command line. Every field has a default so a config file only needs the
// keys it changes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "multiac/model.hpp"
#include "multiac/qsl.hpp"
#include "multiac/rwa.hpp"

namespace multiac::app {

inline constexpr int kSchemaVersion = 1;

struct ModelConfig {
  int levels = 3;
  double epsilon0 = 10.0;
  std::vector<double> deltas{1.0, 1.0};
};

struct GridConfig {
  double duration = 0.0;         // > 0 overrides duration_factor
  double duration_factor = 1.0;  // T / T_S^(K)
  int steps = 0;                 // 0: default_steps()
};

struct OptimizerConfig {
  double alpha0 = 1.0;
  double alpha_reference_eps0 = 0.0;
  int max_iters = 10000;
  double threshold = 1e-4;
  double monotonic_tolerance = 1e-9;
  int stall_window = 50;
  double tail_fraction = 0.2;
  int smoothing = 5;
};

struct GuessConfig {
  std::string family = "sudden-smooth";  // sudden-smooth | linear | sinusoidal
  double smoothing = 0.02;
  double slope = 0.01;
};

struct SweepConfig {
  std::string kind = "time";  // time | epsilon | K
  double T_min_factor = 0.7;
  double T_max_factor = 1.1;
  int grid_points = 21;
  std::string strategy = "full";  // full | bisection
  std::vector<double> epsilon_values;
  std::vector<int> K_values;
};

struct SpectrumConfig {
  double lambda_min = 0.0;  // both bounds 0: chosen from the model
  double lambda_max = 0.0;
  int points = 2001;
};

struct RwaConfig {
  double amplitude = -1.0;   // < 0: calibrate
  double omega = 0.0;        // 0: eps0
  double phase = 0.0;
  double phase2 = 0.0;
  double switch_time = 0.0;  // 0: default_switch_time()
  bool calibrate_phases = true;
  int scan_points = 121;
  int phase_points = 16;
};

struct ToleranceConfig {
  double hermitian = 1e-12;
  double unitary = 1e-10;
  double state_norm = 1e-10;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ModelConfig model;
  int target = 2;
  GridConfig grid;
  OptimizerConfig optimizer;
  GuessConfig guess;
  SweepConfig sweep;
  SpectrumConfig spectrum;
  RwaConfig rwa;
  ToleranceConfig tolerances;
  std::string output_dir = "out";
  int workers = 1;
  unsigned long long seed = 0;  // recorded for provenance; every path is deterministic
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Strict: unknown keys, wrong types and a schema_version other than
// kSchemaVersion raise ConfigError.
ExperimentConfig from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

// "a.b.c=value". value is read as JSON when it parses, otherwise as a string.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Range and consistency checks beyond types; throws ConfigError.
void validate(const ExperimentConfig& cfg);

SpectrumModel build_model(const ExperimentConfig& cfg);
double total_duration(const ExperimentConfig& cfg, const SpectrumModel& model);
GuessFactory build_guess(const ExperimentConfig& cfg);
QslSettings build_settings(const ExperimentConfig& cfg);

// output_dir, placed under $MULTIAC_OUTPUT_ROOT when relative and the
// variable is set.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

}  // namespace multiac::app
