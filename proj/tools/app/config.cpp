#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "multiac/errors.hpp"
#include "multiac/fields.hpp"

namespace multiac::app {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelConfig, levels, epsilon0, deltas)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GridConfig, duration, duration_factor, steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OptimizerConfig, alpha0, alpha_reference_eps0,
                                                max_iters, threshold, monotonic_tolerance,
                                                stall_window, tail_fraction, smoothing)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GuessConfig, family, smoothing, slope)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SweepConfig, kind, T_min_factor, T_max_factor,
                                                grid_points, strategy, epsilon_values, K_values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SpectrumConfig, lambda_min, lambda_max, points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RwaConfig, amplitude, omega, phase, phase2,
                                                switch_time, calibrate_phases, scan_points,
                                                phase_points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ToleranceConfig, hermitian, unitary, state_norm)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExperimentConfig, schema_version, model, target,
                                                grid, optimizer, guess, sweep, spectrum, rwa,
                                                tolerances, output_dir, workers, seed)

namespace {

// Every key of `given` must exist in `known` (the default config's tree).
void check_keys(const nlohmann::json& given, const nlohmann::json& known, const std::string& path) {
  if (!given.is_object()) return;
  if (!known.is_object()) throw ConfigError("config: '" + path + "' must not be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string sub = path.empty() ? key : path + "." + key;
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + sub + "'");
    check_keys(value, known.at(key), sub);
  }
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = cfg;
  return j;
}

ExperimentConfig from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(j, to_json(ExperimentConfig{}), "");
  const int version = j.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion) {
    throw ConfigError("config: schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json j = to_json(cfg);
  nlohmann::json* node = &j;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("override: unknown key '" + key + "'");
    }
    node = &(*node)[part];
  }
  *node = value;
  cfg = from_json(j);
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  const ModelConfig& m = cfg.model;
  if (m.levels < 2 || m.levels > kMaxLevels) fail("model.levels must lie in 2..16");
  if (static_cast<int>(m.deltas.size()) != m.levels - 1) {
    fail("model.deltas needs levels - 1 entries");
  }
  if (cfg.target < 1 || cfg.target > m.levels - 1) fail("target must lie in 1..levels-1");
  if (!(cfg.grid.duration >= 0.0)) fail("grid.duration must be >= 0");
  if (!(cfg.grid.duration_factor > 0.0)) fail("grid.duration_factor must be > 0");
  if (cfg.grid.steps != 0 && cfg.grid.steps < 2) fail("grid.steps must be 0 or >= 2");
  const OptimizerConfig& o = cfg.optimizer;
  if (!(o.alpha0 > 0.0)) fail("optimizer.alpha0 must be > 0");
  if (!(o.alpha_reference_eps0 >= 0.0)) fail("optimizer.alpha_reference_eps0 must be >= 0");
  if (o.max_iters < 0) fail("optimizer.max_iters must be >= 0");
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) fail("optimizer.threshold must lie in (0, 1)");
  if (o.stall_window < 1) fail("optimizer.stall_window must be >= 1");
  if (!(o.tail_fraction > 0.0 && o.tail_fraction <= 1.0 / 3.0)) {
    fail("optimizer.tail_fraction must lie in (0, 1/3]");
  }
  if (o.smoothing < 1) fail("optimizer.smoothing must be >= 1");
  const GuessConfig& g = cfg.guess;
  if (g.family != "sudden-smooth" && g.family != "linear" && g.family != "sinusoidal") {
    fail("guess.family must be sudden-smooth, linear or sinusoidal");
  }
  if (!(g.smoothing >= 0.0)) fail("guess.smoothing must be >= 0");
  const SweepConfig& s = cfg.sweep;
  if (s.kind != "time" && s.kind != "epsilon" && s.kind != "K") {
    fail("sweep.kind must be time, epsilon or K");
  }
  if (s.strategy != "full" && s.strategy != "bisection") {
    fail("sweep.strategy must be full or bisection");
  }
  if (s.grid_points < 2) fail("sweep.grid_points must be >= 2");
  if (!(s.T_min_factor > 0.0 && s.T_min_factor <= 1.0 && s.T_max_factor >= 1.0 &&
        s.T_min_factor < s.T_max_factor)) {
    fail("sweep range must straddle T_S: 0 < T_min_factor <= 1 <= T_max_factor");
  }
  for (double e : s.epsilon_values) {
    if (!(e >= 0.0)) fail("sweep.epsilon_values must be >= 0");
  }
  for (int k : s.K_values) {
    if (k < 1 || k > kMaxLevels - 1) fail("sweep.K_values must lie in 1..15");
  }
  if (cfg.spectrum.points < 2) fail("spectrum.points must be >= 2");
  if (cfg.spectrum.lambda_min > cfg.spectrum.lambda_max) fail("spectrum.lambda_min > lambda_max");
  if (cfg.rwa.scan_points < 3) fail("rwa.scan_points must be >= 3");
  if (cfg.rwa.phase_points < 2) fail("rwa.phase_points must be >= 2");
  if (!(cfg.rwa.omega >= 0.0)) fail("rwa.omega must be >= 0");
  const ToleranceConfig& t = cfg.tolerances;
  if (!(t.hermitian > 0.0 && t.unitary > 0.0 && t.state_norm > 0.0)) {
    fail("tolerances must be positive");
  }
  if (cfg.workers < 1) fail("workers must be >= 1");
  if (cfg.output_dir.empty()) fail("output_dir must not be empty");
}

SpectrumModel build_model(const ExperimentConfig& cfg) {
  try {
    return SpectrumModel(cfg.model.levels, cfg.model.epsilon0, cfg.model.deltas);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: model: ") + e.what());
  }
}

double total_duration(const ExperimentConfig& cfg, const SpectrumModel& model) {
  if (cfg.grid.duration > 0.0) return cfg.grid.duration;
  return cfg.grid.duration_factor * model.sudden_switch_time(cfg.target);
}

GuessFactory build_guess(const ExperimentConfig& cfg) {
  if (cfg.guess.family == "linear") return linear_factory();
  if (cfg.guess.family == "sinusoidal") return sinusoidal_factory();
  return sudden_smooth_factory(GuessOptions{cfg.guess.smoothing, cfg.guess.slope});
}

QslSettings build_settings(const ExperimentConfig& cfg) {
  QslSettings s;
  s.alpha0 = cfg.optimizer.alpha0;
  s.alpha_reference_eps0 = cfg.optimizer.alpha_reference_eps0;
  s.threshold = cfg.optimizer.threshold;
  s.max_iters = cfg.optimizer.max_iters;
  s.monotonic_tolerance = cfg.optimizer.monotonic_tolerance;
  s.stall_window = cfg.optimizer.stall_window;
  s.steps = cfg.grid.steps;
  s.tail_fraction = cfg.optimizer.tail_fraction;
  s.smoothing = cfg.optimizer.smoothing;
  s.workers = cfg.workers;
  s.strategy = cfg.sweep.strategy == "bisection" ? SweepStrategy::Bisection : SweepStrategy::Full;
  return s;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv("MULTIAC_OUTPUT_ROOT"); root && *root) {
      dir = std::filesystem::path(root) / dir;
    }
  }
  return dir;
}

}  // namespace multiac::app
