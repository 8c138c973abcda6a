#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "multiac/errors.hpp"

using namespace multiac;
using namespace multiac::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("multiac_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_two_level(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.model = {2, 10.0, {1.0}};
  cfg.target = 1;
  cfg.grid.steps = 300;
  cfg.optimizer.max_iters = 1500;
  cfg.sweep.T_min_factor = 0.9;
  cfg.sweep.T_max_factor = 1.1;
  cfg.sweep.grid_points = 3;
  cfg.output_dir = out.string();
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MULTIAC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config JSON round-trips") {
  ExperimentConfig cfg;
  cfg.model = {4, 25.0, {1.0, 0.5, 2.0}};
  cfg.sweep.epsilon_values = {1.0, 2.5};
  cfg.sweep.K_values = {1, 3};
  cfg.rwa.omega = 24.5;
  cfg.guess.family = "linear";
  const nlohmann::json j = to_json(cfg);
  CHECK(to_json(from_json(j)) == j);

  const fs::path dir = scratch_dir("roundtrip");
  save_config(dir / "c.json", cfg);
  CHECK(to_json(load_config(dir / "c.json")) == j);
}

TEST_CASE("partial configs take defaults") {
  const ExperimentConfig cfg = from_json(nlohmann::json::parse(R"({"target": 1})"));
  CHECK(cfg.target == 1);
  CHECK(cfg.model.levels == 3);
  CHECK(cfg.optimizer.threshold == 1e-4);
}

TEST_CASE("strict parsing rejects unknown keys, bad types and other schema versions") {
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"modle": {}})")), ConfigError);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"model": {"level": 3}})")), ConfigError);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"target": "two"})")), ConfigError);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"schema_version": 2})")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const fs::path dir = scratch_dir("badjson");
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
}

TEST_CASE("dotted overrides") {
  ExperimentConfig cfg;
  apply_override(cfg, "model.epsilon0=20");
  apply_override(cfg, "sweep.epsilon_values=[1,2,3]");
  apply_override(cfg, "guess.family=sinusoidal");
  apply_override(cfg, "output_dir=runs/a");
  CHECK(cfg.model.epsilon0 == 20.0);
  CHECK(cfg.sweep.epsilon_values.size() == 3);
  CHECK(cfg.guess.family == "sinusoidal");
  CHECK(cfg.output_dir == "runs/a");
  CHECK_THROWS_AS(apply_override(cfg, "model.eps=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "model.levels=many"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "no-equals-sign"), ConfigError);
}

TEST_CASE("validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  auto bad = cfg;
  bad.model.deltas = {1.0};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.target = 3;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.guess.family = "random";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.sweep.strategy = "golden";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.optimizer.alpha0 = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("shipped configs load and validate") {
  for (const auto& entry : fs::directory_iterator(MULTIAC_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg = load_config(entry.path()));
    CHECK_NOTHROW(validate(cfg));
  }
}

TEST_CASE("relative output directories honour MULTIAC_OUTPUT_ROOT") {
  ExperimentConfig cfg;
  cfg.output_dir = "rel";
  ::setenv("MULTIAC_OUTPUT_ROOT", "/tmp/root_x", 1);
  CHECK(resolve_output_dir(cfg) == fs::path("/tmp/root_x/rel"));
  cfg.output_dir = "/abs/dir";
  CHECK(resolve_output_dir(cfg) == fs::path("/abs/dir"));
  ::unsetenv("MULTIAC_OUTPUT_ROOT");
  cfg.output_dir = "rel";
  CHECK(resolve_output_dir(cfg) == fs::path("rel"));
}

TEST_CASE("re-running a command reproduces its files byte for byte") {
  const fs::path a = scratch_dir("rerun_a");
  const fs::path b = scratch_dir("rerun_b");
  std::ostringstream log;
  run_command("optimize", small_two_level(a), log);
  run_command("optimize", small_two_level(b), log);
  for (const char* f : {"infidelity.csv", "field_final.csv", "populations.csv", "summary.csv",
                        "frequency.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(fs::exists(a / "config.json"));
  CHECK(to_json(load_config(a / "config.json")) ==
        to_json([&] { auto c = small_two_level(a); return c; }()));
}

TEST_CASE("spectrum command writes the scan and the crossings") {
  const fs::path out = scratch_dir("spectrum");
  ExperimentConfig cfg;
  cfg.spectrum.points = 201;
  cfg.output_dir = out.string();
  std::ostringstream log;
  run_command("spectrum", cfg, log);
  const std::string s = slurp(out / "spectrum.csv");
  CHECK(s.rfind("lambda[energy],E_0[energy],E_1[energy],E_2[energy]", 0) == 0);
  CHECK(fs::exists(out / "crossings.csv"));
  CHECK(fs::exists(out / "spectrum.svg"));
}

TEST_CASE("sweep edge cases") {
  std::ostringstream log;
  const fs::path out = scratch_dir("sweep_edges");
  ExperimentConfig cfg = small_two_level(out);
  cfg.sweep.kind = "epsilon";
  cfg.sweep.epsilon_values = {};
  CHECK_THROWS_AS(run_command("qsl-sweep", cfg, log), ConfigError);
  cfg.sweep.epsilon_values = {10.0};
  run_command("qsl-sweep", cfg, log);
  const std::string s = slurp(out / "sweep.csv");
  CHECK(std::count(s.begin(), s.end(), '\n') == 2);
  CHECK_THROWS_AS(run_command("no-such-command", cfg, log), ConfigError);
}

TEST_CASE("command line exit codes") {
  const fs::path out = scratch_dir("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("spectrum --set model.bogus=1") == 2);
  CHECK(run_cli("spectrum --config /nonexistent.json") == 2);
  CHECK(run_cli("spectrum --set model.levels=1 -o " + out.string()) == 2);
  CHECK(run_cli("spectrum --print-config") == 0);
  CHECK(run_cli("spectrum --set spectrum.points=101 -o " + out.string()) == 0);
  CHECK(fs::exists(out / "spectrum.csv"));
}
