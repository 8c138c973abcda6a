// multiac: batch driver for the spectrum, optimization, speed-limit sweep and
// rotating-wave comparison experiments.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "multiac/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Optimal-control and speed-limit experiments on multi-level avoided crossings"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", "multiac 1.0");

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  bool print_config = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON config file (defaults apply when omitted)");
    sub->add_option("-s,--set", overrides, "override a config key, e.g. --set model.epsilon0=20")
        ->take_all();
    sub->add_option("-o,--output", output, "output directory (overrides output_dir)");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "adiabatic spectrum and avoided-crossing gaps"},
      {"optimize", "single optimization: history, fields, populations, dominant frequency"},
      {"qsl-sweep", "speed-limit estimate over T, optionally swept over eps0 or K"},
      {"rwa-compare", "analytic rotating-wave propagator vs numerical propagation"},
  };
  for (const auto& [name, help] : commands) add_common(cli.add_subcommand(name, help));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string name = cli.get_subcommands().front()->get_name();

  try {
    multiac::app::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = multiac::app::load_config(config_path);
    for (const std::string& o : overrides) multiac::app::apply_override(cfg, o);
    if (!output.empty()) cfg.output_dir = output;
    if (print_config) {
      std::cout << multiac::app::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    const auto out = multiac::app::run_command(name, cfg, std::cerr);
    std::cerr << name << ": wrote " << out.string() << '\n';
    return 0;
  } catch (const multiac::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const multiac::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
