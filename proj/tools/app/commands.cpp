#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "multiac/csv.hpp"
#include "multiac/errors.hpp"
#include "multiac/fields.hpp"
#include "multiac/krotov.hpp"
#include "multiac/propagator.hpp"
#include "svg.hpp"

namespace multiac::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r[j]);
  return c;
}

std::vector<double> slice_times(const TimeGrid& grid) {
  std::vector<double> t(grid.steps());
  for (int k = 0; k < grid.steps(); ++k) t[k] = grid.start(k);
  return t;
}

std::vector<double> node_times(const TimeGrid& grid) {
  std::vector<double> t(grid.steps() + 1);
  for (int k = 0; k <= grid.steps(); ++k) t[k] = grid.start(k);
  return t;
}

}  // namespace

void cmd_spectrum(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SpectrumModel model = build_model(cfg);
  double lo = cfg.spectrum.lambda_min, hi = cfg.spectrum.lambda_max;
  if (lo == 0.0 && hi == 0.0) {
    const auto d = model.deltas();
    const double dmax = d.empty() ? 1.0 : std::max(1.0, *std::max_element(d.begin(), d.end()));
    const double eps0 = model.epsilon0();
    lo = -eps0 - 2.0 * dmax;
    hi = (model.levels() - 1) * eps0 + 2.0 * dmax;
  }
  std::vector<double> grid(cfg.spectrum.points);
  for (int i = 0; i < cfg.spectrum.points; ++i) {
    grid[i] = lo + (hi - lo) * i / (cfg.spectrum.points - 1);
  }
  const SpectrumScan scan = scan_spectrum(model, grid);

  {
    auto os = open_out(out / "spectrum.csv");
    write_spectrum_csv(os, scan);
  }
  {
    auto os = open_out(out / "crossings.csv");
    csv::write_header(os, {"index[1]", "lambda[energy]", "gap[energy]", "grid_gap[energy]"});
    for (const AvoidedCrossing& c : scan.crossings) {
      csv::write_row(os, {static_cast<double>(c.index), c.lambda, c.gap, c.grid_gap});
    }
  }
  Plot plot{"Adiabatic spectrum", "lambda", "energy", false, {}};
  for (int n = 0; n < model.levels(); ++n) {
    plot.series.push_back({"E_" + std::to_string(n), scan.lambdas, column(scan.energies, n)});
  }
  write_svg(out / "spectrum.svg", plot);
  for (const AvoidedCrossing& c : scan.crossings) {
    log << "crossing " << c.index << ": lambda = " << c.lambda << ", gap = " << c.gap << '\n';
  }
  if (scan.incomplete_coverage) log << "warning: lambda range does not cover every crossing\n";
}

void cmd_optimize(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SpectrumModel model = build_model(cfg);
  const int K = cfg.target;
  const double T = total_duration(cfg, model);
  const QslSettings settings = build_settings(cfg);
  const OptimizationProblem problem = make_problem(model, K, T, build_guess(cfg), settings);
  log << "optimize: N = " << model.levels() << ", K = " << K << ", T = " << T
      << " (T/T_S = " << T / model.sudden_switch_time(K) << "), M = " << problem.guess.size()
      << ", alpha = " << problem.alpha.front() << '\n';

  const OptimizationRecord rec = optimize(problem, [&](int it, double infid) {
    if (it % 1000 == 0) log << "  iteration " << it << ": infidelity " << infid << '\n';
  });
  const RunSummary summary = summarize_run(T, rec, settings);
  const StateTrajectory traj = propagate(model, rec.final_field, basis_state(model.levels(), 0));
  const FrequencyReport freq = dominant_frequency(rec.final_field, K);
  const double expected = model.epsilon0() / (2.0 * std::numbers::pi);

  {
    auto os = open_out(out / "infidelity.csv");
    write_record_csv(os, rec);
  }
  {
    auto os = open_out(out / "field_initial.csv");
    write_field_csv(os, problem.guess);
  }
  {
    auto os = open_out(out / "field_final.csv");
    write_field_csv(os, rec.final_field);
  }
  {
    auto os = open_out(out / "populations.csv");
    write_trajectory_csv(os, traj);
  }
  {
    auto os = open_out(out / "frequency.csv");
    csv::write_header(os, {"frequency[1/time]", "expected[1/time]", "relative_error[1]",
                           "A_max[energy]", "constant[bool]"});
    const double rel = expected > 0.0 ? std::abs(freq.frequency - expected) / expected : 0.0;
    csv::write_row(os, {freq.frequency, expected, rel, freq.amplitude, freq.constant ? 1.0 : 0.0});
  }
  {
    auto os = open_out(out / "summary.csv");
    csv::write_header(os, {"T[time]", "T_S[time]", "iterations[count]", "converged[bool]",
                           "stalled[bool]", "final_infidelity[1]", "convergent[class]",
                           "curvature[1]"});
    csv::write_row(os, {T, model.sudden_switch_time(K), static_cast<double>(rec.iterations_used),
                        rec.converged ? 1.0 : 0.0, rec.stalled ? 1.0 : 0.0,
                        rec.final_infidelity(),
                        summary.classification == RunClass::Convergent ? 1.0 : 0.0,
                        summary.curvature});
  }

  std::vector<double> iters(rec.infidelities.size());
  for (std::size_t m = 0; m < iters.size(); ++m) iters[m] = static_cast<double>(m);
  write_svg(out / "infidelity.svg",
            {"Infidelity history", "iteration", "infidelity", true, {{"I", iters, rec.infidelities}}});
  const auto t = slice_times(problem.guess.grid());
  const auto& initial = problem.guess.values();
  const auto& final_values = rec.final_field.values();
  write_svg(out / "field.svg",
            {"Control field", "t", "lambda", false,
             {{"initial", t, std::vector<double>(initial.begin(), initial.end())},
              {"optimized", t, std::vector<double>(final_values.begin(), final_values.end())}}});
  Plot pops{"Populations (optimized field)", "t", "P_n", false, {}};
  const auto tn = node_times(traj.grid);
  for (int n = 0; n < model.levels(); ++n) {
    pops.series.push_back({"P_" + std::to_string(n), tn, column(traj.populations, n)});
  }
  write_svg(out / "populations.svg", pops);

  log << "optimize: " << rec.iterations_used << " iterations, final infidelity "
      << rec.final_infidelity() << (rec.converged ? " (converged)" : " (not converged)") << '\n';
  log << "optimize: dominant frequency " << freq.frequency << " (eps0/2pi = " << expected
      << "), A_max = " << freq.amplitude << '\n';
}

namespace {

void write_estimate_outputs(const fs::path& out, const std::string& stem, const QslEstimate& e) {
  {
    auto os = open_out(out / (stem + ".csv"));
    write_estimate_csv(os, e);
  }
  Series conv{"convergent", {}, {}, true}, stuck{"stuck", {}, {}, true};
  for (std::size_t i = 0; i < e.T_values.size(); ++i) {
    if (e.classifications[i] == RunClass::NotRun) continue;
    Series& s = e.classifications[i] == RunClass::Convergent ? conv : stuck;
    s.x.push_back(e.T_values[i] / e.sudden_switch_time);
    s.y.push_back(std::max(e.runs[i].final_infidelity, 1e-16));
  }
  write_svg(out / (stem + ".svg"),
            {"Final infidelity per T", "T / T_S", "final infidelity", true, {conv, stuck}});
}

void log_estimate(std::ostream& log, const std::string& label, const QslEstimate& e) {
  log << label << ": T_qsl / T_S = " << e.ratio() << " +- " << e.resolution / e.sudden_switch_time
      << (e.out_of_range ? " (out of range)" : "") << (e.monotone ? "" : " (non-monotone)")
      << (e.reference_convergent ? "" : " (T_S run stuck)") << '\n';
}

}  // namespace

void cmd_qsl_sweep(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SweepConfig& sw = cfg.sweep;
  const std::pair<double, double> range{sw.T_min_factor, sw.T_max_factor};
  const GuessFactory guess = build_guess(cfg);
  const QslSettings settings = build_settings(cfg);

  std::vector<SweepRow> rows;
  std::string parameter;
  if (sw.kind == "time") {
    const SpectrumModel model = build_model(cfg);
    rows.push_back({model.epsilon0(),
                    estimate_qsl(model, cfg.target, range, sw.grid_points, guess, settings)});
    parameter = "epsilon0[energy]";
  } else if (sw.kind == "epsilon") {
    if (sw.epsilon_values.empty()) throw ConfigError("config: sweep.epsilon_values is empty");
    const auto& d = cfg.model.deltas;
    if (std::adjacent_find(d.begin(), d.end(), std::not_equal_to<>()) != d.end()) {
      throw ConfigError("config: the epsilon sweep needs equal model.deltas");
    }
    for (double eps0 : sw.epsilon_values) {
      const SpectrumModel model = SpectrumModel::uniform(cfg.model.levels, eps0, d.front());
      rows.push_back({eps0, estimate_qsl(model, cfg.target, range, sw.grid_points, guess, settings)});
      log_estimate(log, "epsilon0 = " + csv::format(eps0), rows.back().estimate);
    }
    parameter = "epsilon0[energy]";
  } else {
    if (sw.K_values.empty()) throw ConfigError("config: sweep.K_values is empty");
    const double delta = cfg.model.deltas.front();
    for (int k : sw.K_values) {
      const SpectrumModel model = SpectrumModel::uniform(k + 1, cfg.model.epsilon0, delta);
      rows.push_back({static_cast<double>(k),
                      estimate_qsl(model, k, range, sw.grid_points, guess, settings)});
      log_estimate(log, "K = " + std::to_string(k), rows.back().estimate);
    }
    parameter = "K[1]";
  }
  if (sw.kind == "time") log_estimate(log, "estimate", rows.front().estimate);

  {
    auto os = open_out(out / "sweep.csv");
    write_sweep_csv(os, parameter, rows);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_estimate_outputs(out, "estimate_" + std::to_string(i), rows[i].estimate);
  }
  Series ratio{"T_qsl / T_S", {}, {}, true};
  for (const SweepRow& r : rows) {
    ratio.x.push_back(r.parameter);
    ratio.y.push_back(r.estimate.ratio());
  }
  write_svg(out / "sweep.svg",
            {"Speed-limit ratio", sw.kind == "K" ? "K" : "eps0", "T_qsl / T_S", false, {ratio}});
}

void cmd_rwa_compare(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SpectrumModel model = build_model(cfg);
  if (model.levels() != 3) throw ConfigError("config: rwa-compare needs model.levels = 3");
  const double T = total_duration(cfg, model);
  const RwaConfig& r = cfg.rwa;
  const double tm = r.switch_time > 0.0 ? r.switch_time : default_switch_time(model, T);
  if (!(tm < T)) throw ConfigError("config: rwa.switch_time must be < T");

  AmplitudeCalibration cal;
  RwaParameters params;
  const bool calibrate = r.amplitude < 0.0;
  if (calibrate) {
    cal = calibrate_amplitude(model, T, tm,
                              CalibrationOptions{r.scan_points, r.calibrate_phases, r.phase_points});
    params = cal.parameters(model, T, tm);
  } else {
    params = default_rwa_parameters(model, T, r.amplitude);
    params.switch_time = tm;
    params.phase = r.phase;
    params.phase2 = r.phase2;
  }
  if (r.omega > 0.0) params.omega = r.omega;
  const RwaComparison cmp = compare_rwa(model, params, cfg.grid.steps);

  {
    auto os = open_out(out / "rwa_traces.csv");
    write_comparison_csv(os, cmp);
  }
  {
    auto os = open_out(out / "rwa_summary.csv");
    csv::write_header(os, {"amplitude[energy]", "amplitude_ratio[1]", "omega[energy]",
                           "phase[rad]", "phase2[rad]", "switch_time[time]", "T[time]",
                           "max_deviation[1]", "fidelity_analytic[1]", "fidelity_numeric[1]"});
    csv::write_row(os, {params.amplitude, params.amplitude / model.epsilon0(), params.omega,
                        params.phase, params.phase2, params.switch_time, T, cmp.max_deviation,
                        cmp.final_fidelity_analytic, cmp.final_fidelity_numeric});
  }
  if (calibrate) {
    auto os = open_out(out / "rwa_calibration.csv");
    csv::write_header(os, {"amplitude_ratio[1]", "fidelity[1]"});
    csv::write_row(os, {0.0, cal.fidelity_at_zero});
    for (const auto& [x, f] : cal.scan) csv::write_row(os, {x, f});
  }
  Plot plot{"Analytic vs numerical populations", "t", "P_n", false, {}};
  const auto t = node_times(cmp.grid);
  for (int n = 0; n < 3; ++n) {
    plot.series.push_back({"P_" + std::to_string(n) + " analytic", t, column(cmp.analytic, n)});
    plot.series.push_back({"P_" + std::to_string(n) + " numeric", t, column(cmp.numeric, n)});
  }
  write_svg(out / "rwa.svg", plot);

  if (calibrate) {
    log << "rwa: calibrated lambda_A / eps0 = " << cal.ratio << " (phases " << cal.phase << ", "
        << cal.phase2 << "), analytic fidelity " << cal.fidelity << " vs " << cal.fidelity_at_zero
        << " at lambda_A = 0" << (cal.flat ? " (flat objective)" : "") << '\n';
  }
  log << "rwa: max population deviation " << cmp.max_deviation << ", final P_2 analytic "
      << cmp.final_fidelity_analytic << ", numeric " << cmp.final_fidelity_numeric << '\n';
}

fs::path run_command(const std::string& name, const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  Tolerances& tol = default_tolerances();
  tol.hermitian = cfg.tolerances.hermitian;
  tol.unitary = cfg.tolerances.unitary;
  tol.state_norm = cfg.tolerances.state_norm;

  void (*cmd)(const ExperimentConfig&, const fs::path&, std::ostream&) = nullptr;
  if (name == "spectrum") cmd = cmd_spectrum;
  else if (name == "optimize") cmd = cmd_optimize;
  else if (name == "qsl-sweep") cmd = cmd_qsl_sweep;
  else if (name == "rwa-compare") cmd = cmd_rwa_compare;
  else throw ConfigError("unknown command '" + name + "'");

  const fs::path out = resolve_output_dir(cfg);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create " + out.string() + ": " + ec.message());
  try {
    cmd(cfg, out, log);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  save_config(out / "config.json", cfg);
  return out;
}

}  // namespace multiac::app
