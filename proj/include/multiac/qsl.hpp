#pragma once

// Quantum-speed-limit estimation: sweep the total time T, optimize at each
// value and classify every run by the late-iteration curvature of its
// infidelity history.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "multiac/fields.hpp"
#include "multiac/krotov.hpp"
#include "multiac/model.hpp"

namespace multiac {

enum class RunClass { Convergent, Stuck, NotRun };

const char* run_class_name(RunClass c);

// Mean second difference of the 5-point moving average of history over its
// last tail_window entries. Requires history.size() >= 3 * tail_window and
// tail_window >= 3 (std::invalid_argument).
double tail_curvature(std::span<const double> history, int tail_window, int smoothing = 5);

// Convergent iff the final infidelity is below threshold, or the tail
// curvature is negative. tail_window == 0 uses the last 20% of the history.
// The curvature branch throws std::invalid_argument on a too-short record.
RunClass classify_run(const OptimizationRecord& record, int tail_window = 0,
                      double threshold = 1e-4);

// Builds the initial field for target K and duration T. steps == 0 picks the
// default grid.
using GuessFactory =
    std::function<ControlField(const SpectrumModel& model, int target, double duration, int steps)>;

GuessFactory sudden_smooth_factory(GuessOptions options = {});
GuessFactory linear_factory();
GuessFactory sinusoidal_factory();

enum class SweepStrategy {
  Full,       // optimize at every grid point
  Bisection,  // assume stuck-below / convergent-above and bisect the grid
};

struct QslSettings {
  double alpha0 = 1.0;
  // When > 0, alpha = alpha0 * (alpha_reference_eps0 / eps0)^2, keeping the
  // update step comparable as the oscillation frequency grows.
  double alpha_reference_eps0 = 0.0;
  double threshold = 1e-4;
  int max_iters = 10000;
  double monotonic_tolerance = 1e-9;
  int stall_window = 50;
  int steps = 0;
  double tail_fraction = 0.2;
  int smoothing = 5;
  int workers = 1;
  SweepStrategy strategy = SweepStrategy::Full;
};

double effective_alpha(const SpectrumModel& model, const QslSettings& settings);

// Optimization problem |0> -> |K> at duration T with the factory's guess.
OptimizationProblem make_problem(const SpectrumModel& model, int target, double duration,
                                 const GuessFactory& guess, const QslSettings& settings);

struct RunSummary {
  double duration = 0.0;
  RunClass classification = RunClass::NotRun;
  double final_infidelity = 0.0;
  int iterations = 0;
  double curvature = 0.0;  // tail curvature, 0 when the history is too short
};

RunSummary summarize_run(double duration, const OptimizationRecord& record,
                         const QslSettings& settings);

struct QslEstimate {
  int target = 0;
  double sudden_switch_time = 0.0;  // T_S^(K)
  std::vector<double> T_values;
  std::vector<RunClass> classifications;  // NotRun for points bisection skipped
  std::vector<RunSummary> runs;
  double T_qsl = 0.0;       // NaN when no convergent block ends the sweep
  double resolution = 0.0;  // grid spacing
  bool out_of_range = false;
  bool monotone = true;     // evaluated classes read stuck... convergent...
  int reference_index = 0;  // grid point closest to T_S^(K), always evaluated
  bool reference_convergent = false;

  double ratio() const { return T_qsl / sudden_switch_time; }
};

// T_values = linspace(T_range[0], T_range[1], grid_points) * T_S^(K). T_qsl is
// the first point of the trailing all-convergent block. Throws
// std::invalid_argument if the range does not straddle T_S^(K) or
// grid_points < 2.
QslEstimate estimate_qsl(const SpectrumModel& model, int target, std::pair<double, double> T_range,
                         int grid_points, const GuessFactory& guess, const QslSettings& settings);

struct SweepRow {
  double parameter = 0.0;  // eps0 or K
  QslEstimate estimate;
};

// Uniform-gap models with the given level count, one estimate per eps0.
std::vector<SweepRow> sweep_epsilon(int levels, double delta, int target,
                                    std::span<const double> epsilon_values,
                                    std::pair<double, double> T_range, int grid_points,
                                    const GuessFactory& guess, const QslSettings& settings);

// N = K + 1 levels for each K.
std::vector<SweepRow> sweep_K(double epsilon0, double delta, std::span<const int> K_values,
                              std::pair<double, double> T_range, int grid_points,
                              const GuessFactory& guess, const QslSettings& settings);

// Header <parameter>,T_qsl[time],T_S[time],ratio[1],resolution[time],out_of_range[bool].
void write_sweep_csv(std::ostream& os, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

// Header T[time],T_over_TS[1],convergent[class],final_infidelity[1],iterations[count],
// curvature[1]. convergent is 1, 0, or -1 for points that were not run.
void write_estimate_csv(std::ostream& os, const QslEstimate& estimate);

}  // namespace multiac
