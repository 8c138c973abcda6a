#include "multiac/qsl.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "multiac/csv.hpp"

namespace multiac {

const char* run_class_name(RunClass c) {
  switch (c) {
    case RunClass::Convergent: return "convergent";
    case RunClass::Stuck: return "stuck";
    case RunClass::NotRun: return "not-run";
  }
  return "?";
}

double tail_curvature(std::span<const double> history, int tail_window, int smoothing) {
  if (tail_window < 3) throw std::invalid_argument("tail_curvature: tail_window < 3");
  if (smoothing < 1) throw std::invalid_argument("tail_curvature: smoothing < 1");
  const int n = static_cast<int>(history.size());
  if (n < 3 * tail_window) {
    throw std::invalid_argument("tail_curvature: history shorter than 3 * tail_window");
  }
  // Trailing moving average over the last tail_window + 2 entries so every
  // second difference in the tail has both neighbours.
  const int first = n - tail_window - 2;
  std::vector<double> s(tail_window + 2);
  for (int j = 0; j < tail_window + 2; ++j) {
    const int end = first + j;
    const int begin = std::max(0, end - smoothing + 1);
    double acc = 0.0;
    for (int i = begin; i <= end; ++i) acc += history[i];
    s[j] = acc / (end - begin + 1);
  }
  double sum = 0.0;
  for (int j = 1; j <= tail_window; ++j) sum += s[j + 1] - 2.0 * s[j] + s[j - 1];
  return sum / tail_window;
}

RunClass classify_run(const OptimizationRecord& record, int tail_window, double threshold) {
  if (record.infidelities.empty()) throw std::invalid_argument("classify_run: empty record");
  if (record.final_infidelity() < threshold) return RunClass::Convergent;
  const int n = static_cast<int>(record.infidelities.size());
  if (tail_window == 0) tail_window = std::max(3, n / 5);
  return tail_curvature(record.infidelities, tail_window) < 0.0 ? RunClass::Convergent
                                                                : RunClass::Stuck;
}

GuessFactory sudden_smooth_factory(GuessOptions options) {
  return [options](const SpectrumModel& model, int target, double duration, int steps) {
    return initial_guess(model, target, duration, options, steps);
  };
}

GuessFactory linear_factory() {
  return [](const SpectrumModel& model, int target, double duration, int steps) {
    return linear_guess(model, target, duration, steps);
  };
}

GuessFactory sinusoidal_factory() {
  return [](const SpectrumModel& model, int target, double duration, int steps) {
    return sinusoidal_guess(model, target, duration, steps);
  };
}

double effective_alpha(const SpectrumModel& model, const QslSettings& settings) {
  if (settings.alpha_reference_eps0 > 0.0 && model.epsilon0() > 0.0) {
    const double r = settings.alpha_reference_eps0 / model.epsilon0();
    return settings.alpha0 * r * r;
  }
  return settings.alpha0;
}

OptimizationProblem make_problem(const SpectrumModel& model, int target, double duration,
                                 const GuessFactory& guess, const QslSettings& settings) {
  const int n = model.levels();
  if (target < 1 || target >= n) throw std::out_of_range("make_problem: target outside 1..N-1");
  ControlField field = guess(model, target, duration, settings.steps);
  OptimizationProblem p{model,
                        basis_state(n, 0),
                        basis_state(n, target),
                        duration,
                        constant_alpha(field.grid(), effective_alpha(model, settings)),
                        std::move(field)};
  p.max_iters = settings.max_iters;
  p.threshold = settings.threshold;
  p.monotonic_tolerance = settings.monotonic_tolerance;
  p.stall_window = settings.stall_window;
  return p;
}

RunSummary summarize_run(double duration, const OptimizationRecord& record,
                         const QslSettings& settings) {
  RunSummary s;
  s.duration = duration;
  s.final_infidelity = record.final_infidelity();
  s.iterations = record.iterations_used;
  const int n = static_cast<int>(record.infidelities.size());
  const int window = std::max(3, static_cast<int>(settings.tail_fraction * n));
  if (n >= 3 * window) s.curvature = tail_curvature(record.infidelities, window, settings.smoothing);
  if (s.final_infidelity < settings.threshold) {
    s.classification = RunClass::Convergent;
  } else if (n < 3 * window) {
    // Too short to judge a trend: the run stopped early without converging.
    s.classification = RunClass::Stuck;
  } else {
    s.classification = s.curvature < 0.0 ? RunClass::Convergent : RunClass::Stuck;
  }
  return s;
}

namespace {

// Runs job(i) for every index on at most `workers` threads.
template <class Job>
void run_pool(const std::vector<int>& indices, int workers, Job&& job) {
  const int count = static_cast<int>(indices.size());
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    for (int i : indices) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int k = next++; k < count && !failed; k = next++) {
        try {
          job(indices[k]);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

QslEstimate estimate_qsl(const SpectrumModel& model, int target, std::pair<double, double> T_range,
                         int grid_points, const GuessFactory& guess, const QslSettings& settings) {
  if (grid_points < 2) throw std::invalid_argument("estimate_qsl: grid_points < 2");
  if (!(T_range.first <= 1.0 && T_range.second >= 1.0 && T_range.first < T_range.second &&
        T_range.first > 0.0)) {
    throw std::invalid_argument("estimate_qsl: T range must straddle T_S (factors a <= 1 <= b)");
  }
  QslEstimate est;
  est.target = target;
  est.sudden_switch_time = model.sudden_switch_time(target);
  const double ts = est.sudden_switch_time;
  const double step = (T_range.second - T_range.first) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) est.T_values.push_back((T_range.first + i * step) * ts);
  est.resolution = step * ts;
  est.classifications.assign(grid_points, RunClass::NotRun);
  est.runs.resize(grid_points);
  est.reference_index = static_cast<int>(std::lround((1.0 - T_range.first) / step));

  auto evaluate = [&](const std::vector<int>& indices) {
    std::vector<int> todo;
    for (int i : indices) {
      if (est.classifications[i] == RunClass::NotRun &&
          std::find(todo.begin(), todo.end(), i) == todo.end()) {
        todo.push_back(i);
      }
    }
    std::vector<RunSummary> results(grid_points);
    run_pool(todo, settings.workers, [&](int i) {
      const OptimizationRecord rec =
          optimize(make_problem(model, target, est.T_values[i], guess, settings));
      results[i] = summarize_run(est.T_values[i], rec, settings);
    });
    for (int i : todo) {
      est.runs[i] = results[i];
      est.classifications[i] = results[i].classification;
    }
  };

  const int last = grid_points - 1;
  if (settings.strategy == SweepStrategy::Full) {
    std::vector<int> all(grid_points);
    for (int i = 0; i < grid_points; ++i) all[i] = i;
    evaluate(all);
  } else {
    evaluate({0, last, est.reference_index});
    if (est.classifications[0] == RunClass::Stuck && est.classifications[last] == RunClass::Convergent) {
      int lo = 0, hi = last;
      // Known points narrow the bracket before any new run.
      for (int i = 1; i < last; ++i) {
        if (est.classifications[i] == RunClass::Stuck) lo = std::max(lo, i);
      }
      for (int i = last - 1; i > lo; --i) {
        if (est.classifications[i] == RunClass::Convergent) hi = std::min(hi, i);
      }
      while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        evaluate({mid});
        (est.classifications[mid] == RunClass::Convergent ? hi : lo) = mid;
      }
    }
  }

  est.reference_convergent = est.classifications[est.reference_index] == RunClass::Convergent;

  // Monotone means no evaluated convergent point precedes an evaluated stuck one.
  bool seen_convergent = false;
  for (RunClass c : est.classifications) {
    if (c == RunClass::Convergent) seen_convergent = true;
    if (c == RunClass::Stuck && seen_convergent) est.monotone = false;
  }

  int first = -1;
  for (int i = last; i >= 0; --i) {
    if (est.classifications[i] == RunClass::Stuck) break;
    if (est.classifications[i] == RunClass::Convergent) first = i;
  }
  bool any_stuck = false;
  for (RunClass c : est.classifications) any_stuck = any_stuck || c == RunClass::Stuck;
  if (first < 0) {
    est.T_qsl = std::numeric_limits<double>::quiet_NaN();
    est.out_of_range = true;
  } else {
    est.T_qsl = est.T_values[first];
    est.out_of_range = !any_stuck;
  }
  return est;
}

std::vector<SweepRow> sweep_epsilon(int levels, double delta, int target,
                                    std::span<const double> epsilon_values,
                                    std::pair<double, double> T_range, int grid_points,
                                    const GuessFactory& guess, const QslSettings& settings) {
  std::vector<SweepRow> rows;
  for (double eps0 : epsilon_values) {
    const SpectrumModel model = SpectrumModel::uniform(levels, eps0, delta);
    rows.push_back({eps0, estimate_qsl(model, target, T_range, grid_points, guess, settings)});
  }
  return rows;
}

std::vector<SweepRow> sweep_K(double epsilon0, double delta, std::span<const int> K_values,
                              std::pair<double, double> T_range, int grid_points,
                              const GuessFactory& guess, const QslSettings& settings) {
  std::vector<SweepRow> rows;
  for (int k : K_values) {
    const SpectrumModel model = SpectrumModel::uniform(k + 1, epsilon0, delta);
    rows.push_back(
        {static_cast<double>(k), estimate_qsl(model, k, T_range, grid_points, guess, settings)});
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
  csv::write_header(os, {parameter, "T_qsl[time]", "T_S[time]", "ratio[1]", "resolution[time]",
                         "out_of_range[bool]"});
  for (const SweepRow& r : rows) {
    const QslEstimate& e = r.estimate;
    csv::write_row(os, {r.parameter, e.T_qsl, e.sudden_switch_time, e.ratio(), e.resolution,
                        e.out_of_range ? 1.0 : 0.0});
  }
}

void write_estimate_csv(std::ostream& os, const QslEstimate& estimate) {
  csv::write_header(os, {"T[time]", "T_over_TS[1]", "convergent[class]", "final_infidelity[1]",
                         "iterations[count]", "curvature[1]"});
  for (std::size_t i = 0; i < estimate.T_values.size(); ++i) {
    const RunSummary& r = estimate.runs[i];
    const RunClass c = estimate.classifications[i];
    const double cls = c == RunClass::Convergent ? 1.0 : (c == RunClass::Stuck ? 0.0 : -1.0);
    const bool ran = c != RunClass::NotRun;
    csv::write_row(os, {estimate.T_values[i], estimate.T_values[i] / estimate.sudden_switch_time,
                        cls, ran ? r.final_infidelity : 0.0, static_cast<double>(ran ? r.iterations : 0),
                        ran ? r.curvature : 0.0});
  }
}

}  // namespace multiac
