#pragma once

// Piecewise-constant control fields on a uniform grid and the generators for
// the field families used by the experiments.

#include <iosfwd>
#include <span>
#include <vector>

#include "multiac/model.hpp"

namespace multiac {

class TimeGrid {
 public:
  // steps >= 2, duration >= 0 and finite. A zero-duration grid is allowed
  // (dt == 0) so degenerate evolutions can be expressed.
  TimeGrid(double duration, int steps);

  double duration() const { return duration_; }
  int steps() const { return steps_; }
  double dt() const { return duration_ / steps_; }
  double start(int k) const { return k * dt(); }
  double midpoint(int k) const { return (k + 0.5) * dt(); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double duration_;
  int steps_;
};

// Step count for a grid of duration T: at least 2000 slices, and fine enough
// that dt <= (2 pi / eps0) / 40 so the eps0-frequency oscillations the
// optimizer develops are resolved.
int default_steps(const SpectrumModel& model, double duration);

class ControlField {
 public:
  // values.size() must equal grid.steps(); all values finite.
  ControlField(TimeGrid grid, std::vector<double> values);

  // Samples f at every slice midpoint.
  template <class F>
  static ControlField sample(TimeGrid grid, F&& f) {
    std::vector<double> v(grid.steps());
    for (int k = 0; k < grid.steps(); ++k) v[k] = f(grid.midpoint(k));
    return ControlField(grid, std::move(v));
  }

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }
  double operator[](int k) const { return values_[k]; }
  int size() const { return static_cast<int>(values_.size()); }

  bool operator==(const ControlField&) const = default;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

// lambda_K^(S)(t): lambda_n = n eps0 held for pi / delta_n, n = 0..K-1.
double sudden_switch_value(const SpectrumModel& model, int target, double t);

// Throws std::out_of_range unless 1 <= target <= N-1. steps == 0 picks
// default_steps().
ControlField sudden_switch(const SpectrumModel& model, int target, int steps = 0);

struct GuessOptions {
  double smoothing = 0.02;  // tanh ramp width as a fraction of T
  double slope = 0.01;      // end value of the linear correction, fraction of eps0
};

// lambda_K^(0)(t) = a(t) lambda_K^(S)(b t) + c(t) with b = T_S^(K) / T.
// a(t) replaces each jump by a tanh ramp of width smoothing * T; c(t) rises
// linearly from 0 to slope * eps0.
ControlField initial_guess(const SpectrumModel& model, int target, double duration,
                           const GuessOptions& options = {}, int steps = 0);

// Straight line from lambda_0 = 0 to lambda_{K-1} = (K-1) eps0.
ControlField linear_guess(const SpectrumModel& model, int target, double duration, int steps = 0);

// -(K-1) eps0 sin(pi t / T): starts and ends at lambda_0 = 0, bending away
// from the crossings instead of towards them.
ControlField sinusoidal_guess(const SpectrumModel& model, int target, double duration,
                              int steps = 0);

struct RwaFieldParams {
  double switch_time = 0.0;  // t_m
  double amplitude = 0.0;    // lambda_A
  double omega = 0.0;        // angular frequency
  double phase = 0.0;        // phi, first stage
  double phase2 = 0.0;       // phi~, second stage
};

// t_m split proportionally to the sudden-switch stage durations.
double default_switch_time(const SpectrumModel& model, double duration);

// lambda_A cos(w t + phi) on [0, t_m); eps0 + lambda_A cos(w (t - t_m) + phi~)
// on [t_m, T]. Throws std::invalid_argument unless 0 < t_m < T.
double rwa_field_value(const SpectrumModel& model, const RwaFieldParams& p, double t);
ControlField rwa_field(const SpectrumModel& model, double duration, const RwaFieldParams& params,
                       int steps = 0);

struct FrequencyReport {
  double frequency = 0.0;  // f_eps, cycles per unit time
  double amplitude = 0.0;  // A_max = max |field - baseline|
  bool constant = false;   // field had no oscillating content
  std::vector<double> baseline;
};

// Least-squares piecewise-constant fit with the given number of plateaus.
std::vector<double> plateau_baseline(std::span<const double> values, int plateaus);

// Dominant non-zero frequency of field - baseline, located on a 4x zero-padded
// DFT grid and refined on the continuous transform.
FrequencyReport dominant_frequency(const ControlField& field, int plateaus = 1);

// CSV: "# grid duration=<T> steps=<M>", header "t[time],lambda[energy]", one row
// per slice (slice start time). Round-trips bit-exactly.
void write_field_csv(std::ostream& os, const ControlField& field);
ControlField read_field_csv(std::istream& is);

}  // namespace multiac
