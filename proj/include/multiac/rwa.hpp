#pragma once

// Rotating-wave solution of the three-level, two-crossing transfer |0> -> |2>
// driven by the two-plateau oscillatory field (see rwa_field()).
//
// Each stage is moved to the interaction picture of the diagonal part H_D,
// the couplings are expanded with exp(i z sin g) = sum_n J_n(z) exp(i n g),
// and only the resonant Fourier term of every coupling is kept:
//
//   stage 1 (lambda ~ 0):    |0>-|1> keeps n = 0 -> J_0(z) delta_0
//                            |1>-|2> keeps n = 1 -> J_1(z) delta_1
//   stage 2 (lambda ~ eps0): |0>-|1> keeps n = -1 -> -J_1(z) delta_0
//                            |1>-|2> keeps n = 0 -> J_0(z) delta_1
//
// with z = lambda_A / omega. A residual detuning eps0 - omega is absorbed in a
// diagonal frame rotation, so the effective generator stays time independent.

#include <utility>
#include <vector>

#include "multiac/fields.hpp"
#include "multiac/linalg.hpp"
#include "multiac/model.hpp"
#include "multiac/propagator.hpp"

namespace multiac {

// Bessel function of the first kind. Ascending series for moderate arguments;
// for x > 20 and n <= x, Hankel asymptotics for J_0, J_1 and upward recurrence.
double bessel_j(int n, double x);

enum class Stage { First, Second };

struct RwaParameters {
  double amplitude = 0.0;    // lambda_A
  double omega = 0.0;        // drive frequency, eps0 at resonance
  double phase = 0.0;        // phi
  double phase2 = 0.0;       // phi~
  double switch_time = 0.0;  // t_m
  double duration = 0.0;     // T

  // phi_0 = (lambda_A / omega) sin phi and its second-stage analogue.
  double phi0() const;
  double phi0_tilde() const;
  RwaFieldParams field() const;
};

// Resonant defaults: omega = eps0, phases 0, t_m = default_switch_time().
RwaParameters default_rwa_parameters(const SpectrumModel& model, double duration,
                                     double amplitude);

// Stage 1: (J_0(a/w) d0, J_1(a/w) d1); stage 2: (J_1(a/w) d0, J_0(a/w) d1).
std::pair<double, double> renormalized_rates(double amplitude, double omega,
                                             std::span<const double> deltas, Stage stage);

// Time-independent 3x3 generator of the stage in its rotating frame. Throws
// std::invalid_argument unless the model has three levels.
HermitianMatrix effective_hamiltonian(const SpectrumModel& model, const RwaParameters& params,
                                      Stage stage);

// U(t) = U_A(t) U_B(t) for t < t_m, and U_A1(t) U_B1(t) U_A(t_m) U_B(t_m) after.
// Throws std::out_of_range for t outside [0, T].
UnitaryMatrix analytic_propagator(const SpectrumModel& model, const RwaParameters& params,
                                  double t);

struct CalibrationOptions {
  int scan_points = 121;     // amplitude samples inside (0, 2.405) eps0
  // Stage phases (phi, phi~) are profiled out on a phase_points^2 grid at
  // every amplitude. With optimize_phases false they stay at 0.
  bool optimize_phases = true;
  int phase_points = 16;
};

struct AmplitudeCalibration {
  double amplitude = 0.0;  // lambda_A
  double ratio = 0.0;      // lambda_A / eps0
  double phase = 0.0;      // phi at the optimum
  double phase2 = 0.0;     // phi~ at the optimum
  double fidelity = 0.0;   // analytic |<2|U(T)|0>|^2 at the optimum
  double fidelity_at_zero = 0.0;
  bool flat = false;       // objective did not vary over the scan
  std::vector<std::pair<double, double>> scan;  // (ratio, best fidelity at that ratio)

  // Resonant parameters at the optimum.
  RwaParameters parameters(const SpectrumModel& model, double duration, double switch_time) const;
};

// Scans lambda_A / eps0 over (0, 2.405) for the highest analytic transfer
// fidelity to |2>, then refines amplitude and phases by golden section.
AmplitudeCalibration calibrate_amplitude(const SpectrumModel& model, double duration,
                                         double switch_time, const CalibrationOptions& options = {});

struct RwaComparison {
  TimeGrid grid;
  std::vector<std::vector<double>> analytic;  // populations at grid.start(k), k = 0..M
  std::vector<std::vector<double>> numeric;
  double max_deviation = 0.0;
  double final_fidelity_analytic = 0.0;
  double final_fidelity_numeric = 0.0;
};

// Populations from the analytic propagator and from exact propagation under
// the sampled field, starting in |0>. steps == 0 picks default_steps().
RwaComparison compare_rwa(const SpectrumModel& model, const RwaParameters& params, int steps = 0);

// CSV header t[time],P_n_analytic[1]...,P_n_numeric[1]...
void write_comparison_csv(std::ostream& os, const RwaComparison& cmp);

}  // namespace multiac
