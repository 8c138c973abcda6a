#pragma once

// First-order Krotov optimization of a single real control for state-to-state
// transfer, with the field updated in place during each forward sweep.

#include <functional>
#include <iosfwd>
#include <vector>

#include "multiac/fields.hpp"
#include "multiac/linalg.hpp"
#include "multiac/model.hpp"

namespace multiac {

// H_i = dH_N / dlambda = sum_n |2n><2n|.
HermitianMatrix control_hamiltonian(const SpectrumModel& model);

// Constant weight alpha0 on every slice.
std::vector<double> constant_alpha(const TimeGrid& grid, double alpha0);

// alpha0 everywhere, raised smoothly to factor * alpha0 within
// width_fraction * T of both ends. Large weights freeze the field there.
std::vector<double> endpoint_pinned_alpha(const TimeGrid& grid, double alpha0,
                                          double width_fraction, double factor);

struct OptimizationProblem {
  SpectrumModel model;
  ComplexVector initial;
  ComplexVector goal;
  double duration = 0.0;       // must match guess.grid().duration()
  std::vector<double> alpha;   // one weight per slice, all > 0
  ControlField guess;
  int max_iters = 10000;
  double threshold = 1e-4;     // converged once infidelity < threshold
  // Infidelity may rise by at most this much per iteration before the run
  // is aborted with InvariantViolation. Negative disables the check.
  double monotonic_tolerance = 1e-9;
  // Iterations with an identically zero update before a run is flagged stalled.
  int stall_window = 50;
};

struct OptimizationRecord {
  // infidelities[0] belongs to the guess, infidelities[m] to iteration m.
  std::vector<double> infidelities;
  // Penalty integral  int alpha lambda^2 dt  of the field after each entry above.
  std::vector<double> field_energy;
  ControlField final_field;
  int iterations_used = 0;
  bool converged = false;
  bool stalled = false;

  double final_infidelity() const { return infidelities.back(); }
};

using IterationCallback = std::function<void(int iteration, double infidelity)>;

// Throws std::invalid_argument on inconsistent dimensions, a non-positive
// alpha or a duration mismatch.
OptimizationRecord optimize(const OptimizationProblem& problem,
                            const IterationCallback& on_iteration = {});

// CSV with header iteration,infidelity[1],field_energy[energy^2*time].
void write_record_csv(std::ostream& os, const OptimizationRecord& record);

}  // namespace multiac
