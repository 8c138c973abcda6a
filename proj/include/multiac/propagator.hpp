#pragma once

#include <iosfwd>
#include <vector>

#include "multiac/fields.hpp"
#include "multiac/linalg.hpp"
#include "multiac/model.hpp"

namespace multiac {

enum class Direction { Forward, Backward };

struct StateTrajectory {
  TimeGrid grid;
  std::vector<ComplexVector> states;       // steps + 1 entries, physical time order
  std::vector<std::vector<double>> populations;

  const ComplexVector& final_state() const { return states.back(); }
};

// Exact piecewise-constant propagation: slice k applies exp(-i H(lambda_k) dt).
// Forward starts from psi at t = 0; Backward starts from psi at t = T and
// evolves towards t = 0. Throws std::invalid_argument if psi is not
// normalized or its dimension does not match the model.
StateTrajectory propagate(const SpectrumModel& model, const ControlField& field,
                          const ComplexVector& psi, Direction direction = Direction::Forward);

// Final state only.
ComplexVector evolve(const SpectrumModel& model, const ControlField& field,
                     const ComplexVector& psi0);

// Same as propagate() with every diagonal entry of H shifted by `shift`.
StateTrajectory propagate_shifted(const SpectrumModel& model, const ControlField& field,
                                  const ComplexVector& psi, double shift);

// |<goal|psi>|^2
double fidelity(const ComplexVector& psi, const ComplexVector& goal);

// || U^dagger(T) U(T) psi0 - psi0 || using a forward then a backward pass.
double forward_backward_consistency(const SpectrumModel& model, const ControlField& field,
                                    const ComplexVector& psi0);

// CSV header t[time],P_0[1]..P_{N-1}[1].
void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj);

}  // namespace multiac
