#include "multiac/propagator.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "multiac/csv.hpp"
#include "multiac/errors.hpp"

namespace multiac {

namespace {

void check_state(const SpectrumModel& model, const ComplexVector& psi, const char* who) {
  if (psi.size() != model.levels()) {
    std::ostringstream os;
    os << who << ": state has " << psi.size() << " amplitudes, model has " << model.levels()
       << " levels";
    throw std::invalid_argument(os.str());
  }
  const double defect = std::abs(psi.norm() - 1.0);
  if (!(defect <= default_tolerances().state_norm)) {
    std::ostringstream os;
    os << who << ": state is not normalized (| |psi| - 1 | = " << defect << ")";
    throw std::invalid_argument(os.str());
  }
}

std::vector<double> populations_of(const ComplexVector& psi) {
  std::vector<double> p(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) p[i] = std::norm(psi(i));
  return p;
}

void slice_basis(const SpectrumModel& model, double lambda, double shift, RealEigenbasis& basis) {
  std::array<double, kMaxLevels> diag{};
  model.diagonal(lambda, diag);
  const int n = model.levels();
  for (int i = 0; i < n; ++i) diag[i] += shift;
  tridiagonal_eigh(std::span<const double>(diag.data(), n), model.couplings(), basis);
}

StateTrajectory run(const SpectrumModel& model, const ControlField& field,
                    const ComplexVector& psi, Direction direction, double shift) {
  check_state(model, psi, "propagate");
  const auto& grid = field.grid();
  const int m = grid.steps();
  const double dt = grid.dt();
  StateTrajectory traj{grid, std::vector<ComplexVector>(m + 1), {}};
  ComplexVector cur = psi;
  RealEigenbasis basis;
  std::span<Complex> amps(cur.data(), cur.size());
  if (direction == Direction::Forward) {
    traj.states[0] = cur;
    for (int k = 0; k < m; ++k) {
      slice_basis(model, field[k], shift, basis);
      apply_step(basis, dt, amps);
      traj.states[k + 1] = cur;
    }
  } else {
    traj.states[m] = cur;
    for (int k = m - 1; k >= 0; --k) {
      slice_basis(model, field[k], shift, basis);
      apply_step(basis, -dt, amps);
      traj.states[k] = cur;
    }
  }
  traj.populations.reserve(m + 1);
  const double tol = 10.0 * default_tolerances().state_norm;
  for (const auto& s : traj.states) {
    if (std::abs(s.norm() - 1.0) > tol) {
      throw InvariantViolation("propagate: norm drifted beyond tolerance");
    }
    traj.populations.push_back(populations_of(s));
  }
  return traj;
}

}  // namespace

StateTrajectory propagate(const SpectrumModel& model, const ControlField& field,
                          const ComplexVector& psi, Direction direction) {
  return run(model, field, psi, direction, 0.0);
}

StateTrajectory propagate_shifted(const SpectrumModel& model, const ControlField& field,
                                  const ComplexVector& psi, double shift) {
  return run(model, field, psi, Direction::Forward, shift);
}

ComplexVector evolve(const SpectrumModel& model, const ControlField& field,
                     const ComplexVector& psi0) {
  check_state(model, psi0, "evolve");
  ComplexVector cur = psi0;
  RealEigenbasis basis;
  std::span<Complex> amps(cur.data(), cur.size());
  const double dt = field.grid().dt();
  for (int k = 0; k < field.size(); ++k) {
    slice_basis(model, field[k], 0.0, basis);
    apply_step(basis, dt, amps);
  }
  return cur;
}

double fidelity(const ComplexVector& psi, const ComplexVector& goal) {
  return std::norm(inner(goal, psi));
}

double forward_backward_consistency(const SpectrumModel& model, const ControlField& field,
                                    const ComplexVector& psi0) {
  const auto fwd = propagate(model, field, psi0, Direction::Forward);
  const auto bwd = propagate(model, field, fwd.final_state(), Direction::Backward);
  return (bwd.states.front() - psi0).norm();
}

void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj) {
  const std::size_t n = traj.populations.empty() ? 0 : traj.populations.front().size();
  std::vector<std::string> names{"t[time]"};
  for (std::size_t i = 0; i < n; ++i) names.push_back("P_" + std::to_string(i) + "[1]");
  csv::write_header(os, names);
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.populations.size(); ++k) {
    row.assign(1, traj.grid.start(static_cast<int>(k)));
    row.insert(row.end(), traj.populations[k].begin(), traj.populations[k].end());
    csv::write_row(os, row);
  }
}

}  // namespace multiac
