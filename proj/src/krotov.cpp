#include "multiac/krotov.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "multiac/csv.hpp"
#include "multiac/errors.hpp"
#include "multiac/kernels.hpp"
#include "multiac/propagator.hpp"

namespace multiac {

HermitianMatrix control_hamiltonian(const SpectrumModel& model) {
  const int n = model.levels();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = model.is_controlled(i) ? 1.0 : 0.0;
  return HermitianMatrix(std::move(h));
}

std::vector<double> constant_alpha(const TimeGrid& grid, double alpha0) {
  return std::vector<double>(grid.steps(), alpha0);
}

std::vector<double> endpoint_pinned_alpha(const TimeGrid& grid, double alpha0,
                                          double width_fraction, double factor) {
  std::vector<double> alpha(grid.steps());
  const double width = width_fraction * grid.duration();
  for (int k = 0; k < grid.steps(); ++k) {
    const double t = grid.midpoint(k);
    const double edge = std::min(t, grid.duration() - t);
    double w = 0.0;
    if (width > 0.0 && edge < width) {
      const double x = 1.0 - edge / width;
      w = x * x * (3.0 - 2.0 * x);  // smoothstep
    }
    alpha[k] = alpha0 * (1.0 + (factor - 1.0) * w);
  }
  return alpha;
}

namespace {

void validate(const OptimizationProblem& p) {
  const int n = p.model.levels();
  if (p.initial.size() != n || p.goal.size() != n) {
    throw std::invalid_argument("optimize: state dimensions do not match the model");
  }
  const double tol = default_tolerances().state_norm;
  if (std::abs(p.initial.norm() - 1.0) > tol || std::abs(p.goal.norm() - 1.0) > tol) {
    throw std::invalid_argument("optimize: initial and goal states must be normalized");
  }
  if (std::abs(p.duration - p.guess.grid().duration()) > 1e-12 * std::max(1.0, p.duration)) {
    throw std::invalid_argument("optimize: guess grid does not span [0, T]");
  }
  if (static_cast<int>(p.alpha.size()) != p.guess.size()) {
    throw std::invalid_argument("optimize: alpha must have one weight per slice");
  }
  for (double a : p.alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("optimize: alpha must be positive everywhere");
    }
  }
  if (p.max_iters < 0) throw std::invalid_argument("optimize: max_iters < 0");
}

// Eigenbases of every slice, flat: energies then column-major vectors.
class SliceBases {
 public:
  SliceBases(int levels, int slices)
      : n_(levels), stride_(levels + levels * levels), data_(std::size_t(stride_) * slices) {}

  void store(int k, const RealEigenbasis& b) {
    double* dst = &data_[std::size_t(k) * stride_];
    for (int i = 0; i < n_; ++i) dst[i] = b.energies[i];
    for (int i = 0; i < n_ * n_; ++i) dst[n_ + i] = b.vectors[i];
  }

  // psi <- V exp(-i E dt) V^T psi
  void apply(int k, double dt, Complex* psi) const {
    const double* e = &data_[std::size_t(k) * stride_];
    const double* v = e + n_;
    std::array<Complex, kMaxLevels> tmp;
    for (int j = 0; j < n_; ++j) {
      const double* vj = v + j * n_;
      double re = 0.0, im = 0.0;
      for (int i = 0; i < n_; ++i) {
        re += vj[i] * psi[i].real();
        im += vj[i] * psi[i].imag();
      }
      const double ph = -e[j] * dt;
      const double c = std::cos(ph), s = std::sin(ph);
      tmp[j] = Complex(c * re - s * im, s * re + c * im);
    }
    for (int i = 0; i < n_; ++i) psi[i] = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double* vj = v + j * n_;
      for (int i = 0; i < n_; ++i) psi[i] += vj[i] * tmp[j];
    }
  }

 private:
  int n_;
  int stride_;
  std::vector<double> data_;
};

}  // namespace

OptimizationRecord optimize(const OptimizationProblem& problem,
                            const IterationCallback& on_iteration) {
  validate(problem);
  const SpectrumModel& model = problem.model;
  const int n = model.levels();
  const int m = problem.guess.size();
  const double dt = problem.guess.grid().dt();
  const auto couplings = model.couplings();

  std::vector<double> field(problem.guess.values().begin(), problem.guess.values().end());
  std::vector<double> inv_alpha(m);
  for (int k = 0; k < m; ++k) inv_alpha[k] = 1.0 / problem.alpha[k];

  SliceBases bases(n, m);
  std::vector<Complex> chi(std::size_t(n) * (m + 1));
  std::array<Complex, kMaxLevels> psi{};
  std::array<double, kMaxLevels> diag{};
  RealEigenbasis basis;

  const ComplexVector& goal = problem.goal;
  auto overlap_with_goal = [&]() {
    Complex ov = 0.0;
    for (int i = 0; i < n; ++i) ov += std::conj(goal(i)) * psi[i];
    return ov;
  };
  auto reset_psi = [&]() {
    for (int i = 0; i < n; ++i) psi[i] = problem.initial(i);
  };
  auto step_slice = [&](int k) {
    model.diagonal(field[k], diag);
    tridiagonal_eigh(std::span<const double>(diag.data(), n), couplings, basis);
    bases.store(k, basis);
    bases.apply(k, dt, psi.data());
  };
  auto energy = [&]() {
    return kernels::weighted_sum_squares(problem.alpha, field) * dt;
  };

  OptimizationRecord rec{{}, {}, problem.guess, 0, false, false};
  reset_psi();
  for (int k = 0; k < m; ++k) step_slice(k);
  Complex ov = overlap_with_goal();
  rec.infidelities.push_back(1.0 - std::norm(ov));
  rec.field_energy.push_back(energy());
  if (rec.infidelities.back() < problem.threshold) rec.converged = true;

  int flat = 0;
  for (int it = 1; it <= problem.max_iters && !rec.converged; ++it) {
    // chi(T) = P psi(T), evolved backwards under the current field.
    Complex* c_last = &chi[std::size_t(n) * m];
    for (int i = 0; i < n; ++i) c_last[i] = ov * goal(i);
    for (int k = m - 1; k >= 0; --k) {
      Complex* dst = &chi[std::size_t(n) * k];
      const Complex* src = dst + n;
      for (int i = 0; i < n; ++i) dst[i] = src[i];
      bases.apply(k, -dt, dst);
    }

    // Forward sweep with the immediate update.
    reset_psi();
    double max_update = 0.0;
    for (int k = 0; k < m; ++k) {
      const Complex* c = &chi[std::size_t(n) * k];
      double im = 0.0;
      for (int i = 0; i < n; i += 2) im += std::imag(std::conj(c[i]) * psi[i]);
      const double update = inv_alpha[k] * im;
      field[k] += update;
      max_update = std::max(max_update, std::abs(update));
      step_slice(k);
    }
    ov = overlap_with_goal();
    const double infid = 1.0 - std::norm(ov);
    const double previous = rec.infidelities.back();
    rec.infidelities.push_back(infid);
    rec.field_energy.push_back(energy());
    rec.iterations_used = it;
    if (on_iteration) on_iteration(it, infid);

    if (!std::isfinite(infid)) throw InvariantViolation("optimize: infidelity is not finite");
    if (problem.monotonic_tolerance >= 0.0 && infid > previous + problem.monotonic_tolerance) {
      std::ostringstream os;
      os << "optimize: infidelity rose from " << previous << " to " << infid << " at iteration "
         << it << " (alpha too small for this grid?)";
      throw InvariantViolation(os.str());
    }
    if (infid < problem.threshold) rec.converged = true;
    flat = (max_update == 0.0) ? flat + 1 : 0;
    if (flat >= problem.stall_window) {
      rec.stalled = true;
      break;
    }
  }
  rec.final_field = ControlField(problem.guess.grid(), std::move(field));
  return rec;
}

void write_record_csv(std::ostream& os, const OptimizationRecord& record) {
  csv::write_header(os, {"iteration", "infidelity[1]", "field_energy[energy^2*time]"});
  for (std::size_t m = 0; m < record.infidelities.size(); ++m) {
    csv::write_row(os, {static_cast<double>(m), record.infidelities[m], record.field_energy[m]});
  }
}

}  // namespace multiac
