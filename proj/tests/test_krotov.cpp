#include <doctest.h>

#include <numbers>
#include <sstream>

#include "multiac/errors.hpp"
#include "multiac/krotov.hpp"
#include "multiac/propagator.hpp"

using namespace multiac;

namespace {

OptimizationProblem problem_for(const SpectrumModel& m, int target, double ratio, double alpha,
                                int iters, int steps = 600) {
  const double T = ratio * m.sudden_switch_time(target);
  ControlField guess = initial_guess(m, target, T, {}, steps);
  OptimizationProblem p{m,
                        basis_state(m.levels(), 0),
                        basis_state(m.levels(), target),
                        T,
                        constant_alpha(guess.grid(), alpha),
                        guess};
  p.max_iters = iters;
  return p;
}

}  // namespace

TEST_CASE("control Hamiltonian is the projector on even levels") {
  const HermitianMatrix h = control_hamiltonian(SpectrumModel::uniform(5, 10.0, 1.0));
  for (int i = 0; i < 5; ++i) CHECK(h(i, i) == Complex(i % 2 == 0 ? 1.0 : 0.0, 0.0));
}

TEST_CASE("alpha profiles") {
  const TimeGrid g(10.0, 1000);
  const auto c = constant_alpha(g, 0.5);
  CHECK(c.size() == 1000);
  CHECK(c[17] == 0.5);
  const auto e = endpoint_pinned_alpha(g, 1.0, 0.1, 50.0);
  CHECK(e[0] > 45.0);
  CHECK(e[999] > 45.0);
  CHECK(e[500] == 1.0);
}

TEST_CASE("the guess entry equals the infidelity of the propagated guess") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  const OptimizationProblem p = problem_for(m, 2, 0.95, 1.0, 3);
  const OptimizationRecord rec = optimize(p);
  const double f = fidelity(evolve(m, p.guess, p.initial), p.goal);
  CHECK(rec.infidelities[0] == doctest::Approx(1.0 - f).epsilon(1e-12));
  CHECK(rec.infidelities.size() == 4);
  CHECK(rec.field_energy.size() == 4);
  CHECK(rec.iterations_used == 3);
}

TEST_CASE("infidelity is monotone non-increasing within 1e-9") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  for (double ratio : {0.85, 0.95, 1.05}) {
    const OptimizationRecord rec = optimize(problem_for(m, 2, ratio, 1.0, 300));
    for (std::size_t k = 1; k < rec.infidelities.size(); ++k) {
      CHECK(rec.infidelities[k] <= rec.infidelities[k - 1] + 1e-9);
    }
  }
}

TEST_CASE("two-level transfer converges at T = pi / delta") {
  const SpectrumModel m = SpectrumModel::uniform(2, 10.0, 1.0);
  const OptimizationRecord rec = optimize(problem_for(m, 1, 1.0, 1.0, 5000));
  CHECK(rec.converged);
  CHECK(rec.final_infidelity() < 1e-4);
  CHECK_FALSE(rec.stalled);
}

TEST_CASE("a vanishing gradient is reported as a stall") {
  // |1> is not coupled to anything when the gaps vanish, and carries no
  // control weight, so every update is exactly zero.
  const SpectrumModel m(2, 10.0, {0.0});
  ControlField guess(TimeGrid(1.0, 100), std::vector<double>(100, 0.0));
  OptimizationProblem p{m, basis_state(2, 1), basis_state(2, 0), 1.0,
                        constant_alpha(guess.grid(), 1.0), guess};
  p.max_iters = 1000;
  p.stall_window = 20;
  const OptimizationRecord rec = optimize(p);
  CHECK(rec.stalled);
  CHECK_FALSE(rec.converged);
  CHECK(rec.iterations_used == 20);
}

TEST_CASE("optimize validates its problem") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  OptimizationProblem p = problem_for(m, 2, 1.0, 1.0, 1);
  auto bad = p;
  bad.alpha[3] = 0.0;
  CHECK_THROWS_AS(optimize(bad), std::invalid_argument);
  bad = p;
  bad.alpha.pop_back();
  CHECK_THROWS_AS(optimize(bad), std::invalid_argument);
  bad = p;
  bad.duration *= 2.0;
  CHECK_THROWS_AS(optimize(bad), std::invalid_argument);
  bad = p;
  bad.goal = basis_state(2, 1);
  CHECK_THROWS_AS(optimize(bad), std::invalid_argument);
  bad = p;
  bad.initial *= 2.0;
  CHECK_THROWS_AS(optimize(bad), std::invalid_argument);
}

TEST_CASE("a tiny alpha on a coarse grid trips the monotonicity guard") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  OptimizationProblem p = problem_for(m, 2, 0.9, 1e-4, 50, 200);
  CHECK_THROWS_AS(optimize(p), InvariantViolation);
  p.monotonic_tolerance = -1.0;  // guard disabled
  CHECK_NOTHROW(optimize(p));
}

TEST_CASE("record CSV") {
  const SpectrumModel m = SpectrumModel::uniform(2, 10.0, 1.0);
  std::ostringstream os;
  write_record_csv(os, optimize(problem_for(m, 1, 1.0, 1.0, 2)));
  const std::string s = os.str();
  CHECK(s.rfind("iteration,infidelity[1],field_energy[energy^2*time]\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
