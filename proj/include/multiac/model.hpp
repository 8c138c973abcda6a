#pragma once

// The multi-avoided-crossing Hamiltonian family
//
//   H_N(lambda) = sum_n (lambda - n eps0) |2n><2n| + sum_n n eps0 |2n+1><2n+1|
//               + sum_n (delta_n / 2) (|n><n+1| + |n+1><n|)
//
// in the diabatic basis |0>..|N-1>. Adjacent diabatic states |n>,|n+1> cross
// at lambda_n = n * eps0 with gap ~delta_n; all other crossings are exact.

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multiac/linalg.hpp"

namespace multiac {

class SpectrumModel {
 public:
  // Throws std::invalid_argument unless 2 <= levels <= kMaxLevels,
  // deltas.size() == levels - 1, deltas >= 0 and eps0 >= 0.
  SpectrumModel(int levels, double epsilon0, std::vector<double> deltas);

  // All gaps equal to delta.
  static SpectrumModel uniform(int levels, double epsilon0, double delta);

  int levels() const { return levels_; }
  double epsilon0() const { return epsilon0_; }
  const std::vector<double>& deltas() const { return deltas_; }

  // Position lambda_n = n * eps0 of the n-th avoided crossing.
  double crossing(int n) const { return n * epsilon0_; }

  // Diagonal of H_N(lambda) written into out (size levels()).
  void diagonal(double lambda, std::span<double> out) const;
  // Off-diagonal couplings delta_n / 2 (size levels() - 1).
  std::span<const double> couplings() const { return couplings_; }

  // d H_N / d lambda: 1 on even diabatic states, 0 on odd ones.
  bool is_controlled(int level) const { return level % 2 == 0; }

  // Sudden-switch duration T_S^(K) = sum_{n<K} pi / delta_n.
  double sudden_switch_time(int k) const;

 private:
  int levels_;
  double epsilon0_;
  std::vector<double> deltas_;
  std::vector<double> couplings_;
};

HermitianMatrix hamiltonian(const SpectrumModel& model, double lambda);

struct HamiltonianParts {
  HermitianMatrix diagonal;     // H_D(lambda): all lambda dependence
  HermitianMatrix off_diagonal;  // H_ND: the delta_n / 2 couplings
};

HamiltonianParts split(const SpectrumModel& model, double lambda);

struct AvoidedCrossing {
  int index = 0;          // n: couples |n> and |n+1>
  double lambda = 0.0;    // location of the minimum gap
  double gap = 0.0;       // refined minimum adjacent-eigenvalue difference
  double grid_gap = 0.0;  // minimum over the sampled grid near lambda_n
};

struct SpectrumScan {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> energies;  // ascending per lambda
  std::vector<AvoidedCrossing> crossings;
  // Set when the grid does not cover [-eps0, (N-1) eps0].
  bool incomplete_coverage = false;
};

// Throws std::invalid_argument on an empty or non-ascending grid.
SpectrumScan scan_spectrum(const SpectrumModel& model, std::span<const double> lambda_grid);

// CSV with header lambda,E_0..E_{N-1}.
void write_spectrum_csv(std::ostream& os, const SpectrumScan& scan);

}  // namespace multiac
