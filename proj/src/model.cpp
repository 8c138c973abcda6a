#include "multiac/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "multiac/csv.hpp"

namespace multiac {

SpectrumModel::SpectrumModel(int levels, double epsilon0, std::vector<double> deltas)
    : levels_(levels), epsilon0_(epsilon0), deltas_(std::move(deltas)) {
  if (levels_ < 2 || levels_ > kMaxLevels) {
    std::ostringstream os;
    os << "SpectrumModel: level count " << levels_ << " outside [2, " << kMaxLevels << "]";
    throw std::invalid_argument(os.str());
  }
  if (static_cast<int>(deltas_.size()) != levels_ - 1) {
    std::ostringstream os;
    os << "SpectrumModel: expected " << levels_ - 1 << " gap parameters, got " << deltas_.size();
    throw std::invalid_argument(os.str());
  }
  if (!(epsilon0_ >= 0.0) || !std::isfinite(epsilon0_)) {
    throw std::invalid_argument("SpectrumModel: eps0 must be finite and >= 0");
  }
  for (double d : deltas_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("SpectrumModel: gap parameters must be finite and >= 0");
    }
  }
  couplings_.resize(deltas_.size());
  std::transform(deltas_.begin(), deltas_.end(), couplings_.begin(),
                 [](double d) { return 0.5 * d; });
}

SpectrumModel SpectrumModel::uniform(int levels, double epsilon0, double delta) {
  return SpectrumModel(levels, epsilon0, std::vector<double>(std::max(levels - 1, 0), delta));
}

void SpectrumModel::diagonal(double lambda, std::span<double> out) const {
  for (int i = 0; i < levels_; ++i) {
    const int n = i / 2;
    out[i] = (i % 2 == 0) ? lambda - n * epsilon0_ : n * epsilon0_;
  }
}

double SpectrumModel::sudden_switch_time(int k) const {
  if (k < 1 || k > levels_ - 1) {
    std::ostringstream os;
    os << "sudden_switch_time: target level " << k << " outside [1, " << levels_ - 1 << "]";
    throw std::out_of_range(os.str());
  }
  double total = 0.0;
  for (int n = 0; n < k; ++n) {
    if (deltas_[n] <= 0.0) throw std::invalid_argument("sudden_switch_time: zero gap on path");
    total += std::numbers::pi / deltas_[n];
  }
  return total;
}

HermitianMatrix hamiltonian(const SpectrumModel& model, double lambda) {
  const auto parts = split(model, lambda);
  return parts.diagonal + parts.off_diagonal;
}

HamiltonianParts split(const SpectrumModel& model, double lambda) {
  const int n = model.levels();
  std::array<double, kMaxLevels> diag{};
  model.diagonal(lambda, diag);
  ComplexMatrix hd = ComplexMatrix::Zero(n, n);
  ComplexMatrix hnd = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) hd(i, i) = diag[i];
  const auto c = model.couplings();
  for (int i = 0; i + 1 < n; ++i) {
    hnd(i, i + 1) = c[i];
    hnd(i + 1, i) = c[i];
  }
  return {HermitianMatrix(std::move(hd)), HermitianMatrix(std::move(hnd))};
}

namespace {

void eigenvalues_at(const SpectrumModel& model, double lambda, RealEigenbasis& basis) {
  std::array<double, kMaxLevels> diag{};
  model.diagonal(lambda, diag);
  const int n = model.levels();
  tridiagonal_eigh(std::span<const double>(diag.data(), n), model.couplings(), basis);
}

// Index i of the adjacent eigenvalue pair (i, i+1) that forms crossing n.
int crossing_pair(const SpectrumModel& model, int n) {
  const double lam = model.crossing(n);
  std::array<double, kMaxLevels> diag{};
  model.diagonal(lam, diag);
  const double target = diag[n];  // == diag[n+1] at the crossing
  RealEigenbasis basis;
  eigenvalues_at(model, lam, basis);
  int best = 0;
  double best_dist = INFINITY;
  for (int i = 0; i + 1 < model.levels(); ++i) {
    const double dist = std::abs(0.5 * (basis.energies[i] + basis.energies[i + 1]) - target);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

double pair_gap(const SpectrumModel& model, double lambda, int pair) {
  RealEigenbasis basis;
  eigenvalues_at(model, lambda, basis);
  return basis.energies[pair + 1] - basis.energies[pair];
}

}  // namespace

SpectrumScan scan_spectrum(const SpectrumModel& model, std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("scan_spectrum: empty lambda grid");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) {
      throw std::invalid_argument("scan_spectrum: lambda grid must be strictly ascending");
    }
  }
  const int n = model.levels();
  SpectrumScan scan;
  scan.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  scan.energies.reserve(lambda_grid.size());
  RealEigenbasis basis;
  for (double lam : lambda_grid) {
    eigenvalues_at(model, lam, basis);
    scan.energies.emplace_back(basis.energies.begin(), basis.energies.begin() + n);
  }
  const double eps0 = model.epsilon0();
  scan.incomplete_coverage =
      lambda_grid.front() > -eps0 || lambda_grid.back() < (n - 1) * eps0;

  double max_delta = 0.0;
  for (double d : model.deltas()) max_delta = std::max(max_delta, d);
  const double half_width = eps0 > 0.0 ? 0.25 * eps0 : 2.0 * max_delta + 1.0;

  for (int ac = 0; ac + 1 < n; ++ac) {
    const double center = model.crossing(ac);
    const int pair = crossing_pair(model, ac);
    AvoidedCrossing out;
    out.index = ac;
    out.grid_gap = INFINITY;
    double grid_lambda = center;
    for (std::size_t j = 0; j < scan.lambdas.size(); ++j) {
      if (std::abs(scan.lambdas[j] - center) > half_width) continue;
      const double g = scan.energies[j][pair + 1] - scan.energies[j][pair];
      if (g < out.grid_gap) {
        out.grid_gap = g;
        grid_lambda = scan.lambdas[j];
      }
    }
    // Golden-section refinement on [center - w, center + w].
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = center - half_width, b = center + half_width;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = pair_gap(model, x1, pair), f2 = pair_gap(model, x2, pair);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(center)); ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = pair_gap(model, x1, pair);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = pair_gap(model, x2, pair);
      }
    }
    out.lambda = 0.5 * (a + b);
    out.gap = pair_gap(model, out.lambda, pair);
    if (!std::isfinite(out.grid_gap)) {
      out.grid_gap = out.gap;
    } else if (out.grid_gap < out.gap) {
      out.gap = out.grid_gap;
      out.lambda = grid_lambda;
    }
    scan.crossings.push_back(out);
  }
  return scan;
}

void write_spectrum_csv(std::ostream& os, const SpectrumScan& scan) {
  std::vector<std::string> names{"lambda[energy]"};
  const std::size_t n = scan.energies.empty() ? 0 : scan.energies.front().size();
  for (std::size_t k = 0; k < n; ++k) names.push_back("E_" + std::to_string(k) + "[energy]");
  csv::write_header(os, names);
  std::vector<double> row;
  for (std::size_t j = 0; j < scan.lambdas.size(); ++j) {
    row.assign(1, scan.lambdas[j]);
    row.insert(row.end(), scan.energies[j].begin(), scan.energies[j].end());
    csv::write_row(os, row);
  }
}

}  // namespace multiac
