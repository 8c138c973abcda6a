#pragma once

// Dense complex linear algebra for the small Hermitian problems used
// throughout the library (N <= kMaxLevels).

#include <array>
#include <complex>
#include <span>

#include <Eigen/Dense>

namespace multiac {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr int kMaxLevels = 16;

struct Tolerances {
  double hermitian = 1e-12;  // max |H - H^dagger| entry
  double unitary = 1e-10;    // ||U^dagger U - I||_F
  double state_norm = 1e-10; // | ||psi|| - 1 |
};

// Process-wide defaults; the CLI overwrites them from configuration.
Tolerances& default_tolerances();

bool is_hermitian(const ComplexMatrix& m, double tol);
double unitarity_defect(const ComplexMatrix& u);

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // Throws std::invalid_argument naming the worst asymmetric entry.
  explicit HermitianMatrix(ComplexMatrix m);
  HermitianMatrix(ComplexMatrix m, double tol);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  // Adds c * identity.
  HermitianMatrix shifted(double c) const;

 private:
  ComplexMatrix m_;
};

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  // Throws InvariantViolation when ||U^dagger U - I||_F exceeds tol.
  explicit UnitaryMatrix(ComplexMatrix m);
  UnitaryMatrix(ComplexMatrix m, double tol);
  static UnitaryMatrix identity(Eigen::Index n);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  UnitaryMatrix operator*(const UnitaryMatrix& o) const;
  ComplexVector operator*(const ComplexVector& v) const { return m_ * v; }
  UnitaryMatrix adjoint() const;

 private:
  ComplexMatrix m_;
};

struct Eigensystem {
  RealVector values;     // ascending
  UnitaryMatrix vectors;  // columns are eigenvectors
};

Eigensystem eigh(const HermitianMatrix& h);

// exp(-i H dt) from the eigendecomposition of H.
UnitaryMatrix expm_unitary(const HermitianMatrix& h, double dt);

// <a|b>
Complex inner(const ComplexVector& a, const ComplexVector& b);

ComplexVector basis_state(Eigen::Index n, Eigen::Index k);

// Real symmetric tridiagonal eigensystem on fixed-capacity storage. This is
// the propagation hot path: every H_N(lambda) is real tridiagonal, so one
// slice costs a QL sweep on n <= kMaxLevels values without allocation.
struct RealEigenbasis {
  int n = 0;
  std::array<double, kMaxLevels> energies{};
  // Column-major: vectors[k * n + i] is component i of eigenvector k.
  std::array<double, kMaxLevels * kMaxLevels> vectors{};

  double v(int i, int k) const { return vectors[k * n + i]; }
};

// diag has n entries, off has n-1. Eigenvalues come out ascending.
void tridiagonal_eigh(std::span<const double> diag, std::span<const double> off,
                      RealEigenbasis& out);

// psi <- V exp(-i E dt) V^T psi, in place on n amplitudes.
void apply_step(const RealEigenbasis& basis, double dt, std::span<Complex> psi);

}  // namespace multiac
