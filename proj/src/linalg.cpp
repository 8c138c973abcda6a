#include "multiac/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "multiac/errors.hpp"

namespace multiac {

Tolerances& default_tolerances() {
  static Tolerances tol;
  return tol;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double unitarity_defect(const ComplexMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m)
    : HermitianMatrix(std::move(m), default_tolerances().hermitian) {}

HermitianMatrix::HermitianMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    std::ostringstream os;
    os << "HermitianMatrix: not square (" << m_.rows() << "x" << m_.cols() << ")";
    throw std::invalid_argument(os.str());
  }
  if (m_.size() == 0) return;
  Eigen::Index bi = 0, bj = 0;
  const double worst = (m_ - m_.adjoint()).cwiseAbs().maxCoeff(&bi, &bj);
  if (!(worst <= tol)) {
    std::ostringstream os;
    os << "HermitianMatrix: input is not Hermitian, |H(" << bi << "," << bj
       << ") - conj(H(" << bj << "," << bi << "))| = " << worst << " > " << tol;
    throw std::invalid_argument(os.str());
  }
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ + o.m_);
}

HermitianMatrix HermitianMatrix::shifted(double c) const {
  ComplexMatrix m = m_;
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) += c;
  return HermitianMatrix(std::move(m));
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m)
    : UnitaryMatrix(std::move(m), default_tolerances().unitary) {}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("UnitaryMatrix: not square");
  const double defect = unitarity_defect(m_);
  if (!(defect <= tol)) {
    std::ostringstream os;
    os << "UnitaryMatrix: ||U^dagger U - I||_F = " << defect << " exceeds " << tol;
    throw InvariantViolation(os.str());
  }
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index n) {
  return UnitaryMatrix(ComplexMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& o) const {
  return UnitaryMatrix(m_ * o.m_);
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint()); }

Eigensystem eigh(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw InvariantViolation("eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), UnitaryMatrix(solver.eigenvectors())};
}

UnitaryMatrix expm_unitary(const HermitianMatrix& h, double dt) {
  if (!std::isfinite(dt)) throw std::invalid_argument("expm_unitary: dt is not finite");
  const auto n = h.dim();
  if (dt == 0.0) return UnitaryMatrix::identity(n);
  const Eigensystem es = eigh(h);
  const ComplexMatrix& v = es.vectors.matrix();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, -es.values(k) * dt);
  return UnitaryMatrix(v * phases.asDiagonal() * v.adjoint());
}

Complex inner(const ComplexVector& a, const ComplexVector& b) { return a.dot(b); }

ComplexVector basis_state(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k >= n) throw std::out_of_range("basis_state: index out of range");
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  return v;
}

void tridiagonal_eigh(std::span<const double> diag, std::span<const double> off,
                      RealEigenbasis& out) {
  const int n = static_cast<int>(diag.size());
  if (n < 1 || n > kMaxLevels || static_cast<int>(off.size()) != n - 1) {
    throw std::invalid_argument("tridiagonal_eigh: bad dimensions");
  }
  out.n = n;
  std::array<double, kMaxLevels> d{};
  std::array<double, kMaxLevels> e{};
  for (int i = 0; i < n; ++i) d[i] = diag[i];
  for (int i = 0; i + 1 < n; ++i) e[i] = off[i];
  auto& z = out.vectors;
  for (int i = 0; i < n * n; ++i) z[i] = 0.0;
  for (int i = 0; i < n; ++i) z[i * n + i] = 1.0;

  // Implicit QL with Wilkinson-style shifts.
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) + dd == dd) break;
      }
      if (m != l) {
        if (++iter > 64) throw InvariantViolation("tridiagonal_eigh: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          double* zi = &z[i * n];
          double* zi1 = &z[(i + 1) * n];
          for (int k = 0; k < n; ++k) {
            f = zi1[k];
            zi1[k] = s * zi[k] + c * f;
            zi[k] = c * zi[k] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  // Selection sort, ascending.
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    for (int j = i + 1; j < n; ++j) {
      if (d[j] < d[k]) k = j;
    }
    if (k != i) {
      std::swap(d[i], d[k]);
      for (int r = 0; r < n; ++r) std::swap(z[i * n + r], z[k * n + r]);
    }
  }
  for (int i = 0; i < n; ++i) out.energies[i] = d[i];
}

void apply_step(const RealEigenbasis& basis, double dt, std::span<Complex> psi) {
  const int n = basis.n;
  std::array<Complex, kMaxLevels> tmp;
  for (int k = 0; k < n; ++k) {
    const double* vk = &basis.vectors[k * n];
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
      re += vk[i] * psi[i].real();
      im += vk[i] * psi[i].imag();
    }
    const double ph = -basis.energies[k] * dt;
    const double c = std::cos(ph), s = std::sin(ph);
    tmp[k] = Complex(c * re - s * im, s * re + c * im);
  }
  for (int i = 0; i < n; ++i) psi[i] = 0.0;
  for (int k = 0; k < n; ++k) {
    const double* vk = &basis.vectors[k * n];
    for (int i = 0; i < n; ++i) psi[i] += vk[i] * tmp[k];
  }
}

}  // namespace multiac
