#pragma once

// Independent reference computations for the test suite. None of these call
// into the library's numerics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Real roots of x^3 + a x^2 + b x + c with three real roots, ascending
// (trigonometric form).
inline std::vector<double> cubic_roots(double a, double b, double c) {
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double theta = std::acos(std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0));
  const double s = -2.0 * std::sqrt(q);
  std::vector<double> x{s * std::cos(theta / 3.0) - a / 3.0,
                        s * std::cos((theta + 2.0 * std::numbers::pi) / 3.0) - a / 3.0,
                        s * std::cos((theta - 2.0 * std::numbers::pi) / 3.0) - a / 3.0};
  std::sort(x.begin(), x.end());
  return x;
}

// Eigenvalues of a real symmetric tridiagonal 3x3 [[d0,e0,0],[e0,d1,e1],[0,e1,d2]] from its
// characteristic polynomial.
inline std::vector<double> tridiag3_eigenvalues(double d0, double d1, double d2, double e0,
                                                double e1) {
  const double a = -(d0 + d1 + d2);
  const double b = d0 * d1 + d1 * d2 + d0 * d2 - e0 * e0 - e1 * e1;
  const double c = -(d0 * d1 * d2 - d0 * e1 * e1 - d2 * e0 * e0);
  return cubic_roots(a, b, c);
}

// exp(-i H t) by scaling and squaring a 12th-order Taylor polynomial.
inline Matrix expm_taylor(const Matrix& h, double t) {
  const Matrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Matrix as = a * scale;
  Matrix term = Matrix::Identity(h.rows(), h.cols());
  Matrix sum = term;
  for (int k = 1; k <= 12; ++k) {
    term = term * as / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// i psi' = H_k psi on each slice k of width dt, classic RK4 with `substeps`
// steps per slice.
inline Vector rk4_piecewise(const std::vector<Matrix>& slices, double dt, Vector psi,
                            int substeps) {
  const double h = dt / substeps;
  const Complex mi(0.0, -1.0);
  for (const Matrix& H : slices) {
    for (int s = 0; s < substeps; ++s) {
      const Vector k1 = mi * (H * psi);
      const Vector k2 = mi * (H * (psi + 0.5 * h * k1));
      const Vector k3 = mi * (H * (psi + 0.5 * h * k2));
      const Vector k4 = mi * (H * (psi + h * k3));
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return psi;
}

// J_n(x) = (1/pi) int_0^pi cos(n tau - x sin tau) d tau. The integrand is
// smooth and periodic, so the trapezoid rule converges geometrically.
inline double bessel_integral(int n, double x, int points = 4096) {
  long double sum = 0.0L;
  const long double h = std::numbers::pi_v<long double> / points;
  for (int k = 0; k <= points; ++k) {
    const long double tau = k * h;
    const long double w = (k == 0 || k == points) ? 0.5L : 1.0L;
    sum += w * std::cos(static_cast<long double>(n) * tau - static_cast<long double>(x) * std::sin(tau));
  }
  return static_cast<double>(sum * h / std::numbers::pi_v<long double>);
}

// |sum_k x_k exp(-2 pi i f t_k)|^2 computed directly.
inline double dft_power(const std::vector<double>& x, double t0, double dt, double f) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += x[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * (t0 + k * dt));
  }
  return std::norm(acc);
}

inline Matrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace oracle
