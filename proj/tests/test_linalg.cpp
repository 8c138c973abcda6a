#include <doctest.h>

#include <random>

#include "multiac/errors.hpp"
#include "multiac/linalg.hpp"
#include "oracles.hpp"

using namespace multiac;

TEST_CASE("hermitian matrix rejects asymmetric input with a diagnostic") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = Complex(1.0, 0.0);
  m(1, 0) = Complex(1.0, 1e-6);
  try {
    HermitianMatrix h(m);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("not Hermitian") != std::string::npos);
  }
  CHECK_NOTHROW(HermitianMatrix(m, 1e-5));
}

TEST_CASE("unitary matrix rejects non-unitary input") {
  ComplexMatrix m = ComplexMatrix::Identity(3, 3);
  m(0, 0) = 1.001;
  CHECK_THROWS_AS(UnitaryMatrix{m}, InvariantViolation);
  CHECK(UnitaryMatrix::identity(4).matrix().isIdentity());
}

TEST_CASE("eigh reproduces the cubic characteristic roots") {
  // H_3(lambda = 5) with eps0 = 10 and unit gaps.
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 5.0;
  m(1, 1) = 0.0;
  m(2, 2) = -5.0;
  m(0, 1) = m(1, 0) = 0.5;
  m(1, 2) = m(2, 1) = 0.5;
  const Eigensystem es = eigh(HermitianMatrix(m));
  const auto roots = oracle::tridiag3_eigenvalues(5.0, 0.0, -5.0, 0.5, 0.5);
  for (int i = 0; i < 3; ++i) CHECK(es.values(i) == doctest::Approx(roots[i]).epsilon(1e-13));
}

TEST_CASE("expm_unitary matches a Taylor-series oracle on random Hermitian input") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const ComplexMatrix h = oracle::random_hermitian(rng, n, 2.0);
    const double dt = 0.05 + 0.01 * (trial % 50);
    const ComplexMatrix u = expm_unitary(HermitianMatrix(h), dt).matrix();
    CHECK((u - oracle::expm_taylor(h, dt)).norm() < 1e-11);
  }
}

TEST_CASE("every step propagator is unitary to 1e-10 over 1000 random Hermitian inputs") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dt_dist(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 7;
    const ComplexMatrix h = oracle::random_hermitian(rng, n, 5.0);
    const UnitaryMatrix u = expm_unitary(HermitianMatrix(h), dt_dist(rng));
    worst = std::max(worst, unitarity_defect(u.matrix()));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("expm group property exp(-iHa) exp(-iHb) = exp(-iH(a+b))") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianMatrix h(oracle::random_hermitian(rng, 4, 3.0));
    const double a = 0.3 + 0.01 * trial, b = 1.1 - 0.007 * trial;
    const ComplexMatrix lhs = (expm_unitary(h, a) * expm_unitary(h, b)).matrix();
    CHECK((lhs - expm_unitary(h, a + b).matrix()).norm() < 1e-12);
    CHECK((expm_unitary(h, a).adjoint().matrix() - expm_unitary(h, -a).matrix()).norm() < 1e-12);
  }
}

TEST_CASE("tridiagonal eigensolver agrees with the dense solver") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % (kMaxLevels - 1);
    std::vector<double> d(n), e(n - 1);
    for (auto& x : d) x = g(rng);
    for (auto& x : e) x = (trial % 10 == 0) ? 0.0 : g(rng);  // include split matrices
    RealEigenbasis basis;
    tridiagonal_eigh(d, e, basis);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i];
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = e[i];
    const Eigensystem ref = eigh(HermitianMatrix(m));
    for (int k = 0; k < n; ++k) {
      CHECK(basis.energies[k] == doctest::Approx(ref.values(k)).epsilon(1e-12).scale(10.0));
      if (k > 0) CHECK(basis.energies[k] >= basis.energies[k - 1]);
      // Eigenvector residual and normalization.
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = basis.v(i, k);
      CHECK((m.real() * v - basis.energies[k] * v).norm() < 1e-11 * (1.0 + std::abs(basis.energies[k])));
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("apply_step equals the dense exponential") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<double> d(n), e(n - 1);
    for (auto& x : d) x = g(rng);
    for (auto& x : e) x = g(rng);
    RealEigenbasis basis;
    tridiagonal_eigh(d, e, basis);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i];
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = e[i];
    ComplexVector psi = ComplexVector::Random(n).normalized();
    const ComplexVector expect = oracle::expm_taylor(m, 0.37) * psi;
    apply_step(basis, 0.37, std::span<Complex>(psi.data(), n));
    CHECK((psi - expect).norm() < 1e-12);
  }
}

TEST_CASE("basis states and inner products") {
  const ComplexVector a = basis_state(3, 1);
  CHECK(a.norm() == 1.0);
  CHECK(inner(a, a) == Complex(1.0, 0.0));
  CHECK(inner(a, basis_state(3, 2)) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(basis_state(3, 3), std::out_of_range);
}
