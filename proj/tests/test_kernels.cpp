#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "multiac/kernels.hpp"
#include "oracles.hpp"

using namespace multiac;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar dtft_power matches direct summation") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 7u, 64u, 65u, 300u, 2000u}) {
    const auto x = random_vector(rng, n);
    const std::vector<double> freqs{0.0, 0.37, 1.591549, 12.5, 49.9};
    std::vector<double> p(freqs.size());
    kernels::scalar::dtft_power(x, 0.125, 0.01, freqs, p);
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double want = oracle::dft_power(x, 0.125, 0.01, freqs[j]);
      CHECK(p[j] == doctest::Approx(want).epsilon(1e-10).scale(1e-12 * n));
    }
  }
}

#ifdef MULTIAC_HAVE_AVX2
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) {
    MESSAGE("AVX2 unavailable on this host; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> fd(0.0, 40.0);
  for (std::size_t n = 0; n < 300; n += 13) {
    for (std::size_t nf = 1; nf <= 11; ++nf) {
      const auto x = random_vector(rng, n);
      std::vector<double> freqs(nf);
      for (auto& f : freqs) f = fd(rng);
      std::vector<double> ps(nf), pv(nf);
      kernels::scalar::dtft_power(x, 0.3, 0.003, freqs, ps);
      kernels::avx2::dtft_power(x, 0.3, 0.003, freqs, pv);
      for (std::size_t j = 0; j < nf; ++j) {
        CHECK(pv[j] == doctest::Approx(ps[j]).epsilon(1e-11).scale(1e-12 * (n + 1)));
      }
    }
  }
  for (std::size_t n = 0; n < 1100; n += 17) {
    const auto w = random_vector(rng, n);
    const auto x = random_vector(rng, n);
    const double s = kernels::scalar::weighted_sum_squares(w, x);
    const double v = kernels::avx2::weighted_sum_squares(w, x);
    CHECK(v == doctest::Approx(s).epsilon(1e-13).scale(1e-13 * (n + 1)));
  }
}
#endif

TEST_CASE("dispatch follows set_isa") {
  const kernels::Isa original = kernels::active_isa();
  kernels::set_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
  const std::vector<double> w{1.0, 2.0, 3.0}, x{1.0, -1.0, 2.0};
  CHECK(kernels::weighted_sum_squares(w, x) == 15.0);
  if (kernels::isa_available(kernels::Isa::Avx2)) {
    kernels::set_isa(kernels::Isa::Avx2);
    CHECK(kernels::weighted_sum_squares(w, x) == 15.0);
  } else {
    CHECK_THROWS(kernels::set_isa(kernels::Isa::Avx2));
  }
  kernels::set_isa(original);
}
