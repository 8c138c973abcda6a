// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "multiac/kernels.hpp"

namespace multiac::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

// Four frequencies per register; each lane runs its own phasor recurrence.
void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power) {
  if (power.size() != freqs.size()) throw std::invalid_argument("dtft_power: size mismatch");
  const std::size_t n = x.size();
  const std::size_t nf = freqs.size();
  std::size_t j = 0;
  alignas(32) double wr[4], wi[4], zr[4], zi[4], omega[4];
  for (; j + 4 <= nf; j += 4) {
    for (int l = 0; l < 4; ++l) {
      omega[l] = 2.0 * std::numbers::pi * freqs[j + l];
      wr[l] = std::cos(omega[l] * dt);
      wi[l] = -std::sin(omega[l] * dt);
    }
    const __m256d vwr = _mm256_load_pd(wr);
    const __m256d vwi = _mm256_load_pd(wi);
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    __m256d vzr = _mm256_setzero_pd();
    __m256d vzi = _mm256_setzero_pd();
    for (std::size_t k = 0; k < n; ++k) {
      if (k % kReseed == 0) {
        const double t = t0 + static_cast<double>(k) * dt;
        for (int l = 0; l < 4; ++l) {
          zr[l] = std::cos(omega[l] * t);
          zi[l] = -std::sin(omega[l] * t);
        }
        vzr = _mm256_load_pd(zr);
        vzi = _mm256_load_pd(zi);
      }
      const __m256d xv = _mm256_set1_pd(x[k]);
      acc_r = _mm256_fmadd_pd(xv, vzr, acc_r);
      acc_i = _mm256_fmadd_pd(xv, vzi, acc_i);
      const __m256d nr = _mm256_fmsub_pd(vzr, vwr, _mm256_mul_pd(vzi, vwi));
      vzi = _mm256_fmadd_pd(vzr, vwi, _mm256_mul_pd(vzi, vwr));
      vzr = nr;
    }
    const __m256d p = _mm256_fmadd_pd(acc_r, acc_r, _mm256_mul_pd(acc_i, acc_i));
    _mm256_storeu_pd(power.data() + j, p);
  }
  if (j < nf) scalar::dtft_power(x, t0, dt, freqs.subspan(j), power.subspan(j));
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("weighted_sum_squares: size mismatch");
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + k);
    const __m256d wv = _mm256_loadu_pd(w.data() + k);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, xv), xv, acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * x[k] * x[k];
  return s;
}

}  // namespace multiac::kernels::avx2
