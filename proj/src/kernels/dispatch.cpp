#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "multiac/kernels.hpp"

namespace multiac::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(MULTIAC_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  // MULTIAC_ISA=scalar pins the reference path.
  if (const char* env = std::getenv("MULTIAC_ISA")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error("kernels: ISA " + std::string(isa_name(isa)) + " not available");
  }
  current().store(isa, std::memory_order_relaxed);
}

void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power) {
#ifdef MULTIAC_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::dtft_power(x, t0, dt, freqs, power);
#endif
  scalar::dtft_power(x, t0, dt, freqs, power);
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
#ifdef MULTIAC_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::weighted_sum_squares(w, x);
#endif
  return scalar::weighted_sum_squares(w, x);
}

}  // namespace multiac::kernels
