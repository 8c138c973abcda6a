#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and
// an AVX2/FMA variant; dispatch picks the best variant the host supports at
// first use. The scalar versions are the definition: vector variants must
// agree with them to rounding (see tests/test_kernels.cpp).

#include <span>
#include <string_view>

namespace multiac::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Force a variant (tests, benchmarking). Throws if unavailable.
void set_isa(Isa isa);

// power[j] = |sum_k x[k] exp(-2 pi i f_j t_k)|^2 with t_k = t0 + k dt.
// The exponential is advanced by a complex recurrence and re-seeded from
// exact cos/sin every kReseed samples.
inline constexpr int kReseed = 64;
void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power);

// sum_k w[k] x[k]^2
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);

namespace scalar {
void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power);
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);
}  // namespace scalar

namespace avx2 {
void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power);
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);
}  // namespace avx2

}  // namespace multiac::kernels
