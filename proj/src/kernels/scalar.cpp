#include <cmath>
#include <numbers>
#include <stdexcept>

#include "multiac/kernels.hpp"

namespace multiac::kernels::scalar {

void dtft_power(std::span<const double> x, double t0, double dt,
                std::span<const double> freqs, std::span<double> power) {
  if (power.size() != freqs.size()) throw std::invalid_argument("dtft_power: size mismatch");
  const std::size_t n = x.size();
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const double omega = 2.0 * std::numbers::pi * freqs[j];
    const double wr = std::cos(omega * dt), wi = -std::sin(omega * dt);
    double acc_r = 0.0, acc_i = 0.0;
    double zr = 0.0, zi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k % kReseed == 0) {
        const double ph = omega * (t0 + static_cast<double>(k) * dt);
        zr = std::cos(ph);
        zi = -std::sin(ph);
      }
      acc_r += x[k] * zr;
      acc_i += x[k] * zi;
      const double nr = zr * wr - zi * wi;
      zi = zr * wi + zi * wr;
      zr = nr;
    }
    power[j] = acc_r * acc_r + acc_i * acc_i;
  }
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("weighted_sum_squares: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k] * x[k];
  return s;
}

}  // namespace multiac::kernels::scalar
