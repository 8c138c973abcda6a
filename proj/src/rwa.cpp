#include "multiac/rwa.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "multiac/csv.hpp"

namespace multiac {

namespace {

constexpr double kFirstZeroJ0 = 2.405;

long double bessel_series(int n, long double x) {
  const long double h = x / 2.0L;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= h / k;
  long double sum = term;
  const long double h2 = h * h;
  for (int k = 1; k < 500; ++k) {
    term *= -h2 / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-21L * std::fabs(sum)) break;
  }
  return sum;
}

// Hankel expansion, only for n in {0, 1} and x > 20.
double bessel_asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  const double z = 8.0 * x;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * z);
    if (std::fabs(next) > std::fabs(term)) break;  // series turned divergent
    term = next;
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 1) {
      q += signed_term;
    } else {
      p += signed_term;
    }
    if (std::fabs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double j_nonneg(int n, double x) {
  if (x <= 20.0 || n > x) return static_cast<double>(bessel_series(n, x));
  double jm = bessel_asymptotic(0, x);
  if (n == 0) return jm;
  double j = bessel_asymptotic(1, x);
  for (int k = 1; k < n; ++k) {
    const double next = (2.0 * k / x) * j - jm;
    jm = j;
    j = next;
  }
  return j;
}

void require_three_levels(const SpectrumModel& model, const char* who) {
  if (model.levels() != 3) {
    throw std::invalid_argument(std::string(who) + ": the rotating-wave solution needs N = 3");
  }
}

Complex phase(double a) { return std::polar(1.0, a); }

// Rotating-frame data of one stage: couplings c01, c12 and the residual
// frequencies they carry, H~ = [[0, c01 e^{i d01 t}, 0], [.., 0, c12 e^{i d12 t}], ..].
struct StageFrame {
  Complex c01;
  Complex c12;
  double d01;
  double d12;
};

StageFrame stage_frame(const SpectrumModel& model, const RwaParameters& p, Stage stage) {
  const auto [r0, r1] = renormalized_rates(p.amplitude, p.omega, model.deltas(), stage);
  const double detuning = model.epsilon0() - p.omega;
  if (stage == Stage::First) {
    return {0.5 * r0 * phase(-p.phi0()), 0.5 * r1 * phase(p.phi0() - p.phase), 0.0, detuning};
  }
  return {-0.5 * r0 * phase(-(p.phi0_tilde() + p.phase2)), 0.5 * r1 * phase(p.phi0_tilde()),
          detuning, 0.0};
}

// exp(-i int H_D) over a stage, as a diagonal. The second stage starts a
// fresh interaction picture at t_m.
ComplexMatrix diagonal_part(const SpectrumModel& model, const RwaParameters& p, Stage stage,
                            double s) {
  const double z = p.omega != 0.0 ? p.amplitude / p.omega : 0.0;
  ComplexMatrix u = ComplexMatrix::Zero(3, 3);
  u(1, 1) = 1.0;
  if (stage == Stage::First) {
    const double big = z * (std::sin(p.omega * s + p.phase) - std::sin(p.phase));
    u(0, 0) = phase(-big);
    u(2, 2) = phase(-(big - model.epsilon0() * s));
  } else {
    const double big = z * (std::sin(p.omega * s + p.phase2) - std::sin(p.phase2));
    u(0, 0) = phase(-(model.epsilon0() * s + big));
    u(2, 2) = phase(-big);
  }
  return u;
}

// W(s)^dagger exp(-i H_eff s) with W = diag(1, e^{i d01 s}, e^{i (d01 + d12) s}).
ComplexMatrix rotating_part(const SpectrumModel& model, const RwaParameters& p, Stage stage,
                            double s) {
  const StageFrame f = stage_frame(model, p, stage);
  ComplexMatrix u = expm_unitary(effective_hamiltonian(model, p, stage), s).matrix();
  const double theta[3] = {0.0, f.d01, f.d01 + f.d12};
  for (int i = 0; i < 3; ++i) u.row(i) *= phase(-theta[i] * s);
  return u;
}

std::vector<double> populations(const ComplexVector& psi) {
  std::vector<double> p(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) p[i] = std::norm(psi(i));
  return p;
}

}  // namespace

double bessel_j(int n, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j: argument is not finite");
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n % 2) sign = -sign;
  }
  return sign * j_nonneg(n, x);
}

double RwaParameters::phi0() const {
  return omega != 0.0 ? amplitude / omega * std::sin(phase) : 0.0;
}

double RwaParameters::phi0_tilde() const {
  return omega != 0.0 ? amplitude / omega * std::sin(phase2) : 0.0;
}

RwaFieldParams RwaParameters::field() const {
  return {switch_time, amplitude, omega, phase, phase2};
}

RwaParameters default_rwa_parameters(const SpectrumModel& model, double duration,
                                     double amplitude) {
  require_three_levels(model, "default_rwa_parameters");
  RwaParameters p;
  p.amplitude = amplitude;
  p.omega = model.epsilon0();
  p.switch_time = default_switch_time(model, duration);
  p.duration = duration;
  return p;
}

std::pair<double, double> renormalized_rates(double amplitude, double omega,
                                             std::span<const double> deltas, Stage stage) {
  if (deltas.size() < 2) throw std::invalid_argument("renormalized_rates: need two gaps");
  if (!(omega > 0.0)) throw std::invalid_argument("renormalized_rates: omega must be positive");
  const double z = amplitude / omega;
  const double j0 = bessel_j(0, z);
  const double j1 = bessel_j(1, z);
  if (stage == Stage::First) return {j0 * deltas[0], j1 * deltas[1]};
  return {j1 * deltas[0], j0 * deltas[1]};
}

HermitianMatrix effective_hamiltonian(const SpectrumModel& model, const RwaParameters& params,
                                      Stage stage) {
  require_three_levels(model, "effective_hamiltonian");
  const StageFrame f = stage_frame(model, params, stage);
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 1) = f.c01;
  h(1, 0) = std::conj(f.c01);
  h(1, 2) = f.c12;
  h(2, 1) = std::conj(f.c12);
  h(1, 1) = -f.d01;
  h(2, 2) = -(f.d01 + f.d12);
  return HermitianMatrix(std::move(h));
}

UnitaryMatrix analytic_propagator(const SpectrumModel& model, const RwaParameters& params,
                                  double t) {
  require_three_levels(model, "analytic_propagator");
  if (!(t >= 0.0 && t <= params.duration)) {
    throw std::out_of_range("analytic_propagator: t outside [0, T]");
  }
  if (!(params.switch_time > 0.0 && params.switch_time < params.duration)) {
    throw std::invalid_argument("analytic_propagator: switch time must lie inside (0, T)");
  }
  const double tm = params.switch_time;
  if (t < tm) {
    return UnitaryMatrix(diagonal_part(model, params, Stage::First, t) *
                         rotating_part(model, params, Stage::First, t));
  }
  const double s = t - tm;
  const ComplexMatrix first = diagonal_part(model, params, Stage::First, tm) *
                              rotating_part(model, params, Stage::First, tm);
  const ComplexMatrix second = diagonal_part(model, params, Stage::Second, s) *
                               rotating_part(model, params, Stage::Second, s);
  return UnitaryMatrix(second * first);
}

namespace {

// Maximizes f on [a, b] by golden section; returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  constexpr double g = 0.6180339887498949;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

RwaParameters AmplitudeCalibration::parameters(const SpectrumModel& model, double duration,
                                               double switch_time) const {
  RwaParameters p = default_rwa_parameters(model, duration, amplitude);
  p.switch_time = switch_time;
  p.phase = phase;
  p.phase2 = phase2;
  return p;
}

AmplitudeCalibration calibrate_amplitude(const SpectrumModel& model, double duration,
                                         double switch_time, const CalibrationOptions& options) {
  require_three_levels(model, "calibrate_amplitude");
  if (options.scan_points < 3) throw std::invalid_argument("calibrate_amplitude: scan_points < 3");
  if (options.optimize_phases && options.phase_points < 2) {
    throw std::invalid_argument("calibrate_amplitude: phase_points < 2");
  }
  const double eps0 = model.epsilon0();
  if (!(eps0 > 0.0)) throw std::invalid_argument("calibrate_amplitude: eps0 must be positive");

  RwaParameters p = default_rwa_parameters(model, duration, 0.0);
  p.switch_time = switch_time;
  auto fid = [&](double ratio, double phi, double phi2) {
    p.amplitude = ratio * eps0;
    p.phase = phi;
    p.phase2 = phi2;
    return std::norm(analytic_propagator(model, p, duration).matrix()(2, 0));
  };

  AmplitudeCalibration out;
  out.fidelity_at_zero = fid(0.0, 0.0, 0.0);
  const double step = kFirstZeroJ0 / (options.scan_points + 1);
  const int np = options.optimize_phases ? options.phase_points : 1;
  const double dphi = 2.0 * std::numbers::pi / np;
  double best = -1.0, lo = 2.0, hi = -1.0;
  int best_i = 0;
  for (int i = 0; i < options.scan_points; ++i) {
    const double r = (i + 1) * step;
    double f_r = -1.0;
    for (int a = 0; a < np; ++a) {
      for (int b = 0; b < np; ++b) {
        const double f = fid(r, a * dphi, b * dphi);
        if (f > f_r) f_r = f;
        if (f > best) {
          best = f;
          best_i = i;
          out.phase = a * dphi;
          out.phase2 = b * dphi;
        }
      }
    }
    out.scan.emplace_back(r, f_r);
    lo = std::min(lo, f_r);
    hi = std::max(hi, f_r);
  }
  out.flat = hi - lo < 1e-12;
  out.ratio = out.scan[best_i].first;
  out.fidelity = best;
  if (out.flat) {
    out.amplitude = out.ratio * eps0;
    return out;
  }

  // Coordinate refinement; the amplitude bracket stays inside the open interval.
  const double r_lo = std::max(0.5 * step, out.ratio - step);
  const double r_hi = std::min(kFirstZeroJ0 - 0.5 * step, out.ratio + step);
  for (int round = 0; round < 4; ++round) {
    auto [r, fr] = golden_max([&](double x) { return fid(x, out.phase, out.phase2); }, r_lo, r_hi,
                              1e-10);
    if (fr > out.fidelity) {
      out.ratio = r;
      out.fidelity = fr;
    }
    if (!options.optimize_phases) break;
    auto [a, fa] = golden_max([&](double x) { return fid(out.ratio, x, out.phase2); },
                              out.phase - dphi, out.phase + dphi, 1e-10);
    if (fa > out.fidelity) {
      out.phase = a;
      out.fidelity = fa;
    }
    auto [b, fb] = golden_max([&](double x) { return fid(out.ratio, out.phase, x); },
                              out.phase2 - dphi, out.phase2 + dphi, 1e-10);
    if (fb > out.fidelity) {
      out.phase2 = b;
      out.fidelity = fb;
    }
  }
  out.amplitude = out.ratio * eps0;
  return out;
}

RwaComparison compare_rwa(const SpectrumModel& model, const RwaParameters& params, int steps) {
  require_three_levels(model, "compare_rwa");
  const ControlField field = rwa_field(model, params.duration, params.field(), steps);
  const ComplexVector psi0 = basis_state(3, 0);
  const StateTrajectory traj = propagate(model, field, psi0);

  RwaComparison cmp{field.grid(), {}, {}, 0.0, 0.0, 0.0};
  const int m = field.grid().steps();
  for (int k = 0; k <= m; ++k) {
    const double t = k == m ? params.duration : field.grid().start(k);
    const ComplexVector psi = analytic_propagator(model, params, t) * psi0;
    cmp.analytic.push_back(populations(psi));
    cmp.numeric.push_back(traj.populations[k]);
    for (int i = 0; i < 3; ++i) {
      cmp.max_deviation =
          std::max(cmp.max_deviation, std::abs(cmp.analytic[k][i] - cmp.numeric[k][i]));
    }
  }
  cmp.final_fidelity_analytic = cmp.analytic.back()[2];
  cmp.final_fidelity_numeric = cmp.numeric.back()[2];
  return cmp;
}

void write_comparison_csv(std::ostream& os, const RwaComparison& cmp) {
  std::vector<std::string> header{"t[time]"};
  const std::size_t n = cmp.analytic.empty() ? 0 : cmp.analytic.front().size();
  for (std::size_t i = 0; i < n; ++i) header.push_back("P_" + std::to_string(i) + "_analytic[1]");
  for (std::size_t i = 0; i < n; ++i) header.push_back("P_" + std::to_string(i) + "_numeric[1]");
  csv::write_header(os, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < cmp.analytic.size(); ++k) {
    row.assign(1, cmp.grid.start(static_cast<int>(k)));
    row.insert(row.end(), cmp.analytic[k].begin(), cmp.analytic[k].end());
    row.insert(row.end(), cmp.numeric[k].begin(), cmp.numeric[k].end());
    csv::write_row(os, row);
  }
}

}  // namespace multiac
