#include "multiac/fields.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "multiac/csv.hpp"
#include "multiac/kernels.hpp"

namespace multiac {

TimeGrid::TimeGrid(double duration, int steps) : duration_(duration), steps_(steps) {
  if (steps_ < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
  if (!(duration_ >= 0.0) || !std::isfinite(duration_)) {
    throw std::invalid_argument("TimeGrid: duration must be finite and >= 0");
  }
}

int default_steps(const SpectrumModel& model, double duration) {
  int steps = 2000;
  const double eps0 = model.epsilon0();
  if (eps0 > 0.0 && duration > 0.0) {
    const double dt_max = (2.0 * std::numbers::pi / eps0) / 40.0;
    steps = std::max(steps, static_cast<int>(std::ceil(duration / dt_max)));
  }
  return steps;
}

ControlField::ControlField(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.steps()) {
    std::ostringstream os;
    os << "ControlField: " << values_.size() << " values for " << grid_.steps() << " slices";
    throw std::invalid_argument(os.str());
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ControlField: non-finite value");
  }
}

double sudden_switch_value(const SpectrumModel& model, int target, double t) {
  if (target < 1 || target > model.levels() - 1) {
    throw std::out_of_range("sudden_switch: target level outside [1, N-1]");
  }
  double edge = 0.0;
  for (int n = 0; n < target; ++n) {
    edge += std::numbers::pi / model.deltas()[n];
    if (t < edge) return model.crossing(n);
  }
  return model.crossing(target - 1);
}

ControlField sudden_switch(const SpectrumModel& model, int target, int steps) {
  const double duration = model.sudden_switch_time(target);
  if (steps == 0) steps = default_steps(model, duration);
  return ControlField::sample(TimeGrid(duration, steps), [&](double t) {
    return sudden_switch_value(model, target, t);
  });
}

ControlField initial_guess(const SpectrumModel& model, int target, double duration,
                           const GuessOptions& options, int steps) {
  if (!(duration > 0.0)) throw std::invalid_argument("initial_guess: duration must be > 0");
  if (options.smoothing < 0.0) throw std::invalid_argument("initial_guess: smoothing < 0");
  const double ts = model.sudden_switch_time(target);
  const double b = ts / duration;
  if (steps == 0) steps = default_steps(model, duration);

  // Jump instants of lambda^(S)(b t), in guess time.
  std::vector<double> jumps;
  std::vector<double> heights;
  double edge = 0.0;
  for (int n = 0; n + 1 < target; ++n) {
    edge += std::numbers::pi / model.deltas()[n];
    jumps.push_back(edge / b);
    heights.push_back(model.crossing(n + 1) - model.crossing(n));
  }
  const double width = options.smoothing * duration;
  const double slope_end = options.slope * model.epsilon0();

  return ControlField::sample(TimeGrid(duration, steps), [&](double t) {
    double value = 0.0;
    if (width > 0.0) {
      value = model.crossing(0);
      for (std::size_t j = 0; j < jumps.size(); ++j) {
        value += heights[j] * 0.5 * (1.0 + std::tanh((t - jumps[j]) / width));
      }
    } else {
      value = sudden_switch_value(model, target, b * t);
    }
    return value + slope_end * t / duration;
  });
}

ControlField linear_guess(const SpectrumModel& model, int target, double duration, int steps) {
  if (!(duration > 0.0)) throw std::invalid_argument("linear_guess: duration must be > 0");
  if (target < 1 || target > model.levels() - 1) {
    throw std::out_of_range("linear_guess: target level outside [1, N-1]");
  }
  if (steps == 0) steps = default_steps(model, duration);
  const double end = model.crossing(target - 1);
  return ControlField::sample(TimeGrid(duration, steps),
                              [&](double t) { return end * t / duration; });
}

ControlField sinusoidal_guess(const SpectrumModel& model, int target, double duration,
                              int steps) {
  if (!(duration > 0.0)) throw std::invalid_argument("sinusoidal_guess: duration must be > 0");
  if (target < 1 || target > model.levels() - 1) {
    throw std::out_of_range("sinusoidal_guess: target level outside [1, N-1]");
  }
  if (steps == 0) steps = default_steps(model, duration);
  const double amp = std::max(model.crossing(target - 1), model.epsilon0());
  return ControlField::sample(TimeGrid(duration, steps), [&](double t) {
    return -amp * std::sin(std::numbers::pi * t / duration);
  });
}

double default_switch_time(const SpectrumModel& model, double duration) {
  if (model.levels() < 3) throw std::invalid_argument("default_switch_time: need N >= 3");
  const double s0 = std::numbers::pi / model.deltas()[0];
  const double s1 = std::numbers::pi / model.deltas()[1];
  return duration * s0 / (s0 + s1);
}

double rwa_field_value(const SpectrumModel& model, const RwaFieldParams& p, double t) {
  if (t < p.switch_time) return p.amplitude * std::cos(p.omega * t + p.phase);
  return model.epsilon0() + p.amplitude * std::cos(p.omega * (t - p.switch_time) + p.phase2);
}

ControlField rwa_field(const SpectrumModel& model, double duration, const RwaFieldParams& params,
                       int steps) {
  if (!(params.switch_time > 0.0 && params.switch_time < duration)) {
    throw std::invalid_argument("rwa_field: switch time must lie strictly inside (0, T)");
  }
  if (steps == 0) steps = default_steps(model, duration);
  return ControlField::sample(TimeGrid(duration, steps),
                              [&](double t) { return rwa_field_value(model, params, t); });
}

std::vector<double> plateau_baseline(std::span<const double> values, int plateaus) {
  const int m = static_cast<int>(values.size());
  if (plateaus < 1) throw std::invalid_argument("plateau_baseline: need >= 1 plateau");
  if (m == 0) return {};
  plateaus = std::min(plateaus, m);
  std::vector<double> s1(m + 1, 0.0), s2(m + 1, 0.0);
  for (int k = 0; k < m; ++k) {
    s1[k + 1] = s1[k] + values[k];
    s2[k + 1] = s2[k] + values[k] * values[k];
  }
  auto cost = [&](int a, int b) {  // squared residual of [a, b) about its mean
    const double n = b - a;
    const double s = s1[b] - s1[a];
    return (s2[b] - s2[a]) - s * s / n;
  };
  // best[p][j]: min cost of splitting [0, j) into p + 1 plateaus.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(plateaus, std::vector<double>(m + 1, inf));
  std::vector<std::vector<int>> cut(plateaus, std::vector<int>(m + 1, 0));
  for (int j = 1; j <= m; ++j) best[0][j] = cost(0, j);
  for (int p = 1; p < plateaus; ++p) {
    for (int j = p + 1; j <= m; ++j) {
      for (int i = p; i < j; ++i) {
        const double c = best[p - 1][i] + cost(i, j);
        if (c < best[p][j]) {
          best[p][j] = c;
          cut[p][j] = i;
        }
      }
    }
  }
  std::vector<double> baseline(m);
  int end = m;
  for (int p = plateaus - 1; p >= 0; --p) {
    const int begin = p == 0 ? 0 : cut[p][end];
    const double mean = (s1[end] - s1[begin]) / (end - begin);
    std::fill(baseline.begin() + begin, baseline.begin() + end, mean);
    end = begin;
  }
  return baseline;
}

namespace {

struct Segment {
  int begin;
  int end;
};

// Maximal runs of constant baseline.
std::vector<Segment> plateau_segments(const std::vector<double>& baseline) {
  std::vector<Segment> out;
  int begin = 0;
  const int m = static_cast<int>(baseline.size());
  for (int k = 1; k <= m; ++k) {
    if (k == m || baseline[k] != baseline[begin]) {
      out.push_back({begin, k});
      begin = k;
    }
  }
  return out;
}

}  // namespace

FrequencyReport dominant_frequency(const ControlField& field, int plateaus) {
  FrequencyReport report;
  const auto values = field.values();
  report.baseline = plateau_baseline(values, plateaus);
  const int m = field.size();
  std::vector<double> residual(m);
  for (int k = 0; k < m; ++k) {
    residual[k] = values[k] - report.baseline[k];
    report.amplitude = std::max(report.amplitude, std::abs(residual[k]));
  }
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double duration = field.grid().duration();
  if (report.amplitude <= 1e-12 * scale || !(duration > 0.0)) {
    report.constant = true;
    report.amplitude = 0.0;
    return report;
  }

  // The oscillation phase is free to jump where the plateau changes, which
  // would split a single line in the spectrum of the whole record. Powers of
  // the individual plateaus are therefore added incoherently.
  const double dt = field.grid().dt();
  const auto segments = plateau_segments(report.baseline);
  int shortest = m;
  for (const auto& seg : segments) shortest = std::min(shortest, seg.end - seg.begin);
  const double nyquist = 0.5 / dt;
  const double f_min = std::min(1.0 / (shortest * dt), nyquist);  // skip the DC neighbourhood
  constexpr int kPad = 4;
  const double df = 1.0 / (kPad * duration);

  auto spectrum = [&](std::span<const double> freqs, std::span<double> power) {
    std::vector<double> part(freqs.size());
    std::fill(power.begin(), power.end(), 0.0);
    for (const auto& seg : segments) {
      const std::span<const double> x(residual.data() + seg.begin, seg.end - seg.begin);
      kernels::dtft_power(x, field.grid().midpoint(seg.begin), dt, freqs, part);
      for (std::size_t j = 0; j < freqs.size(); ++j) power[j] += part[j];
    }
  };

  std::vector<double> freqs;
  for (double f = f_min; f <= nyquist; f += df) freqs.push_back(f);
  if (freqs.empty()) freqs.push_back(nyquist);
  std::vector<double> power(freqs.size());
  spectrum(freqs, power);
  const auto peak = std::max_element(power.begin(), power.end()) - power.begin();

  auto neg_power = [&](double f) {
    double out = 0.0;
    spectrum(std::span<const double>(&f, 1), std::span<double>(&out, 1));
    return -out;
  };
  double a = std::max(f_min, freqs[peak] - df), b = std::min(nyquist, freqs[peak] + df);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = neg_power(x1), f2 = neg_power(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = neg_power(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = neg_power(x2);
    }
  }
  report.frequency = 0.5 * (a + b);
  if (-neg_power(report.frequency) < power[peak]) report.frequency = freqs[peak];
  return report;
}

void write_field_csv(std::ostream& os, const ControlField& field) {
  os << "# grid duration=" << csv::format(field.grid().duration())
     << " steps=" << field.grid().steps() << '\n';
  csv::write_header(os, {"t[time]", "lambda[energy]"});
  for (int k = 0; k < field.size(); ++k) csv::write_row(os, {field.grid().start(k), field[k]});
}

ControlField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# grid ", 0) != 0) {
    throw std::invalid_argument("read_field_csv: missing '# grid' line");
  }
  double duration = 0.0;
  int steps = 0;
  {
    const auto d = line.find("duration=");
    const auto s = line.find("steps=");
    if (d == std::string::npos || s == std::string::npos) {
      throw std::invalid_argument("read_field_csv: malformed grid line");
    }
    const auto d_end = line.find(' ', d);
    duration = csv::parse(std::string_view(line).substr(d + 9, d_end - d - 9));
    steps = static_cast<int>(csv::parse(std::string_view(line).substr(s + 6)));
  }
  if (!std::getline(is, line)) throw std::invalid_argument("read_field_csv: missing header");
  std::vector<double> values;
  values.reserve(steps);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = csv::split_row(line);
    if (cols.size() != 2) throw std::invalid_argument("read_field_csv: expected 2 columns");
    values.push_back(csv::parse(cols[1]));
  }
  return ControlField(TimeGrid(duration, steps), std::move(values));
}

}  // namespace multiac
