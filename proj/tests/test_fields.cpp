#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "multiac/csv.hpp"
#include "multiac/fields.hpp"

using namespace multiac;

TEST_CASE("time grid validation and geometry") {
  CHECK_THROWS_AS(TimeGrid(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(-1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(std::nan(""), 10), std::invalid_argument);
  const TimeGrid g(2.0, 4);
  CHECK(g.dt() == 0.5);
  CHECK(g.start(3) == 1.5);
  CHECK(g.midpoint(0) == 0.25);
  CHECK(TimeGrid(0.0, 2).dt() == 0.0);
}

TEST_CASE("default step count resolves the eps0 oscillation") {
  const SpectrumModel small = SpectrumModel::uniform(3, 10.0, 1.0);
  CHECK(default_steps(small, 6.0) == 2000);
  const SpectrumModel big = SpectrumModel::uniform(3, 100.0, 1.0);
  const double T = 0.93 * big.sudden_switch_time(2);
  const int m = default_steps(big, T);
  CHECK(T / m <= (2.0 * std::numbers::pi / 100.0) / 40.0 + 1e-15);
}

TEST_CASE("control field rejects a size mismatch and non-finite values") {
  const TimeGrid g(1.0, 4);
  CHECK_THROWS_AS(ControlField(g, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(ControlField(g, {0, 0, 0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("sudden switch holds lambda_n = n eps0 for pi / delta_n") {
  const SpectrumModel m(4, 10.0, {1.0, 2.0, 4.0});
  const double pi = std::numbers::pi;
  CHECK(sudden_switch_value(m, 3, 0.5 * pi) == 0.0);
  CHECK(sudden_switch_value(m, 3, 1.2 * pi) == 10.0);
  CHECK(sudden_switch_value(m, 3, 1.6 * pi) == 20.0);
  const ControlField f = sudden_switch(m, 3, 700);
  CHECK(f.grid().duration() == doctest::Approx(pi * 1.75));
  CHECK(f[0] == 0.0);
  CHECK(f[699] == 20.0);
  CHECK_THROWS_AS(sudden_switch(m, 4), std::out_of_range);
  CHECK_THROWS_AS(sudden_switch(m, 0), std::out_of_range);
}

TEST_CASE("initial guess is the time-scaled, smoothed sudden switch plus a linear ramp") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  const double T = 0.9 * m.sudden_switch_time(2);
  const ControlField g = initial_guess(m, 2, T, {0.02, 0.01}, 1000);
  // Slice 0 is sampled at its midpoint, where only the ramp contributes.
  CHECK(g[0] == doctest::Approx(0.1 * g.grid().midpoint(0) / T).epsilon(1e-6));
  CHECK(g[999] == doctest::Approx(10.0 + 0.1).epsilon(1e-4));
  // Half way through the single jump the tanh is at its midpoint.
  const double jump = T / 2.0;
  const int k = static_cast<int>(jump / g.grid().dt());
  CHECK(g[k] == doctest::Approx(5.0 + 0.1 * g.grid().midpoint(k) / T).epsilon(0.05));
  const ControlField sharp = initial_guess(m, 2, T, {0.0, 0.0}, 1000);
  CHECK(sharp[100] == 0.0);
  CHECK(sharp[900] == 10.0);
}

TEST_CASE("linear and sinusoidal guesses") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  const ControlField lin = linear_guess(m, 2, 5.0, 500);
  CHECK(lin[0] == doctest::Approx(10.0 * lin.grid().midpoint(0) / 5.0));
  CHECK(lin[499] == doctest::Approx(10.0 * lin.grid().midpoint(499) / 5.0));
  const ControlField sin = sinusoidal_guess(m, 2, 5.0, 500);
  for (int k = 0; k < 500; ++k) CHECK(sin[k] <= 0.0);
  CHECK(sin[250] == doctest::Approx(-10.0).epsilon(1e-4));
}

TEST_CASE("rwa field plateaus and their mean") {
  const SpectrumModel m = SpectrumModel::uniform(3, 10.0, 1.0);
  const double T = 0.91 * m.sudden_switch_time(2);
  const RwaFieldParams p{T / 2, 4.0, 10.0, 0.3, -0.2};
  CHECK_THROWS_AS(rwa_field(m, T, RwaFieldParams{T, 4.0, 10.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(rwa_field(m, T, RwaFieldParams{0.0, 4.0, 10.0, 0.0, 0.0}), std::invalid_argument);
  const ControlField f = rwa_field(m, T, p, 4000);
  double s0 = 0.0, s1 = 0.0;
  int n0 = 0, n1 = 0;
  for (int k = 0; k < f.size(); ++k) {
    const double t = f.grid().midpoint(k);
    CHECK(f[k] == doctest::Approx(rwa_field_value(m, p, t)));
    (t < p.switch_time ? s0 : s1) += f[k];
    (t < p.switch_time ? n0 : n1) += 1;
  }
  const double bound = 2.0 * p.amplitude / (p.omega * T);
  CHECK(std::abs(s0 / n0 - 0.0) <= bound);
  CHECK(std::abs(s1 / n1 - 10.0) <= bound);
  CHECK(default_switch_time(m, T) == doctest::Approx(T / 2));
}

TEST_CASE("plateau baseline recovers piecewise-constant data") {
  std::vector<double> v(300);
  for (int k = 0; k < 300; ++k) v[k] = k < 120 ? 1.0 : (k < 210 ? -2.0 : 5.0);
  const auto b = plateau_baseline(v, 3);
  for (int k = 0; k < 300; ++k) CHECK(b[k] == doctest::Approx(v[k]));
  const auto one = plateau_baseline(v, 1);
  double mean = 0.0;
  for (double x : v) mean += x / 300.0;
  CHECK(one[17] == doctest::Approx(mean));
  CHECK_THROWS_AS(plateau_baseline(v, 0), std::invalid_argument);
}

TEST_CASE("dominant frequency of a sinusoid on a step") {
  const TimeGrid g(6.0, 3000);
  const double f0 = 1.6;
  const ControlField f = ControlField::sample(g, [&](double t) {
    const double step = t < 3.0 ? 0.0 : 10.0;
    const double phase = t < 3.0 ? 0.0 : 1.3;  // phase jump at the switch
    return step + 2.5 * std::cos(2.0 * std::numbers::pi * f0 * t + phase);
  });
  const FrequencyReport r = dominant_frequency(f, 2);
  CHECK(r.frequency == doctest::Approx(f0).epsilon(0.01));
  CHECK(r.amplitude == doctest::Approx(2.5).epsilon(0.05));
  CHECK_FALSE(r.constant);
}

TEST_CASE("dominant frequency flags a constant field") {
  const ControlField f(TimeGrid(1.0, 100), std::vector<double>(100, 3.0));
  const FrequencyReport r = dominant_frequency(f);
  CHECK(r.constant);
  CHECK(r.amplitude == 0.0);
}

TEST_CASE("field CSV round-trips bit-exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  std::vector<double> v(777);
  for (auto& x : v) x = g(rng);
  v[0] = 5e-324;
  v[1] = -0.0;
  v[2] = 1.0 / 3.0;
  const ControlField f(TimeGrid(2.0 / 3.0, 777), v);
  std::stringstream ss;
  write_field_csv(ss, f);
  const ControlField back = read_field_csv(ss);
  CHECK(back.grid().duration() == f.grid().duration());
  CHECK(back.grid().steps() == f.grid().steps());
  for (int k = 0; k < 777; ++k) {
    CHECK(std::memcmp(&back.values()[k], &f.values()[k], sizeof(double)) == 0);
  }
}

TEST_CASE("csv number formatting is shortest round-trip") {
  CHECK(csv::format(0.1) == "0.1");
  CHECK(csv::format(1e300) == "1e+300");
  CHECK(csv::parse("0.30000000000000004") == 0.1 + 0.2);
  CHECK_THROWS_AS(csv::parse("1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(csv::parse(""), std::invalid_argument);
  std::istringstream bad("t,lambda\n0,1\n");
  CHECK_THROWS_AS(read_field_csv(bad), std::invalid_argument);
}
