// Copyright 2026 The ecodrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecodrive/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "ecodrive/comfort.hpp"
#include "ecodrive/errors.hpp"
#include "ecodrive/random.hpp"

namespace ecodrive::synthgen {
namespace {

using telemetry::Channel;
constexpr double kFs = static_cast<double>(telemetry::kSampleRate);

// Vehicle constants for the bicycle model and gear map.
constexpr double kSteeringRatio = 16.0;
constexpr double kWheelbase = 2.7;         // m
constexpr double kRpmPerKmh = 24.0;        // fixed top-gear map
constexpr double kRegulatorTau = 25.0;     // s, speed-holding time constant
constexpr double kSpeedDrift = 6.0;        // km/h RMS of the slow target-speed drift
constexpr double kRpmWander = 250.0;      // rev/min RMS of the load-driven wander
constexpr std::size_t kFilterWarmup = 1024;

// White noise through a Butterworth band-pass, scaled to unit RMS. The
// warmup prefix is discarded so the filter transient does not leak in.
std::vector<double> band_noise(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> white(n + kFilterWarmup);
  for (double& w : white) w = standard_normal(rng);
  const auto filter = comfort::design_filter(comfort::FilterKind::Horizontal, lo, hi, kFs);
  auto shaped = comfort::apply_filter(filter, white);
  std::vector<double> out(shaped.begin() + static_cast<std::ptrdiff_t>(kFilterWarmup), shaped.end());
  double ss = 0.0;
  for (double v : out) ss += v * v;
  const double rms = std::sqrt(ss / static_cast<double>(out.size()));
  for (double& v : out) v /= rms;
  return out;
}

struct PulseShape {
  double first_max;      // s, first onset drawn from [0, first_max)
  double gap_lo, gap_hi; // s between onsets
  double dur_lo, dur_hi; // s
  double peak;
};

// Sum of sin^2-shaped pulses with jittered onsets, durations and heights.
std::vector<double> pulse_train(Rng& rng, std::size_t n, const PulseShape& shape) {
  std::vector<double> out(n, 0.0);
  const double total = static_cast<double>(n) / kFs;
  double onset = uniform(rng, 0.0, shape.first_max);
  while (onset < total) {
    const double dur = uniform(rng, shape.dur_lo, shape.dur_hi);
    const double height = shape.peak * uniform(rng, 0.9, 1.1);
    const auto i0 = static_cast<std::size_t>(std::ceil(onset * kFs));
    for (std::size_t i = i0; i < n; ++i) {
      const double tau = static_cast<double>(i) / kFs - onset;
      if (tau >= dur) break;
      const double s = std::sin(std::numbers::pi * tau / dur);
      out[i] += height * s * s;
    }
    onset += uniform(rng, shape.gap_lo, shape.gap_hi);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void StyleSpec::validate() const {
  check_unit(steering_aggressiveness, "steering_aggressiveness");
  check_unit(gas_aggressiveness, "gas_aggressiveness");
  check_unit(braking_spikiness, "braking_spikiness");
  if (!std::isfinite(erpm_bias)) throw ConfigError("erpm_bias must be finite");
  if (!(base_speed > 0.0 && std::isfinite(base_speed))) throw ConfigError("base_speed must be positive");
  if (!(duration >= 16.0 && std::isfinite(duration))) throw ConfigError("duration must be at least 16 s");
}

telemetry::DriveRecord generate(const StyleSpec& spec, std::string driver_id) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * kFs));
  Rng rng(spec.seed);

  // Steering: smooth drivers make small corrections, aggressive ones large.
  const double swa_amp = 0.5 + 8.0 * spec.steering_aggressiveness;  // deg RMS
  auto swa = band_noise(rng, n, 0.15, 1.0);
  for (double& v : swa) v *= swa_amp;

  // Short, well separated pulses keep each pedal's mean small next to its
  // RMS, so the speed-holding offset barely leaks into the other pedal.
  const auto gas = pulse_train(rng, n, {4.0, 5.0, 7.0, 0.8, 1.2, 0.3 + 2.0 * spec.gas_aggressiveness});
  const auto brake = pulse_train(rng, n, {4.0, 4.5, 5.5, 0.45, 0.75, 0.6 + 4.0 * spec.braking_spikiness});
  const auto road = band_noise(rng, n, 0.5, 5.0);
  const auto lateral = band_noise(rng, n, 0.5, 5.0);
  const auto vertical = band_noise(rng, n, 1.0, 8.0);
  const auto engine = band_noise(rng, n, 0.1, 2.0);

  // The regulator target is offset so the average drive force balances and
  // speed hovers around base_speed.
  const double v0 = spec.base_speed / 3.6;
  const double v_ref = v0 - kRegulatorTau * (mean(gas) - mean(brake));

  // Slow traffic-driven changes of the cruising speed: three random
  // sinusoids with periods between about 50 s and 5 min.
  std::array<double, 3> freq{}, phase{}, rpm_freq{}, rpm_phase{};
  for (std::size_t k = 0; k < freq.size(); ++k) {
    freq[k] = uniform(rng, 0.003, 0.02);
    phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  }
  // Engine speed also wanders with load and road grade independently of
  // vehicle speed, on a 30 s to 2 min scale.
  for (std::size_t k = 0; k < rpm_freq.size(); ++k) {
    rpm_freq[k] = uniform(rng, 0.008, 0.03);
    rpm_phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  }
  const double drift_amp = kSpeedDrift / 3.6 / std::sqrt(1.5);

  std::vector<double> vs(n), xacc(n), yacc(n), zacc(n), erpm(n), pgp(n), gp(n), bp(n), fuel(n);
  double v = v0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kFs;
    double target = v_ref;
    for (std::size_t k = 0; k < freq.size(); ++k)
      target += drift_amp * std::sin(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
    const double a = gas[i] - brake[i] - (v - target) / kRegulatorTau;
    vs[i] = v * 3.6;
    xacc[i] = a + 0.08 * road[i];
    const double delta = swa[i] * std::numbers::pi / 180.0;
    yacc[i] = v * v * delta / (kSteeringRatio * kWheelbase) + 0.05 * lateral[i];
    zacc[i] = 0.3 * vertical[i];
    double wander = 0.0;
    for (std::size_t k = 0; k < rpm_freq.size(); ++k)
      wander += std::sin(2.0 * std::numbers::pi * rpm_freq[k] * t + rpm_phase[k]);
    wander *= kRpmWander / std::sqrt(1.5);
    erpm[i] = std::max(0.0, vs[i] * kRpmPerKmh + spec.erpm_bias + wander + 250.0 * gas[i] +
                                40.0 * engine[i]);
    pgp[i] = std::min(100.0, 18.0 + 30.0 * gas[i]);
    gp[i] = 0.05 * pgp[i];
    bp[i] = 40.0 * brake[i];
    fuel[i] = FuelModel::c0 + FuelModel::c1 * erpm[i] * pgp[i] + FuelModel::c2 * std::max(xacc[i], 0.0);
    v = std::max(0.0, v + a / kFs);
  }

  telemetry::DriveRecord record(std::move(driver_id));
  record.set_channel(Channel::SWA, std::move(swa));
  record.set_channel(Channel::VS, std::move(vs));
  record.set_channel(Channel::ERPM, std::move(erpm));
  record.set_channel(Channel::PGP, std::move(pgp));
  record.set_channel(Channel::GP, std::move(gp));
  record.set_channel(Channel::BP, std::move(bp));
  record.set_channel(Channel::XACC, std::move(xacc));
  record.set_channel(Channel::YACC, std::move(yacc));
  record.set_channel(Channel::ZACC, std::move(zacc));
  record.set_channel(Channel::FUEL, std::move(fuel));
  return record;
}

std::vector<LabeledRecord> corpus(const std::vector<LabeledSpec>& specs) {
  std::vector<LabeledRecord> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back({generate(s.spec, s.label.name), s.label});
  return out;
}

double comfort_aggressiveness(Level comfort) {
  switch (comfort) {
    case Level::Low: return 0.1;
    case Level::Medium: return 0.5;
    case Level::High: return 0.9;
  }
  return 0.5;
}

FuelStyle fuel_style(Level fuel) {
  switch (fuel) {
    case Level::Low: return {0.15, 0.0};
    case Level::Medium: return {0.9, 0.0};
    case Level::High: return {0.55, 1200.0};
  }
  return {0.5, 0.0};
}

std::vector<LabeledSpec> style_grid(std::uint64_t seed, double duration) {
  constexpr Level kLevels[] = {Level::Low, Level::Medium, Level::High};
  Rng rng(seed);
  std::vector<LabeledSpec> out;
  for (Level c : kLevels) {
    for (Level f : kLevels) {
      LabeledSpec s;
      const double agg = comfort_aggressiveness(c);
      const auto fs = fuel_style(f);
      s.spec.steering_aggressiveness = agg;
      s.spec.braking_spikiness = agg;
      s.spec.gas_aggressiveness = fs.gas_aggressiveness;
      s.spec.erpm_bias = fs.erpm_bias;
      s.spec.duration = duration;
      s.spec.seed = rng();
      s.label.comfort = c;
      s.label.fuel = f;
      s.label.name = "style_c" + std::string(1, level_letter(c)) + "_f" + std::string(1, level_letter(f));
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace ecodrive::synthgen
