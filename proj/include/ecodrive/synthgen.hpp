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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecodrive/levels.hpp"
#include "ecodrive/telemetry.hpp"

namespace ecodrive::synthgen {

/// Knobs of one synthetic driver. Aggressiveness values lie in [0, 1].
struct StyleSpec {
  double steering_aggressiveness = 0.5;
  double gas_aggressiveness = 0.5;
  double braking_spikiness = 0.5;
  double erpm_bias = 0.0;     // rev/min added to the gear map
  double base_speed = 95.0;   // km/h
  double duration = 900.0;    // s, at least 16
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Fuel proxy constants: FUEL = c0 + c1 * ERPM * PGP + c2 * max(XACC, 0).
/// Chosen so that the corpus spans roughly 2-5 l/100km; not a physical model.
struct FuelModel {
  static constexpr double c0 = 0.5;
  static constexpr double c1 = 4.0e-5;
  static constexpr double c2 = 0.6;
};

/// 32 Hz record. SWA is band-limited noise scaled by steering
/// aggressiveness; YACC follows SWA through a kinematic bicycle model; XACC
/// combines throttle bursts, braking pulses and a speed regulator, and VS
/// integrates it; ERPM follows speed through a fixed gear plus the bias.
/// Deterministic in (spec, seed).
telemetry::DriveRecord generate(const StyleSpec& spec, std::string driver_id = "synthetic");

/// Ground-truth levels. `comfort` is the motion-sickness level, as in the
/// classifier: Low means smooth steering and braking.
struct StyleLabel {
  std::string name;
  Level comfort = Level::Low;
  Level fuel = Level::Low;
};

struct LabeledSpec {
  StyleSpec spec;
  StyleLabel label;
};

struct LabeledRecord {
  telemetry::DriveRecord record;
  StyleLabel label;
};

/// One record per spec; the driver id is the label name.
std::vector<LabeledRecord> corpus(const std::vector<LabeledSpec>& specs);

/// Generator settings for a comfort level: steering aggressiveness and
/// braking spikiness move together.
double comfort_aggressiveness(Level comfort);

/// Generator settings for a fuel level. Medium drivers press the gas hard in
/// a high gear; high drivers press moderately in a low gear.
struct FuelStyle {
  double gas_aggressiveness;
  double erpm_bias;
};
FuelStyle fuel_style(Level fuel);

/// The 3 comfort x 3 fuel design, in comfort-major order, with per-spec
/// seeds drawn from `seed`.
std::vector<LabeledSpec> style_grid(std::uint64_t seed, double duration = 900.0);

}  // namespace ecodrive::synthgen
