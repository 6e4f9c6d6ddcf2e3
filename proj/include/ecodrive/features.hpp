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

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecodrive/comfort.hpp"
#include "ecodrive/telemetry.hpp"

namespace ecodrive::features {

/// Driving signals available as window features. XACC_pos/XACC_neg are the
/// positive part and negative-part magnitude of XACC.
enum class Signal : std::size_t { SWA, VS, XACC, XACC_neg, XACC_pos, YACC, ERPM };
enum class Stat : std::size_t { Rms, Var };

inline constexpr std::size_t kSignalCount = 7;

struct FeatureId {
  Signal signal;
  Stat stat;
  friend bool operator==(const FeatureId&, const FeatureId&) = default;
};

/// "SWA_RMS", "XACC_pos_VAR", ...
std::string feature_name(FeatureId id);
std::optional<FeatureId> parse_feature(std::string_view name);

/// All 14 features in correlation-table column order.
std::vector<FeatureId> all_features();

using FeatureSet = std::vector<FeatureId>;
/// RMS of SWA, XACC_neg, XACC_pos, YACC, ERPM.
FeatureSet main_feature_set();
/// RMS of XACC_pos, ERPM.
FeatureSet auxiliary_feature_set();
/// Parses a list of feature names, throwing ConfigError on unknown names.
FeatureSet parse_feature_set(const std::vector<std::string>& names);
std::vector<std::string> feature_names(const FeatureSet& set);

struct SignalStats {
  double rms = 0.0;
  double var = 0.0;  // population variance
};

struct WindowFeatures {
  std::size_t window_start = 0;
  std::array<SignalStats, kSignalCount> stats{};

  double value(FeatureId id) const;
};

std::vector<WindowFeatures> compute_features(const telemetry::DriveRecord& record,
                                             const std::vector<telemetry::Window>& windows);

using FeatureVector = std::vector<double>;

FeatureVector extract(const WindowFeatures& features, const FeatureSet& set);
std::vector<FeatureVector> extract(const std::vector<WindowFeatures>& features,
                                   const FeatureSet& set);

/// Sample Pearson correlation coefficient. Throws DataError on length
/// mismatch, fewer than 2 points, or a zero-variance argument.
double pearson(std::span<const double> x, std::span<const double> y);

enum class Target : std::size_t { Fuel, NxPos, NxNeg, Ny, MsdvY, Vr };
inline constexpr std::array<Target, 6> kAllTargets = {Target::Fuel, Target::NxPos, Target::NxNeg,
                                                        Target::Ny,   Target::MsdvY, Target::Vr};
std::string_view target_name(Target t);
double target_value(const comfort::WindowMetrics& m, Target t);

struct CorrelationTable {
  std::vector<FeatureId> features;
  std::vector<Target> targets;
  std::vector<std::vector<double>> pcc;  // [target][feature]

  double at(Target t, FeatureId f) const;
};

/// PCC of every feature column against every comfort/fuel target.
CorrelationTable correlation_table(const std::vector<WindowFeatures>& features,
                                   const std::vector<comfort::WindowMetrics>& metrics);

/// Features whose |PCC| reaches `threshold` for at least one target. A
/// reporting aid; the SOM inputs come from the fixed feature sets.
FeatureSet select_by_threshold(const CorrelationTable& table, double threshold);

/// Rows are targets, columns are features.
void write_correlation_csv(std::ostream& out, const CorrelationTable& table);

/// Per-feature z-score parameters fitted on training vectors.
struct Normalizer {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation

  std::size_t dimension() const { return mean.size(); }
  FeatureVector apply(const FeatureVector& v) const;
  FeatureVector invert(const FeatureVector& v) const;
  std::vector<FeatureVector> apply(const std::vector<FeatureVector>& vs) const;
};

/// Throws DataError when fewer than 2 vectors are given or a feature has
/// zero spread (the message names the feature).
Normalizer fit_normalizer(const std::vector<FeatureVector>& training,
                          std::vector<std::string> names = {});

}  // namespace ecodrive::features
