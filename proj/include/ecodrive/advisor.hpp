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
#include <string>
#include <string_view>
#include <vector>

#include "ecodrive/comfort.hpp"
#include "ecodrive/features.hpp"
#include "ecodrive/model.hpp"
#include "ecodrive/som.hpp"

namespace ecodrive::advisor {

/// Per-cluster statistics, in the row order of the cluster profile tables.
enum class Metric : std::size_t { MsdvY, Vr, NxPos, NxNeg, Ny, Fuel };
inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::MsdvY, Metric::Vr,
                                                       Metric::NxPos, Metric::NxNeg,
                                                       Metric::Ny,    Metric::Fuel};
std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);
double metric_value(const comfort::WindowMetrics& w, Metric m);

struct MetricStats {
  double avg = 0.0;
  double var = 0.0;  // population variance
};

struct ClusterProfile {
  std::size_t cluster = 0;
  std::size_t members = 0;
  std::array<MetricStats, 6> stats{};
  std::optional<Level> label;

  const MetricStats& of(Metric m) const { return stats[static_cast<std::size_t>(m)]; }
  MetricStats& of(Metric m) { return stats[static_cast<std::size_t>(m)]; }
};

/// Groups windows by the cluster of their BMU. `bmus[k]` is the neuron
/// index of window k. Throws DataError naming any cluster with no windows.
std::vector<ClusterProfile> profile_clusters(const som::ClusterPartition& partition,
                                             const std::vector<std::size_t>& bmus,
                                             const std::vector<comfort::WindowMetrics>& metrics);

/// Ascending average of `metric` maps to Low, Medium, High; ties go to the
/// lower cluster id. Requires exactly three profiles.
std::vector<ClusterProfile> label_clusters(std::vector<ClusterProfile> profiles, Metric metric);

struct Reduction {
  Level current;
  Level target;
  double percent;
};

/// Expected reduction of `metric` when moving from each cluster to every
/// lower-average one: 100 * (avg_current - avg_target) / avg_current.
/// Rows are ordered Medium->Low, High->Medium, High->Low.
std::vector<Reduction> improvement_report(const std::vector<ClusterProfile>& profiles,
                                          Metric metric);

struct AdviceCell {
  std::string fuel_line;
  std::string comfort_line;
  bool comfort_conditional = false;  // shown only after a braking peak
};

/// Joint comfort x fuel recommendations, indexed [comfort][fuel].
struct AdviceMatrix {
  std::array<std::array<AdviceCell, 3>, 3> cells{};

  const AdviceCell& cell(Level comfort, Level fuel) const;
  std::vector<std::string> advice(Level comfort, Level fuel, bool braking_peak) const;
};

AdviceMatrix build_advice_matrix();

/// A braking peak is any negative-XACC exceedance event in the window.
bool has_braking_peak(const comfort::WindowMetrics& m);

struct Classification {
  Level comfort = Level::Low;
  Level fuel = Level::Low;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Runs a window through both maps, each with its own feature set and
/// normalizer.
Classification classify_window(const features::WindowFeatures& window,
                               const model::SomModel& main_model,
                               const model::SomModel& aux_model);

/// Percentages indexed [comfort][fuel].
using IntersectionTable = std::array<std::array<double, 3>, 3>;

IntersectionTable intersect(const std::vector<Classification>& windows);

struct AdviceState {
  std::size_t k_stable = 3;
  std::optional<Classification> last_emitted;
  std::optional<Classification> candidate;
  std::size_t count = 0;
};

struct AdviceEvent {
  std::size_t window_start = 0;
  Classification classification;
  std::vector<std::string> lines;
};

/// Emits advice when the same classification has been seen k_stable
/// consecutive windows and differs from the last emitted one. The braking
/// conditional is evaluated on the triggering window.
std::optional<AdviceEvent> stream_advise(AdviceState& state, const Classification& next,
                                         const comfort::WindowMetrics& window,
                                         const AdviceMatrix& matrix = build_advice_matrix());

/// window_start=<n> comfort=<L|M|H> fuel=<L|M|H> advice="<line 1>" ["<line 2>"]
std::string format_event(const AdviceEvent& event);

/// Cluster profile table: one Avg and one Var row per metric, columns in
/// label order when labelled, otherwise by cluster id.
void write_profiles_csv(std::ostream& out, const std::vector<ClusterProfile>& profiles,
                        const std::vector<Metric>& metrics = {kAllMetrics.begin(),
                                                              kAllMetrics.end()});
void write_improvement_csv(std::ostream& out, const std::vector<Reduction>& rows,
                           std::string_view metric_label);
/// Rows are comfort labels, columns fuel labels.
void write_intersection_csv(std::ostream& out, const IntersectionTable& table);

}  // namespace ecodrive::advisor
