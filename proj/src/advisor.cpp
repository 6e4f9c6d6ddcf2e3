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

#include "ecodrive/advisor.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "ecodrive/errors.hpp"

namespace ecodrive::advisor {

namespace {

std::size_t idx(Level l) { return static_cast<std::size_t>(l); }

constexpr std::array<Level, 3> kLevels = {Level::Low, Level::Medium, Level::High};

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::MsdvY: return "MSDV_y";
    case Metric::Vr: return "VR";
    case Metric::NxPos: return "nx_pos";
    case Metric::NxNeg: return "nx_neg";
    case Metric::Ny: return "ny";
    case Metric::Fuel: return "fuel";
  }
  return "";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

double metric_value(const comfort::WindowMetrics& w, Metric m) {
  switch (m) {
    case Metric::MsdvY: return w.msdv_y;
    case Metric::Vr: return w.vr;
    case Metric::NxPos: return static_cast<double>(w.n_x_pos);
    case Metric::NxNeg: return static_cast<double>(w.n_x_neg);
    case Metric::Ny: return static_cast<double>(w.n_y);
    case Metric::Fuel: return w.fuel;
  }
  return 0.0;
}

std::vector<ClusterProfile> profile_clusters(const som::ClusterPartition& partition,
                                             const std::vector<std::size_t>& bmus,
                                             const std::vector<comfort::WindowMetrics>& metrics) {
  if (bmus.size() != metrics.size()) throw DataError("profile: BMU and metric counts differ");
  std::vector<ClusterProfile> profiles(partition.count);
  std::vector<std::vector<std::size_t>> members(partition.count);
  for (std::size_t k = 0; k < bmus.size(); ++k) {
    if (bmus[k] >= partition.assignment.size()) {
      throw DataError("profile: window " + std::to_string(k) + " has an unknown BMU");
    }
    members[partition.assignment[bmus[k]]].push_back(k);
  }
  for (std::size_t c = 0; c < partition.count; ++c) {
    if (members[c].empty()) throw DataError("cluster " + std::to_string(c) + " has no member windows");
    auto& p = profiles[c];
    p.cluster = c;
    p.members = members[c].size();
    const double n = static_cast<double>(p.members);
    for (auto m : kAllMetrics) {
      double sum = 0.0;
      for (auto k : members[c]) sum += metric_value(metrics[k], m);
      const double avg = sum / n;
      double ss = 0.0;
      for (auto k : members[c]) {
        const double d = metric_value(metrics[k], m) - avg;
        ss += d * d;
      }
      p.of(m) = {avg, ss / n};
    }
  }
  return profiles;
}

std::vector<ClusterProfile> label_clusters(std::vector<ClusterProfile> profiles, Metric metric) {
  if (profiles.size() != 3) {
    throw ConfigError("labelling needs exactly 3 clusters, got " + std::to_string(profiles.size()));
  }
  std::vector<std::size_t> order(profiles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = profiles[a].of(metric).avg;
    const double vb = profiles[b].of(metric).avg;
    if (va != vb) return va < vb;
    return profiles[a].cluster < profiles[b].cluster;
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank) profiles[order[rank]].label = kLevels[rank];
  return profiles;
}

std::vector<Reduction> improvement_report(const std::vector<ClusterProfile>& profiles,
                                          Metric metric) {
  std::array<const ClusterProfile*, 3> by_label{};
  for (const auto& p : profiles) {
    if (!p.label) throw DataError("improvement report needs labelled profiles");
    by_label[idx(*p.label)] = &p;
  }
  for (const auto* p : by_label) {
    if (p == nullptr) throw DataError("improvement report needs one profile per label");
  }
  std::vector<Reduction> rows;
  for (std::size_t cur = 1; cur < 3; ++cur) {
    for (std::size_t tgt = cur; tgt-- > 0;) {
      const double a = by_label[cur]->of(metric).avg;
      const double b = by_label[tgt]->of(metric).avg;
      if (b < a && a != 0.0) rows.push_back({kLevels[cur], kLevels[tgt], 100.0 * (a - b) / a});
    }
  }
  return rows;
}

const AdviceCell& AdviceMatrix::cell(Level comfort, Level fuel) const {
  return cells[idx(comfort)][idx(fuel)];
}

std::vector<std::string> AdviceMatrix::advice(Level comfort, Level fuel, bool braking_peak) const {
  const auto& c = cell(comfort, fuel);
  std::vector<std::string> lines{c.fuel_line};
  if (!c.comfort_conditional || braking_peak) lines.push_back(c.comfort_line);
  return lines;
}

AdviceMatrix build_advice_matrix() {
  const std::array<std::string, 3> fuel_advice = {
      "Keep driving style",
      "Release gas pedal / switch to a lower gear",
      "Keep gas pedal steady / switch to a higher gear",
  };
  const std::array<std::string, 3> comfort_advice = {
      "Avoid braking peaks",
      "Release gas pedal",
      "Operate steering wheel more smoothly",
  };
  AdviceMatrix m;
  for (auto c : kLevels) {
    for (auto f : kLevels) {
      m.cells[idx(c)][idx(f)] = {fuel_advice[idx(f)], comfort_advice[idx(c)], c == Level::Low};
    }
  }
  return m;
}

bool has_braking_peak(const comfort::WindowMetrics& m) { return m.n_x_neg >= 1; }

Classification classify_window(const features::WindowFeatures& window,
                               const model::SomModel& main_model,
                               const model::SomModel& aux_model) {
  return {main_model.classify(window), aux_model.classify(window)};
}

IntersectionTable intersect(const std::vector<Classification>& windows) {
  if (windows.empty()) throw DataError("intersection of an empty window set");
  std::array<std::array<std::size_t, 3>, 3> counts{};
  for (const auto& w : windows) ++counts[idx(w.comfort)][idx(w.fuel)];
  IntersectionTable t{};
  const double total = static_cast<double>(windows.size());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) t[i][j] = 100.0 * static_cast<double>(counts[i][j]) / total;
  }
  return t;
}

std::optional<AdviceEvent> stream_advise(AdviceState& state, const Classification& next,
                                         const comfort::WindowMetrics& window,
                                         const AdviceMatrix& matrix) {
  if (state.k_stable == 0) throw ConfigError("k_stable must be at least 1");
  if (state.candidate && *state.candidate == next) {
    state.count = std::min(state.count + 1, state.k_stable);
  } else {
    state.candidate = next;
    state.count = 1;
  }
  if (state.count < state.k_stable || state.last_emitted == next) return std::nullopt;
  state.last_emitted = next;
  return AdviceEvent{window.window_start, next,
                     matrix.advice(next.comfort, next.fuel, has_braking_peak(window))};
}

std::string format_event(const AdviceEvent& e) {
  std::ostringstream out;
  out << "window_start=" << e.window_start << " comfort=" << level_letter(e.classification.comfort)
      << " fuel=" << level_letter(e.classification.fuel) << " advice=";
  for (std::size_t i = 0; i < e.lines.size(); ++i) {
    if (i > 0) out << ' ';
    out << '"' << e.lines[i] << '"';
  }
  return out.str();
}

void write_profiles_csv(std::ostream& out, const std::vector<ClusterProfile>& profiles,
                        const std::vector<Metric>& metrics) {
  std::vector<const ClusterProfile*> cols;
  for (const auto& p : profiles) cols.push_back(&p);
  const bool labelled = std::all_of(cols.begin(), cols.end(), [](auto* p) { return p->label.has_value(); });
  std::stable_sort(cols.begin(), cols.end(), [&](auto* a, auto* b) {
    return labelled ? idx(*a->label) < idx(*b->label) : a->cluster < b->cluster;
  });
  out << "metric,stat";
  for (auto* p : cols) {
    out << ',';
    if (labelled) out << level_name(*p->label);
    else out << "cluster_" << p->cluster;
  }
  out << '\n';
  const auto precision = out.precision(6);
  out << "members,count";
  for (auto* p : cols) out << ',' << p->members;
  out << '\n';
  for (auto m : metrics) {
    out << metric_name(m) << ",avg";
    for (auto* p : cols) out << ',' << p->of(m).avg;
    out << '\n' << metric_name(m) << ",var";
    for (auto* p : cols) out << ',' << p->of(m).var;
    out << '\n';
  }
  out.precision(precision);
}

void write_improvement_csv(std::ostream& out, const std::vector<Reduction>& rows,
                           std::string_view metric_label) {
  out << "current,target," << metric_label << "_reduction_pct\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    out << level_name(r.current) << ',' << level_name(r.target) << ',' << r.percent << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_intersection_csv(std::ostream& out, const IntersectionTable& table) {
  out << "comfort\\fuel,Low,Medium,High\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(2);
  for (auto c : kLevels) {
    out << level_name(c);
    for (auto f : kLevels) out << ',' << table[idx(c)][idx(f)];
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace ecodrive::advisor
