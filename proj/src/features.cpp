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

#include "ecodrive/features.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "ecodrive/errors.hpp"

namespace ecodrive::features {

namespace {

using telemetry::Channel;

constexpr std::array<std::string_view, kSignalCount> kSignalNames = {
    "SWA", "VS", "XACC", "XACC_neg", "XACC_pos", "YACC", "ERPM"};

SignalStats stats_of(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  double sumsq = 0.0;
  for (double a : v) {
    sum += a;
    sumsq += a * a;
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  return {std::sqrt(sumsq / n), ss / n};
}

}  // namespace

std::string feature_name(FeatureId id) {
  return std::string(kSignalNames[static_cast<std::size_t>(id.signal)]) +
         (id.stat == Stat::Rms ? "_RMS" : "_VAR");
}

std::optional<FeatureId> parse_feature(std::string_view name) {
  for (const auto id : all_features()) {
    if (feature_name(id) == name) return id;
  }
  return std::nullopt;
}

std::vector<FeatureId> all_features() {
  std::vector<FeatureId> out;
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    out.push_back({static_cast<Signal>(s), Stat::Rms});
    out.push_back({static_cast<Signal>(s), Stat::Var});
  }
  return out;
}

FeatureSet main_feature_set() {
  return {{Signal::SWA, Stat::Rms},
          {Signal::XACC_neg, Stat::Rms},
          {Signal::XACC_pos, Stat::Rms},
          {Signal::YACC, Stat::Rms},
          {Signal::ERPM, Stat::Rms}};
}

FeatureSet auxiliary_feature_set() {
  return {{Signal::XACC_pos, Stat::Rms}, {Signal::ERPM, Stat::Rms}};
}

FeatureSet parse_feature_set(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("feature set is empty");
  FeatureSet set;
  for (const auto& n : names) {
    const auto id = parse_feature(n);
    if (!id) throw ConfigError("unknown feature '" + n + "'");
    set.push_back(*id);
  }
  return set;
}

std::vector<std::string> feature_names(const FeatureSet& set) {
  std::vector<std::string> out;
  for (const auto& id : set) out.push_back(feature_name(id));
  return out;
}

double WindowFeatures::value(FeatureId id) const {
  const auto& s = stats[static_cast<std::size_t>(id.signal)];
  return id.stat == Stat::Rms ? s.rms : s.var;
}

std::vector<WindowFeatures> compute_features(const telemetry::DriveRecord& record,
                                             const std::vector<telemetry::Window>& windows) {
  const auto swa = record.channel(Channel::SWA);
  const auto vs = record.channel(Channel::VS);
  const auto xacc = record.channel(Channel::XACC);
  const auto yacc = record.channel(Channel::YACC);
  const auto erpm = record.channel(Channel::ERPM);

  std::vector<double> x_pos(xacc.size());
  std::vector<double> x_neg(xacc.size());
  for (std::size_t i = 0; i < xacc.size(); ++i) {
    x_pos[i] = std::max(xacc[i], 0.0);
    x_neg[i] = std::max(-xacc[i], 0.0);
  }

  const std::array<std::span<const double>, kSignalCount> signals = {
      swa, vs, xacc, std::span<const double>(x_neg), std::span<const double>(x_pos), yacc, erpm};

  std::vector<WindowFeatures> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.start + telemetry::Window::length > record.length()) {
      throw DataError("window at " + std::to_string(w.start) + " exceeds record length");
    }
    WindowFeatures f;
    f.window_start = w.start;
    for (std::size_t s = 0; s < kSignalCount; ++s) {
      f.stats[s] = stats_of(signals[s].subspan(w.start, telemetry::Window::length));
    }
    out.push_back(f);
  }
  return out;
}

FeatureVector extract(const WindowFeatures& features, const FeatureSet& set) {
  FeatureVector v;
  v.reserve(set.size());
  for (const auto& id : set) v.push_back(features.value(id));
  return v;
}

std::vector<FeatureVector> extract(const std::vector<WindowFeatures>& features,
                                   const FeatureSet& set) {
  std::vector<FeatureVector> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(extract(f, set));
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  if (x.size() < 2) throw DataError("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (sxx == 0.0 || syy == 0.0 || constant(x) || constant(y)) {
    throw DataError("pearson: correlation undefined for zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::string_view target_name(Target t) {
  switch (t) {
    case Target::Fuel: return "Fuel";
    case Target::NxPos: return "nx_pos";
    case Target::NxNeg: return "nx_neg";
    case Target::Ny: return "ny";
    case Target::MsdvY: return "MSDV_y";
    case Target::Vr: return "VR";
  }
  return "";
}

double target_value(const comfort::WindowMetrics& m, Target t) {
  switch (t) {
    case Target::Fuel: return m.fuel;
    case Target::NxPos: return static_cast<double>(m.n_x_pos);
    case Target::NxNeg: return static_cast<double>(m.n_x_neg);
    case Target::Ny: return static_cast<double>(m.n_y);
    case Target::MsdvY: return m.msdv_y;
    case Target::Vr: return m.vr;
  }
  return 0.0;
}

double CorrelationTable::at(Target t, FeatureId f) const {
  const auto ti = std::find(targets.begin(), targets.end(), t);
  const auto fi = std::find(features.begin(), features.end(), f);
  if (ti == targets.end() || fi == features.end()) throw ConfigError("no such table cell");
  return pcc[static_cast<std::size_t>(ti - targets.begin())]
            [static_cast<std::size_t>(fi - features.begin())];
}

CorrelationTable correlation_table(const std::vector<WindowFeatures>& features,
                                   const std::vector<comfort::WindowMetrics>& metrics) {
  if (features.size() != metrics.size()) {
    throw DataError("correlation table: feature and metric counts differ");
  }
  if (features.size() < 2) throw DataError("correlation table: need at least 2 windows");
  CorrelationTable table;
  table.features = all_features();
  table.targets.assign(kAllTargets.begin(), kAllTargets.end());

  std::vector<std::vector<double>> columns;
  for (const auto& id : table.features) {
    std::vector<double> col;
    col.reserve(features.size());
    for (const auto& f : features) col.push_back(f.value(id));
    columns.push_back(std::move(col));
  }
  for (const auto t : table.targets) {
    std::vector<double> y;
    y.reserve(metrics.size());
    for (const auto& m : metrics) y.push_back(target_value(m, t));
    std::vector<double> row;
    for (const auto& col : columns) row.push_back(pearson(col, y));
    table.pcc.push_back(std::move(row));
  }
  return table;
}

FeatureSet select_by_threshold(const CorrelationTable& table, double threshold) {
  FeatureSet out;
  for (std::size_t f = 0; f < table.features.size(); ++f) {
    for (std::size_t t = 0; t < table.targets.size(); ++t) {
      if (std::abs(table.pcc[t][f]) >= threshold) {
        out.push_back(table.features[f]);
        break;
      }
    }
  }
  return out;
}

void write_correlation_csv(std::ostream& out, const CorrelationTable& table) {
  out << "target";
  for (const auto& f : table.features) out << ',' << feature_name(f);
  out << '\n';
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(4);
  for (std::size_t t = 0; t < table.targets.size(); ++t) {
    out << target_name(table.targets[t]);
    for (double r : table.pcc[t]) out << ',' << r;
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

FeatureVector Normalizer::apply(const FeatureVector& v) const {
  if (v.size() != dimension()) {
    throw DataError("normalizer expects dimension " + std::to_string(dimension()) + ", got " +
                    std::to_string(v.size()));
  }
  FeatureVector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - mean[j]) / stddev[j];
  return out;
}

FeatureVector Normalizer::invert(const FeatureVector& v) const {
  if (v.size() != dimension()) throw DataError("normalizer dimension mismatch");
  FeatureVector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] * stddev[j] + mean[j];
  return out;
}

std::vector<FeatureVector> Normalizer::apply(const std::vector<FeatureVector>& vs) const {
  std::vector<FeatureVector> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(apply(v));
  return out;
}

Normalizer fit_normalizer(const std::vector<FeatureVector>& training,
                          std::vector<std::string> names) {
  if (training.size() < 2) throw DataError("normalizer needs at least 2 training vectors");
  const std::size_t dim = training.front().size();
  if (dim == 0) throw DataError("normalizer: empty feature vectors");
  if (names.empty()) {
    for (std::size_t j = 0; j < dim; ++j) names.push_back("feature_" + std::to_string(j));
  }
  if (names.size() != dim) throw ConfigError("normalizer: name count does not match dimension");

  Normalizer n;
  n.names = std::move(names);
  n.mean.assign(dim, 0.0);
  n.stddev.assign(dim, 0.0);
  for (const auto& v : training) {
    if (v.size() != dim) throw DataError("normalizer: inconsistent vector dimensions");
    for (std::size_t j = 0; j < dim; ++j) n.mean[j] += v[j];
  }
  const double count = static_cast<double>(training.size());
  for (auto& m : n.mean) m /= count;
  for (const auto& v : training) {
    for (std::size_t j = 0; j < dim; ++j) n.stddev[j] += (v[j] - n.mean[j]) * (v[j] - n.mean[j]);
  }
  for (std::size_t j = 0; j < dim; ++j) {
    n.stddev[j] = std::sqrt(n.stddev[j] / count);
    const bool constant = std::all_of(training.begin(), training.end(),
                                      [&](const FeatureVector& v) { return v[j] == training[0][j]; });
    if (constant || !(n.stddev[j] > 0.0)) {
      throw DataError("feature '" + n.names[j] + "' has zero standard deviation");
    }
  }
  return n;
}

}  // namespace ecodrive::features
