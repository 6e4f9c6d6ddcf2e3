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

#include "ecodrive/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ecodrive/errors.hpp"

namespace ecodrive {

std::string_view level_name(Level l) {
  switch (l) {
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: return "High";
  }
  return "";
}

char level_letter(Level l) { return level_name(l).front(); }

std::optional<Level> parse_level(std::string_view s) {
  if (s == "Low" || s == "L") return Level::Low;
  if (s == "Medium" || s == "M") return Level::Medium;
  if (s == "High" || s == "H") return Level::High;
  return std::nullopt;
}

}  // namespace ecodrive

namespace ecodrive::model {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kFormat = "ecodrive-som-model";
constexpr int kVersion = 1;

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("model file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: bad field '") + key + "': " + e.what());
  }
}

}  // namespace

std::size_t SomModel::cluster_of(const features::FeatureVector& raw) const {
  const auto idx = som::bmu(grid, normalizer.apply(raw)).index;
  return partition.assignment.at(idx);
}

Level SomModel::classify(const features::FeatureVector& raw) const {
  if (cluster_labels.size() != partition.count) {
    throw DataError("model '" + role + "' has no cluster labels");
  }
  return cluster_labels[cluster_of(raw)];
}

Level SomModel::classify(const features::WindowFeatures& window) const {
  return classify(features::extract(window, feature_set));
}

std::string to_json(const SomModel& m) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["role"] = m.role;
  j["grid"] = {{"rows", m.grid.rows()},
               {"cols", m.grid.cols()},
               {"dim", m.grid.dim()},
               {"topology", "hexagonal"},
               {"offset", "odd-rows"}};
  j["features"] = features::feature_names(m.feature_set);
  j["normalizer"] = {{"mean", m.normalizer.mean}, {"stddev", m.normalizer.stddev}};
  Json protos = Json::array();
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    const auto p = m.grid.prototype(i);
    protos.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["prototypes"] = std::move(protos);
  j["partition"] = {{"count", m.partition.count}, {"assignment", m.partition.assignment}};
  std::vector<std::string> labels;
  for (auto l : m.cluster_labels) labels.emplace_back(level_name(l));
  j["labels"] = {{"ordering_metric", m.ordering_metric}, {"cluster_labels", labels}};
  j["schedule"] = {{"total_iterations", m.schedule.total_iterations},
                   {"alpha0", m.schedule.alpha0},
                   {"alpha_min", m.schedule.alpha_min},
                   {"sigma0", m.schedule.sigma0},
                   {"sigma_min", m.schedule.sigma_min}};
  j["seeds"] = {{"init", m.seeds.init}, {"train", m.seeds.train}, {"cluster", m.seeds.cluster}};
  j["cluster_restarts"] = m.cluster_restarts;
  return j.dump(2) + "\n";
}

SomModel from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: invalid JSON: ") + e.what());
  }
  if (field<std::string>(j, "format") != kFormat) throw DataError("model file: unknown format");
  if (field<int>(j, "version") != kVersion) throw DataError("model file: unsupported version");

  SomModel m;
  m.role = field<std::string>(j, "role");
  const auto& g = j.at("grid");
  if (field<std::string>(g, "topology") != "hexagonal") {
    throw DataError("model file: only hexagonal maps are supported");
  }
  const auto rows = field<std::size_t>(g, "rows");
  const auto cols = field<std::size_t>(g, "cols");
  const auto dim = field<std::size_t>(g, "dim");
  try {
    m.feature_set = features::parse_feature_set(field<std::vector<std::string>>(j, "features"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  if (m.feature_set.size() != dim) throw DataError("model file: feature count != dimension");

  const auto& nj = j.at("normalizer");
  m.normalizer.names = features::feature_names(m.feature_set);
  m.normalizer.mean = field<std::vector<double>>(nj, "mean");
  m.normalizer.stddev = field<std::vector<double>>(nj, "stddev");
  if (m.normalizer.mean.size() != dim || m.normalizer.stddev.size() != dim) {
    throw DataError("model file: normalizer dimension mismatch");
  }

  m.grid = som::SomGrid(rows, cols, dim);
  const auto protos = field<std::vector<std::vector<double>>>(j, "prototypes");
  if (protos.size() != rows * cols) throw DataError("model file: prototype count mismatch");
  std::vector<double> w;
  w.reserve(rows * cols * dim);
  for (const auto& p : protos) {
    if (p.size() != dim) throw DataError("model file: prototype dimension mismatch");
    w.insert(w.end(), p.begin(), p.end());
  }
  m.grid.set_weights(std::move(w));

  const auto& pj = j.at("partition");
  m.partition.count = field<std::size_t>(pj, "count");
  m.partition.assignment = field<std::vector<std::size_t>>(pj, "assignment");
  if (m.partition.assignment.size() != m.grid.size()) {
    throw DataError("model file: partition does not cover every neuron");
  }
  for (auto c : m.partition.assignment) {
    if (c >= m.partition.count) throw DataError("model file: cluster id out of range");
  }

  const auto& lj = j.at("labels");
  m.ordering_metric = field<std::string>(lj, "ordering_metric");
  for (const auto& s : field<std::vector<std::string>>(lj, "cluster_labels")) {
    const auto l = parse_level(s);
    if (!l) throw DataError("model file: bad label '" + s + "'");
    m.cluster_labels.push_back(*l);
  }
  if (!m.cluster_labels.empty() && m.cluster_labels.size() != m.partition.count) {
    throw DataError("model file: label count != cluster count");
  }

  const auto& sj = j.at("schedule");
  m.schedule.total_iterations = field<std::size_t>(sj, "total_iterations");
  m.schedule.alpha0 = field<double>(sj, "alpha0");
  m.schedule.alpha_min = field<double>(sj, "alpha_min");
  m.schedule.sigma0 = field<double>(sj, "sigma0");
  m.schedule.sigma_min = field<double>(sj, "sigma_min");
  const auto& seeds = j.at("seeds");
  m.seeds.init = field<std::uint64_t>(seeds, "init");
  m.seeds.train = field<std::uint64_t>(seeds, "train");
  m.seeds.cluster = field<std::uint64_t>(seeds, "cluster");
  m.cluster_restarts = field<std::size_t>(j, "cluster_restarts");
  return m;
}

void save(const SomModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << to_json(model);
  if (!out) throw DataError("failed writing model file " + path.string());
}

SomModel load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace ecodrive::model
