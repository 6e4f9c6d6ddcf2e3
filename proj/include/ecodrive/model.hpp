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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecodrive/features.hpp"
#include "ecodrive/levels.hpp"
#include "ecodrive/som.hpp"

namespace ecodrive::model {

struct Seeds {
  std::uint64_t init = 0;
  std::uint64_t train = 0;
  std::uint64_t cluster = 0;
};

/// A trained, clustered and labelled map together with everything needed to
/// classify raw window features: feature order and normalizer parameters.
struct SomModel {
  std::string role;  // "main" or "auxiliary"
  features::FeatureSet feature_set;
  features::Normalizer normalizer;
  som::SomGrid grid;
  som::TrainingSchedule schedule;
  Seeds seeds;
  std::size_t cluster_restarts = 32;
  som::ClusterPartition partition;
  std::string ordering_metric;      // metric used to assign labels
  std::vector<Level> cluster_labels;  // one per cluster; empty if unlabelled

  /// Cluster label of the BMU for an already extracted, raw feature vector.
  Level classify(const features::FeatureVector& raw) const;
  Level classify(const features::WindowFeatures& window) const;
  std::size_t cluster_of(const features::FeatureVector& raw) const;
};

std::string to_json(const SomModel& model);
SomModel from_json(std::string_view text);

void save(const SomModel& model, const std::filesystem::path& path);
SomModel load(const std::filesystem::path& path);

}  // namespace ecodrive::model
