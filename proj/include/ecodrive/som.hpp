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

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ecodrive/features.hpp"

namespace ecodrive::som {

using features::FeatureVector;

/// Hexagonal map with odd rows shifted right by half a cell. Neurons are
/// indexed row-major: i = row * cols + col.
class SomGrid {
public:
  SomGrid() = default;
  SomGrid(std::size_t rows, std::size_t cols, std::size_t dim);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_ * cols_; }

  std::span<const double> prototype(std::size_t i) const;
  std::span<double> prototype(std::size_t i);
  const std::vector<double>& weights() const { return weights_; }
  void set_weights(std::vector<double> w);

  /// Hex step distance between two neurons.
  int grid_distance(std::size_t a, std::size_t b) const;
  /// Neurons at grid distance 1, ascending index.
  std::vector<std::size_t> neighbors(std::size_t i) const;

  friend bool operator==(const SomGrid&, const SomGrid&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
};

/// Linear decay of the learning rate and Gaussian neighbourhood width from
/// their initial values to their floors over `total_iterations`.
struct TrainingSchedule {
  std::size_t total_iterations = 0;
  double alpha0 = 0.5;
  double alpha_min = 0.01;
  double sigma0 = 7.5;
  double sigma_min = 0.5;

  /// 20 iterations per sample, alpha 0.5 -> 0.01, sigma max(rows,cols)/2 -> 0.5.
  static TrainingSchedule defaults(std::size_t rows, std::size_t cols, std::size_t samples);

  double alpha(std::size_t n) const;
  double sigma(std::size_t n) const;
  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

/// M = 5 sqrt(K) neurons, laid out as a round(sqrt(M)) square.
std::pair<std::size_t, std::size_t> vesanto_size(std::size_t samples);

/// Prototypes drawn uniformly within the per-feature [min, max] of `samples`.
SomGrid init_random(std::size_t rows, std::size_t cols, const std::vector<FeatureVector>& samples,
                    std::uint64_t seed);

struct Bmu {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Nearest prototype by Euclidean distance; ties go to the lowest index.
Bmu bmu(const SomGrid& grid, std::span<const double> x);

/// Mean distance from each sample to its BMU.
double quantization_error(const SomGrid& grid, const std::vector<FeatureVector>& samples);

struct TrainResult {
  SomGrid grid;
  double initial_qe = 0.0;
  /// Quantization error after each epoch (one epoch = samples.size()
  /// iterations) and after the final iteration.
  std::vector<double> epoch_qe;
};

/// Sequential Kohonen training: one uniformly drawn sample per iteration,
/// m_i += alpha(n) * exp(-d(c,i)^2 / (2 sigma(n)^2)) * (x - m_i).
TrainResult train(SomGrid grid, const std::vector<FeatureVector>& samples,
                  const TrainingSchedule& schedule, std::uint64_t seed);

struct UMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

UMatrix u_matrix(const SomGrid& grid);

struct ClusterPartition {
  std::size_t count = 0;
  std::vector<std::size_t> assignment;  // neuron -> cluster id

  friend bool operator==(const ClusterPartition&, const ClusterPartition&) = default;
};

struct KMeansResult {
  ClusterPartition partition;
  double cost = 0.0;  // within-cluster sum of squares
  std::vector<double> best_cost_history;  // best-so-far after each restart
};

/// k-means with k-means++ seeding over arbitrary points. Cluster ids are
/// renumbered in order of first appearance.
KMeansResult kmeans(const std::vector<FeatureVector>& points, std::size_t clusters,
                    std::size_t restarts, std::uint64_t seed);

double within_cluster_ss(const std::vector<FeatureVector>& points, const ClusterPartition& p);

std::vector<FeatureVector> prototypes(const SomGrid& grid);

/// Partition of the map's neurons into `clusters` groups by k-means on the
/// prototype vectors. Throws ConfigError if clusters is 0 or exceeds M.
ClusterPartition cluster_prototypes(const SomGrid& grid, std::size_t clusters,
                                    std::size_t restarts = 32, std::uint64_t seed = 0);

std::vector<std::size_t> hit_histogram(const SomGrid& grid,
                                       const std::vector<FeatureVector>& samples);

}  // namespace ecodrive::som
