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

#include "ecodrive/som.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "ecodrive/errors.hpp"
#include "ecodrive/random.hpp"

namespace ecodrive::som {

namespace {

struct Cube {
  int x, y, z;
};

Cube to_cube(std::size_t index, std::size_t cols) {
  const int r = static_cast<int>(index / cols);
  const int c = static_cast<int>(index % cols);
  const int x = c - (r - (r & 1)) / 2;
  const int z = r;
  return {x, -x - z, z};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

void check_samples(const std::vector<FeatureVector>& samples, std::size_t dim) {
  for (const auto& s : samples) {
    if (s.size() != dim) {
      throw DataError("sample dimension " + std::to_string(s.size()) + " does not match map dimension " +
                      std::to_string(dim));
    }
  }
}

std::vector<std::vector<double>> centroids_of(const std::vector<FeatureVector>& points,
                                              const std::vector<std::size_t>& assign,
                                              std::size_t k, std::vector<std::size_t>& counts) {
  const std::size_t dim = points.front().size();
  std::vector<std::vector<double>> c(k, std::vector<double>(dim, 0.0));
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[assign[i]];
    for (std::size_t j = 0; j < dim; ++j) c[assign[i]][j] += points[i][j];
  }
  for (std::size_t q = 0; q < k; ++q) {
    if (counts[q] == 0) continue;
    for (auto& v : c[q]) v /= static_cast<double>(counts[q]);
  }
  return c;
}

// Moves the member of the largest cluster farthest from its centroid into
// each empty cluster.
bool repair_empty(const std::vector<FeatureVector>& points, std::vector<std::size_t>& assign,
                  std::size_t k) {
  bool changed = false;
  while (true) {
    std::vector<std::size_t> counts;
    const auto c = centroids_of(points, assign, k, counts);
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) return changed;
    const auto largest =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (assign[i] != largest) continue;
      const double d = squared_distance(points[i], c[largest]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assign[far] = static_cast<std::size_t>(empty - counts.begin());
    changed = true;
  }
}

std::vector<std::size_t> canonical(const std::vector<std::size_t>& assign, std::size_t k) {
  std::vector<std::size_t> remap(k, k);
  std::size_t next = 0;
  std::vector<std::size_t> out(assign.size());
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (remap[assign[i]] == k) remap[assign[i]] = next++;
    out[i] = remap[assign[i]];
  }
  return out;
}

std::vector<std::size_t> kmeans_once(const std::vector<FeatureVector>& points, std::size_t k,
                                     Rng& rng) {
  const std::size_t n = points.size();
  // k-means++ seeding.
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(uniform_index(rng, n)));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], points[chosen.back()]));
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > r && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a centre; take any unchosen one.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
      }
      pick = rest[uniform_index(rng, rest.size())];
    }
    chosen.push_back(pick);
  }

  std::vector<std::vector<double>> centres;
  for (auto i : chosen) centres.push_back(points[i]);
  std::vector<std::size_t> assign(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < k; ++q) {
        const double d = squared_distance(points[i], centres[q]);
        if (d < best_d) {
          best_d = d;
          best = q;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    changed = repair_empty(points, assign, k) || changed;
    if (!changed) break;
    std::vector<std::size_t> counts;
    centres = centroids_of(points, assign, k, counts);
  }
  return assign;
}

}  // namespace

SomGrid::SomGrid(std::size_t rows, std::size_t cols, std::size_t dim)
    : rows_(rows), cols_(cols), dim_(dim), weights_(rows * cols * dim, 0.0) {
  if (rows == 0 || cols == 0 || dim == 0) throw ConfigError("map dimensions must be positive");
}

std::span<const double> SomGrid::prototype(std::size_t i) const {
  return std::span<const double>(weights_).subspan(i * dim_, dim_);
}

std::span<double> SomGrid::prototype(std::size_t i) {
  return std::span<double>(weights_).subspan(i * dim_, dim_);
}

void SomGrid::set_weights(std::vector<double> w) {
  if (w.size() != weights_.size()) throw DataError("weight count does not match map shape");
  for (double v : w) {
    if (!std::isfinite(v)) throw DataError("non-finite prototype weight");
  }
  weights_ = std::move(w);
}

int SomGrid::grid_distance(std::size_t a, std::size_t b) const {
  const Cube p = to_cube(a, cols_);
  const Cube q = to_cube(b, cols_);
  return std::max({std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
}

std::vector<std::size_t> SomGrid::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  const std::size_t r = i / cols_;
  const std::size_t r0 = r == 0 ? 0 : r - 1;
  const std::size_t r1 = std::min(rows_ - 1, r + 1);
  for (std::size_t rr = r0; rr <= r1; ++rr) {
    for (std::size_t cc = 0; cc < cols_; ++cc) {
      const std::size_t j = rr * cols_ + cc;
      if (j != i && grid_distance(i, j) == 1) out.push_back(j);
    }
  }
  return out;
}

TrainingSchedule TrainingSchedule::defaults(std::size_t rows, std::size_t cols,
                                            std::size_t samples) {
  TrainingSchedule s;
  s.total_iterations = 20 * std::max<std::size_t>(samples, 1);
  s.alpha0 = 0.5;
  s.alpha_min = 0.01;
  s.sigma0 = std::max(0.5, static_cast<double>(std::max(rows, cols)) / 2.0);
  s.sigma_min = 0.5;
  return s;
}

double TrainingSchedule::alpha(std::size_t n) const {
  if (total_iterations <= 1) return alpha0;
  const double f = static_cast<double>(std::min(n, total_iterations - 1)) /
                   static_cast<double>(total_iterations - 1);
  return alpha0 + (alpha_min - alpha0) * f;
}

double TrainingSchedule::sigma(std::size_t n) const {
  if (total_iterations <= 1) return sigma0;
  const double f = static_cast<double>(std::min(n, total_iterations - 1)) /
                   static_cast<double>(total_iterations - 1);
  return sigma0 + (sigma_min - sigma0) * f;
}

void TrainingSchedule::validate() const {
  if (total_iterations == 0) throw ConfigError("schedule needs at least one iteration");
  if (!(alpha0 >= 0.0 && alpha0 <= 1.0)) throw ConfigError("alpha0 must lie in [0, 1]");
  if (!(alpha_min >= 0.0 && alpha_min <= alpha0)) {
    throw ConfigError("alpha_min must lie in [0, alpha0]");
  }
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
  if (!(sigma_min > 0.0 && sigma_min <= sigma0)) {
    throw ConfigError("sigma_min must lie in (0, sigma0]");
  }
}

std::pair<std::size_t, std::size_t> vesanto_size(std::size_t samples) {
  if (samples == 0) throw ConfigError("map sizing needs at least one sample");
  const double m = 5.0 * std::sqrt(static_cast<double>(samples));
  const auto side = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(m))));
  return {side, side};
}

SomGrid init_random(std::size_t rows, std::size_t cols, const std::vector<FeatureVector>& samples,
                    std::uint64_t seed) {
  if (samples.empty()) throw DataError("initialisation needs at least one sample");
  const std::size_t dim = samples.front().size();
  check_samples(samples, dim);
  std::vector<double> lo(samples.front());
  std::vector<double> hi(samples.front());
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], s[j]);
      hi[j] = std::max(hi[j], s[j]);
    }
  }
  SomGrid grid(rows, cols, dim);
  Rng rng(seed);
  std::vector<double> w(grid.size() * dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      w[i * dim + j] = lo[j] == hi[j] ? lo[j] : uniform(rng, lo[j], hi[j]);
    }
  }
  grid.set_weights(std::move(w));
  return grid;
}

Bmu bmu(const SomGrid& grid, std::span<const double> x) {
  if (x.size() != grid.dim()) {
    throw DataError("input dimension " + std::to_string(x.size()) + " does not match map dimension " +
                    std::to_string(grid.dim()));
  }
  Bmu best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = squared_distance(grid.prototype(i), x);
    if (d < best.distance) best = {i, d};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

double quantization_error(const SomGrid& grid, const std::vector<FeatureVector>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) sum += bmu(grid, s).distance;
  return sum / static_cast<double>(samples.size());
}

TrainResult train(SomGrid grid, const std::vector<FeatureVector>& samples,
                  const TrainingSchedule& schedule, std::uint64_t seed) {
  if (samples.empty()) throw DataError("training needs at least one sample");
  check_samples(samples, grid.dim());
  schedule.validate();

  const std::size_t m = grid.size();
  std::vector<double> d2(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double d = grid.grid_distance(a, b);
      d2[a * m + b] = d * d;
    }
  }

  TrainResult result;
  result.initial_qe = quantization_error(grid, samples);
  Rng rng(seed);
  const std::size_t epoch = samples.size();
  const std::size_t dim = grid.dim();
  for (std::size_t n = 0; n < schedule.total_iterations; ++n) {
    const auto& x = samples[uniform_index(rng, samples.size())];
    const std::size_t c = bmu(grid, x).index;
    const double alpha = schedule.alpha(n);
    const double sigma = schedule.sigma(n);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    if (alpha > 0.0) {
      for (std::size_t i = 0; i < m; ++i) {
        const double h = alpha * std::exp(-d2[c * m + i] * inv);
        if (h == 0.0) continue;
        auto w = grid.prototype(i);
        for (std::size_t j = 0; j < dim; ++j) w[j] += h * (x[j] - w[j]);
      }
    }
    if ((n + 1) % epoch == 0 || n + 1 == schedule.total_iterations) {
      result.epoch_qe.push_back(quantization_error(grid, samples));
    }
  }
  result.grid = std::move(grid);
  return result;
}

UMatrix u_matrix(const SomGrid& grid) {
  UMatrix u{grid.rows(), grid.cols(), std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto nb = grid.neighbors(i);
    if (nb.empty()) continue;
    double sum = 0.0;
    for (auto j : nb) sum += std::sqrt(squared_distance(grid.prototype(i), grid.prototype(j)));
    u.values[i] = sum / static_cast<double>(nb.size());
  }
  return u;
}

double within_cluster_ss(const std::vector<FeatureVector>& points, const ClusterPartition& p) {
  if (points.empty()) return 0.0;
  std::vector<std::size_t> counts;
  const auto c = centroids_of(points, p.assignment, p.count, counts);
  double cost = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cost += squared_distance(points[i], c[p.assignment[i]]);
  }
  return cost;
}

KMeansResult kmeans(const std::vector<FeatureVector>& points, std::size_t clusters,
                    std::size_t restarts, std::uint64_t seed) {
  if (points.empty()) throw DataError("k-means needs at least one point");
  if (clusters == 0 || clusters > points.size()) {
    throw ConfigError("cluster count must lie in [1, " + std::to_string(points.size()) + "]");
  }
  check_samples(points, points.front().size());
  Rng rng(seed);
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    ClusterPartition p{clusters, canonical(kmeans_once(points, clusters, rng), clusters)};
    const double cost = within_cluster_ss(points, p);
    if (cost < best.cost) {
      best.cost = cost;
      best.partition = std::move(p);
    }
    best.best_cost_history.push_back(best.cost);
  }
  return best;
}

std::vector<FeatureVector> prototypes(const SomGrid& grid) {
  std::vector<FeatureVector> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.prototype(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

ClusterPartition cluster_prototypes(const SomGrid& grid, std::size_t clusters,
                                    std::size_t restarts, std::uint64_t seed) {
  if (clusters == 0 || clusters > grid.size()) {
    throw ConfigError("cluster count " + std::to_string(clusters) + " must lie in [1, " +
                      std::to_string(grid.size()) + "]");
  }
  return kmeans(prototypes(grid), clusters, restarts, seed).partition;
}

std::vector<std::size_t> hit_histogram(const SomGrid& grid,
                                       const std::vector<FeatureVector>& samples) {
  std::vector<std::size_t> hits(grid.size(), 0);
  for (const auto& s : samples) ++hits[bmu(grid, s).index];
  return hits;
}

}  // namespace ecodrive::som
