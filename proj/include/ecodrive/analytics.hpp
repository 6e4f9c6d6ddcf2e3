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
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ecodrive/advisor.hpp"
#include "ecodrive/comfort.hpp"

namespace ecodrive::analytics {

struct DriverSummary {
  std::string driver_id;
  std::size_t window_count = 0;
  double mean_fuel = 0.0;
  double mean_vr = 0.0;
  double mean_msdv_x = 0.0;
  double mean_msdv_y = 0.0;
  double mean_n_x_pos = 0.0;
  double mean_n_x_neg = 0.0;
  double mean_n_y = 0.0;
};

/// Per-driver means; drivers without windows are left out.
std::vector<DriverSummary> driver_summary(
    const std::map<std::string, std::vector<comfort::WindowMetrics>>& by_driver);

void write_summary_csv(std::ostream& out, const std::vector<DriverSummary>& summaries);

struct Point2 {
  double x;  // fuel [l/100km]
  double y;  // VR [m/s^2]
};

/// Product-Gaussian density evaluated on a regular node grid.
struct KdeSurface {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double x0 = 0.0, dx = 0.0;
  double y0 = 0.0, dy = 0.0;
  double hx = 0.0, hy = 0.0;
  std::size_t points = 0;
  std::vector<double> density;  // [iy * nx + ix]

  double x(std::size_t ix) const { return x0 + dx * static_cast<double>(ix); }
  double y(std::size_t iy) const { return y0 + dy * static_cast<double>(iy); }
  double at(std::size_t ix, std::size_t iy) const { return density[iy * nx + ix]; }
  /// Riemann sum of density times cell area.
  double integral() const;
  std::pair<std::size_t, std::size_t> argmax() const;
};

/// Silverman rule of thumb, h = 1.06 sigma n^(-1/5).
double silverman_bandwidth(const std::vector<double>& values);

/// Surface over [min - pad*h, max + pad*h] on each axis. Throws DataError
/// for fewer than 2 points or an axis without spread.
KdeSurface kde2d(const std::vector<Point2>& points, std::size_t nx = 64, std::size_t ny = 64,
                 double pad_bandwidths = 3.0);

/// Rows of (fuel, vr, density).
void write_kde_csv(std::ostream& out, const KdeSurface& surface);
/// Bandwidths, bounds, resolution and integral as JSON.
std::string kde_sidecar_json(const KdeSurface& surface);

std::map<std::string, advisor::IntersectionTable> driver_heatmap(
    const std::map<std::string, std::vector<advisor::Classification>>& by_driver);

}  // namespace ecodrive::analytics
