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

#include "ecodrive/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

#include <json.hpp>

#include "ecodrive/errors.hpp"

namespace ecodrive::analytics {

std::vector<DriverSummary> driver_summary(
    const std::map<std::string, std::vector<comfort::WindowMetrics>>& by_driver) {
  std::vector<DriverSummary> out;
  for (const auto& [id, windows] : by_driver) {
    if (windows.empty()) continue;
    DriverSummary s;
    s.driver_id = id;
    s.window_count = windows.size();
    for (const auto& w : windows) {
      s.mean_fuel += w.fuel;
      s.mean_vr += w.vr;
      s.mean_msdv_x += w.msdv_x;
      s.mean_msdv_y += w.msdv_y;
      s.mean_n_x_pos += static_cast<double>(w.n_x_pos);
      s.mean_n_x_neg += static_cast<double>(w.n_x_neg);
      s.mean_n_y += static_cast<double>(w.n_y);
    }
    const double n = static_cast<double>(windows.size());
    for (double* v : {&s.mean_fuel, &s.mean_vr, &s.mean_msdv_x, &s.mean_msdv_y, &s.mean_n_x_pos,
                      &s.mean_n_x_neg, &s.mean_n_y}) {
      *v /= n;
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<DriverSummary>& summaries) {
  out << "driver_id,windows,fuel,vr,msdv_x,msdv_y,n_x_pos,n_x_neg,n_y\n";
  const auto precision = out.precision(8);
  for (const auto& s : summaries) {
    out << s.driver_id << ',' << s.window_count << ',' << s.mean_fuel << ',' << s.mean_vr << ','
        << s.mean_msdv_x << ',' << s.mean_msdv_y << ',' << s.mean_n_x_pos << ','
        << s.mean_n_x_neg << ',' << s.mean_n_y << '\n';
  }
  out.precision(precision);
}

double KdeSurface::integral() const {
  double sum = 0.0;
  for (double d : density) sum += d;
  return sum * dx * dy;
}

std::pair<std::size_t, std::size_t> KdeSurface::argmax() const {
  const auto it = std::max_element(density.begin(), density.end());
  const auto k = static_cast<std::size_t>(it - density.begin());
  return {k % nx, k / nx};
}

double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw DataError("bandwidth needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / (n - 1.0));
  return 1.06 * sigma * std::pow(n, -0.2);
}

KdeSurface kde2d(const std::vector<Point2>& points, std::size_t nx, std::size_t ny,
                 double pad_bandwidths) {
  if (points.size() < 2) throw DataError("KDE needs at least 2 points");
  if (nx < 2 || ny < 2) throw ConfigError("KDE grid needs at least 2 nodes per axis");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  KdeSurface s;
  s.nx = nx;
  s.ny = ny;
  s.points = points.size();
  s.hx = silverman_bandwidth(xs);
  s.hy = silverman_bandwidth(ys);
  if (!(s.hx > 0.0)) throw DataError("KDE: fuel axis has no spread");
  if (!(s.hy > 0.0)) throw DataError("KDE: VR axis has no spread");

  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  s.x0 = *xmin - pad_bandwidths * s.hx;
  s.y0 = *ymin - pad_bandwidths * s.hy;
  s.dx = (*xmax + pad_bandwidths * s.hx - s.x0) / static_cast<double>(nx - 1);
  s.dy = (*ymax + pad_bandwidths * s.hy - s.y0) / static_cast<double>(ny - 1);

  // Separable kernel: precompute per-axis Gaussian factors.
  const std::size_t n = points.size();
  std::vector<double> kx(nx * n);
  std::vector<double> ky(ny * n);
  const double cx = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * s.hx);
  const double cy = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * s.hy);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (s.x(ix) - xs[k]) / s.hx;
      kx[ix * n + k] = cx * std::exp(-0.5 * u * u);
    }
  }
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (s.y(iy) - ys[k]) / s.hy;
      ky[iy * n + k] = cy * std::exp(-0.5 * u * u);
    }
  }
  s.density.assign(nx * ny, 0.0);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += kx[ix * n + k] * ky[iy * n + k];
      s.density[iy * nx + ix] = sum / static_cast<double>(n);
    }
  }
  return s;
}

void write_kde_csv(std::ostream& out, const KdeSurface& s) {
  out << "fuel,vr,density\n";
  const auto precision = out.precision(10);
  for (std::size_t iy = 0; iy < s.ny; ++iy) {
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      out << s.x(ix) << ',' << s.y(iy) << ',' << s.at(ix, iy) << '\n';
    }
  }
  out.precision(precision);
}

std::string kde_sidecar_json(const KdeSurface& s) {
  nlohmann::ordered_json j;
  j["kernel"] = "gaussian-product";
  j["bandwidth_rule"] = "silverman";
  j["bandwidth"] = {{"fuel", s.hx}, {"vr", s.hy}};
  j["bounds"] = {{"fuel", {s.x0, s.x(s.nx - 1)}}, {"vr", {s.y0, s.y(s.ny - 1)}}};
  j["resolution"] = {{"fuel", s.nx}, {"vr", s.ny}};
  j["points"] = s.points;
  j["integral"] = s.integral();
  return j.dump(2) + "\n";
}

std::map<std::string, advisor::IntersectionTable> driver_heatmap(
    const std::map<std::string, std::vector<advisor::Classification>>& by_driver) {
  std::map<std::string, advisor::IntersectionTable> out;
  for (const auto& [id, windows] : by_driver) out.emplace(id, advisor::intersect(windows));
  return out;
}

}  // namespace ecodrive::analytics
