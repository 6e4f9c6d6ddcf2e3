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
#include <vector>

#include "ecodrive/telemetry.hpp"

namespace ecodrive::comfort {

enum class FilterKind { MotionSickness, Horizontal, Vertical };

/// Transposed direct-form II second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Band-pass weighting filter: a Butterworth high-pass section at the low
/// corner cascaded with a Butterworth low-pass section at the high corner,
/// both mapped to discrete time with the prewarped bilinear transform.
struct WeightingFilter {
  FilterKind kind = FilterKind::MotionSickness;
  double low_corner = 0.0;   // Hz
  double high_corner = 0.0;  // Hz
  double sample_rate = telemetry::kSampleRate;
  std::array<Biquad, 2> sections{};
};

/// Corners used when `design_filter(kind)` is called without overrides:
/// w_f (0.02, 0.3) Hz, w_d (0.4, 2.0) Hz, w_k (0.4, 12.5) Hz.
std::array<double, 2> default_corners(FilterKind kind);

WeightingFilter design_filter(FilterKind kind, double low_corner, double high_corner,
                              double sample_rate = telemetry::kSampleRate);
WeightingFilter design_filter(FilterKind kind);

/// Causal forward filtering from zero initial state.
std::vector<double> apply_filter(const WeightingFilter& filter, std::span<const double> signal);

/// Analytic |H(e^{j2πf/fs})| of the cascade. Diagnostic only.
double magnitude_response(const WeightingFilter& filter, double frequency);

/// sqrt(mean(a^2)) over the span.
double weighted_rms(std::span<const double> filtered);

/// Windowed RMS of an axis that has already been w_f-filtered.
std::vector<double> msdv(std::span<const double> filtered_axis,
                         const std::vector<telemetry::Window>& windows);

/// sqrt((1/3)^2 msdv_x^2 + (sqrt(2)/3)^2 msdv_y^2)
double vomit_rate(double msdv_x, double msdv_y);

inline constexpr double kPeakThreshold = 1.75;  // m/s^2

/// Number of maximal runs of consecutive samples strictly above threshold.
std::size_t count_peaks(std::span<const double> signal, double threshold = kPeakThreshold);

/// Weighted RMS accelerations: x and y through w_d, z through w_k.
struct WeightedAccel {
  double x_wd = 0.0;
  double y_wd = 0.0;
  std::optional<double> z_wk;
};

struct WindowMetrics {
  std::size_t window_start = 0;
  double msdv_x = 0.0;  // m/s^2
  double msdv_y = 0.0;  // m/s^2
  double vr = 0.0;      // m/s^2
  std::size_t n_x_pos = 0;
  std::size_t n_x_neg = 0;
  std::size_t n_y = 0;
  double fuel = 0.0;  // l/100km, window mean
  std::optional<WeightedAccel> weighted;
};

struct MetricsOptions {
  double peak_threshold = kPeakThreshold;
  std::array<double, 2> motion_corners = default_corners(FilterKind::MotionSickness);
  bool include_weighted_rms = false;
};

/// Filters XACC and YACC once over the whole record, then evaluates every
/// window. XACC peaks are split into the positive part and the magnitude of
/// the negative part; lateral peaks use |YACC|.
std::vector<WindowMetrics> window_metrics(const telemetry::DriveRecord& record,
                                          const std::vector<telemetry::Window>& windows,
                                          const MetricsOptions& options = {});

void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_rows(std::ostream& out, const std::string& driver_id,
                            const std::vector<WindowMetrics>& metrics);

}  // namespace ecodrive::comfort
