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

#include "ecodrive/comfort.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ecodrive/errors.hpp"

namespace ecodrive::comfort {

namespace {

using telemetry::Channel;

constexpr double kButterworthQ = std::numbers::sqrt2 / 2.0;

Biquad butterworth_lowpass(double corner, double fs) {
  const double k = std::tan(std::numbers::pi * corner / fs);
  const double norm = 1.0 / (1.0 + k / kButterworthQ + k * k);
  Biquad s;
  s.b0 = k * k * norm;
  s.b1 = 2.0 * s.b0;
  s.b2 = s.b0;
  s.a1 = 2.0 * (k * k - 1.0) * norm;
  s.a2 = (1.0 - k / kButterworthQ + k * k) * norm;
  return s;
}

Biquad butterworth_highpass(double corner, double fs) {
  const double k = std::tan(std::numbers::pi * corner / fs);
  const double norm = 1.0 / (1.0 + k / kButterworthQ + k * k);
  Biquad s;
  s.b0 = norm;
  s.b1 = -2.0 * norm;
  s.b2 = norm;
  s.a1 = 2.0 * (k * k - 1.0) * norm;
  s.a2 = (1.0 - k / kButterworthQ + k * k) * norm;
  return s;
}

double rms(std::span<const double> v) {
  if (v.empty()) throw DataError("RMS of an empty window");
  double sum = 0.0;
  for (double a : v) sum += a * a;
  return std::sqrt(sum / static_cast<double>(v.size()));
}

std::span<const double> window_span(std::span<const double> s, const telemetry::Window& w) {
  if (w.start + telemetry::Window::length > s.size()) {
    throw DataError("window at " + std::to_string(w.start) + " exceeds signal length");
  }
  return s.subspan(w.start, telemetry::Window::length);
}

}  // namespace

std::array<double, 2> default_corners(FilterKind kind) {
  switch (kind) {
    case FilterKind::MotionSickness: return {0.02, 0.3};
    case FilterKind::Horizontal: return {0.4, 2.0};
    case FilterKind::Vertical: return {0.4, 12.5};
  }
  return {0.02, 0.3};
}

WeightingFilter design_filter(FilterKind kind, double low_corner, double high_corner,
                              double sample_rate) {
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (!(low_corner > 0.0 && low_corner < high_corner && high_corner < nyquist)) {
    throw ConfigError("filter corners must satisfy 0 < low < high < " + std::to_string(nyquist) +
                      " Hz");
  }
  WeightingFilter f;
  f.kind = kind;
  f.low_corner = low_corner;
  f.high_corner = high_corner;
  f.sample_rate = sample_rate;
  f.sections = {butterworth_highpass(low_corner, sample_rate),
                butterworth_lowpass(high_corner, sample_rate)};
  return f;
}

WeightingFilter design_filter(FilterKind kind) {
  const auto [lo, hi] = default_corners(kind);
  return design_filter(kind, lo, hi);
}

std::vector<double> apply_filter(const WeightingFilter& filter, std::span<const double> signal) {
  std::vector<double> out(signal.begin(), signal.end());
  for (const Biquad& s : filter.sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& x : out) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return out;
}

double magnitude_response(const WeightingFilter& filter, double frequency) {
  const double w = 2.0 * std::numbers::pi * frequency / filter.sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& s : filter.sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

double weighted_rms(std::span<const double> filtered) { return rms(filtered); }

std::vector<double> msdv(std::span<const double> filtered_axis,
                         const std::vector<telemetry::Window>& windows) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(rms(window_span(filtered_axis, w)));
  return out;
}

double vomit_rate(double msdv_x, double msdv_y) {
  const double cx = 1.0 / 3.0;
  const double cy = std::numbers::sqrt2 / 3.0;
  return std::sqrt(cx * cx * msdv_x * msdv_x + cy * cy * msdv_y * msdv_y);
}

std::size_t count_peaks(std::span<const double> signal, double threshold) {
  std::size_t events = 0;
  bool above = false;
  for (double a : signal) {
    const bool now = a > threshold;
    if (now && !above) ++events;
    above = now;
  }
  return events;
}

std::vector<WindowMetrics> window_metrics(const telemetry::DriveRecord& record,
                                          const std::vector<telemetry::Window>& windows,
                                          const MetricsOptions& options) {
  const auto xacc = record.channel(Channel::XACC);
  const auto yacc = record.channel(Channel::YACC);
  const auto fuel = record.channel(Channel::FUEL);

  const auto wf = design_filter(FilterKind::MotionSickness, options.motion_corners[0],
                                options.motion_corners[1]);
  const auto x_wf = apply_filter(wf, xacc);
  const auto y_wf = apply_filter(wf, yacc);

  std::vector<double> x_pos(xacc.size());
  std::vector<double> x_neg(xacc.size());
  std::vector<double> y_abs(yacc.size());
  for (std::size_t i = 0; i < xacc.size(); ++i) {
    x_pos[i] = std::max(xacc[i], 0.0);
    x_neg[i] = std::max(-xacc[i], 0.0);
    y_abs[i] = std::abs(yacc[i]);
  }

  std::vector<double> x_wd;
  std::vector<double> y_wd;
  std::vector<double> z_wk;
  if (options.include_weighted_rms) {
    const auto wd = design_filter(FilterKind::Horizontal);
    x_wd = apply_filter(wd, xacc);
    y_wd = apply_filter(wd, yacc);
    if (record.has(Channel::ZACC)) {
      z_wk = apply_filter(design_filter(FilterKind::Vertical), record.channel(Channel::ZACC));
    }
  }

  std::vector<WindowMetrics> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    WindowMetrics m;
    m.window_start = w.start;
    m.msdv_x = rms(window_span(x_wf, w));
    m.msdv_y = rms(window_span(y_wf, w));
    m.vr = vomit_rate(m.msdv_x, m.msdv_y);
    m.n_x_pos = count_peaks(window_span(x_pos, w), options.peak_threshold);
    m.n_x_neg = count_peaks(window_span(x_neg, w), options.peak_threshold);
    m.n_y = count_peaks(window_span(y_abs, w), options.peak_threshold);
    double sum = 0.0;
    for (double f : window_span(fuel, w)) sum += f;
    m.fuel = sum / static_cast<double>(telemetry::Window::length);
    if (options.include_weighted_rms) {
      WeightedAccel a;
      a.x_wd = rms(window_span(x_wd, w));
      a.y_wd = rms(window_span(y_wd, w));
      if (!z_wk.empty()) a.z_wk = rms(window_span(z_wk, w));
      m.weighted = a;
    }
    out.push_back(m);
  }
  return out;
}

void write_metrics_csv_header(std::ostream& out) {
  out << "driver_id,window_start,msdv_x,msdv_y,vr,n_x_pos,n_x_neg,n_y,fuel\n";
}

void write_metrics_csv_rows(std::ostream& out, const std::string& driver_id,
                            const std::vector<WindowMetrics>& metrics) {
  const auto precision = out.precision(10);
  for (const auto& m : metrics) {
    out << driver_id << ',' << m.window_start << ',' << m.msdv_x << ',' << m.msdv_y << ','
        << m.vr << ',' << m.n_x_pos << ',' << m.n_x_neg << ',' << m.n_y << ',' << m.fuel << '\n';
  }
  out.precision(precision);
}

}  // namespace ecodrive::comfort
