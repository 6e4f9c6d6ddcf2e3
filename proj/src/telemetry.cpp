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

#include "ecodrive/telemetry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ecodrive/errors.hpp"

namespace ecodrive::telemetry {

namespace {

constexpr std::array<std::string_view, kChannelCount> kNames = {
    "SWA", "VS", "ERPM", "PGP", "GP", "BP", "XACC", "YACC", "ZACC", "FUEL"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      return out;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

double median_spacing(const std::vector<Sample>& samples) {
  std::vector<double> dt;
  dt.reserve(samples.size());
  for (std::size_t i = 1; i < samples.size(); ++i) dt.push_back(samples[i].t - samples[i - 1].t);
  if (dt.empty()) return 0.0;
  const auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  if (dt.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(dt.begin(), mid);
  return 0.5 * (lower + upper);
}

// Linear interpolation with a forward-moving cursor; grid times are
// nondecreasing so the whole channel is resampled in one pass.
class Interpolator {
public:
  explicit Interpolator(const std::vector<Sample>& s) : s_(s) {}

  double at(double t) {
    while (k_ + 1 < s_.size() && s_[k_ + 1].t <= t) ++k_;
    const Sample& a = s_[k_];
    if (t == a.t || k_ + 1 == s_.size()) return a.value;
    const Sample& b = s_[k_ + 1];
    const double w = (t - a.t) / (b.t - a.t);
    return a.value + w * (b.value - a.value);
  }

private:
  const std::vector<Sample>& s_;
  std::size_t k_ = 0;
};

}  // namespace

std::string_view channel_name(Channel c) { return kNames[static_cast<std::size_t>(c)]; }

std::optional<Channel> channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kNames[i] == name) return kAllChannels[i];
  }
  return std::nullopt;
}

bool is_required(Channel c) {
  return std::find(kRequiredChannels.begin(), kRequiredChannels.end(), c) !=
         kRequiredChannels.end();
}

DriveRecord::DriveRecord(std::string driver_id, double start_time)
    : driver_id_(std::move(driver_id)), start_time_(start_time) {}

std::span<const double> DriveRecord::channel(Channel c) const {
  const auto& v = channels_[index(c)];
  if (v.empty()) {
    throw DataError("record '" + driver_id_ + "' has no " + std::string(channel_name(c)) +
                    " channel");
  }
  return v;
}

void DriveRecord::set_channel(Channel c, std::vector<double> values) {
  if (values.empty()) throw DataError("channel " + std::string(channel_name(c)) + " is empty");
  bool others = false;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (i != index(c) && !channels_[i].empty()) others = true;
  }
  if (others && values.size() != length_) {
    throw DataError("channel " + std::string(channel_name(c)) + " has " +
                    std::to_string(values.size()) + " samples, record has " +
                    std::to_string(length_));
  }
  if (c == Channel::VS || c == Channel::ERPM) {
    for (double v : values) {
      if (v < 0.0) throw DataError(std::string(channel_name(c)) + " must be nonnegative");
    }
  }
  length_ = values.size();
  channels_[index(c)] = std::move(values);
}

CsvSchema CsvSchema::standard() {
  CsvSchema schema;
  for (Channel c : kAllChannels) schema.columns.emplace(c, std::string(channel_name(c)));
  return schema;
}

std::vector<RawChannel> load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open telemetry file " + path.string());

  for (Channel c : kRequiredChannels) {
    if (!schema.columns.contains(c)) {
      throw ConfigError("schema does not map required channel " + std::string(channel_name(c)));
    }
  }

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    header_line = line;
    header = split_commas(header_line);
    break;
  }
  if (header.empty()) throw DataError(path.string() + ": no header row");

  auto column_of = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(path.string() + ": missing required column \"" + std::string(name) + "\"");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t t_col = column_of("t");
  std::vector<std::pair<std::size_t, RawChannel>> mapped;
  for (const auto& [channel, name] : schema.columns) {
    mapped.push_back({column_of(name), RawChannel{channel, 0.0, {}}});
  }

  std::optional<double> last_t;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    const auto t = parse_double(cells[t_col]);
    if (!t) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) +
                      ": unparseable timestamp \"" + std::string(cells[t_col]) + "\"");
    }
    if (last_t && *t <= *last_t) {
      throw DataError(path.string() + ": non-monotonic timestamps at row " +
                      std::to_string(line_no));
    }
    last_t = t;
    for (auto& [col, raw] : mapped) {
      if (cells[col].empty()) continue;
      const auto v = parse_double(cells[col]);
      if (!v) {
        throw DataError(path.string() + ": row " + std::to_string(line_no) +
                        ": unparseable value for " + std::string(channel_name(raw.channel)));
      }
      raw.samples.push_back({*t, *v});
    }
  }

  std::vector<RawChannel> out;
  out.reserve(mapped.size());
  for (auto& [col, raw] : mapped) {
    const double dt = median_spacing(raw.samples);
    raw.rate = dt > 0.0 ? 1.0 / dt : 0.0;
    out.push_back(std::move(raw));
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const DriveRecord& record,
               const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write telemetry file " + path.string());

  std::vector<std::pair<std::span<const double>, const std::string*>> cols;
  for (const auto& [channel, name] : schema.columns) {
    if (record.has(channel)) cols.push_back({record.channel(channel), &name});
  }
  out << 't';
  for (const auto& [values, name] : cols) out << ',' << *name;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < record.length(); ++i) {
    out << record.start_time() + static_cast<double>(i) / kSampleRate;
    for (const auto& [values, name] : cols) out << ',' << values[i];
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

DriveRecord resample(const std::vector<RawChannel>& channels, std::string driver_id) {
  if (channels.empty()) throw DataError("no channels to resample");
  double start = -std::numeric_limits<double>::infinity();
  double end = std::numeric_limits<double>::infinity();
  for (const auto& ch : channels) {
    if (ch.samples.size() < 2) {
      throw DataError("channel " + std::string(channel_name(ch.channel)) +
                      " needs at least 2 samples");
    }
    start = std::max(start, ch.samples.front().t);
    end = std::min(end, ch.samples.back().t);
  }
  if (start > end) throw DataError("channel time ranges do not overlap");

  const auto n = static_cast<std::size_t>(std::floor((end - start) * kSampleRate + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) / kSampleRate;

  DriveRecord record(std::move(driver_id), start);
  const double half_period = 0.5 / kSampleRate;
  for (const auto& ch : channels) {
    std::vector<double> values(n);
    Interpolator interp(ch.samples);
    if (ch.rate > kSampleRate * 1.05) {
      // Box average over one output period before decimation.
      std::size_t lo = 0;
      std::size_t hi = 0;
      double sum = 0.0;
      const auto& s = ch.samples;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = grid[i] - half_period;
        const double b = grid[i] + half_period;
        while (hi < s.size() && s[hi].t < b) sum += s[hi++].value;
        while (lo < hi && s[lo].t < a) sum -= s[lo++].value;
        values[i] = hi > lo ? sum / static_cast<double>(hi - lo) : interp.at(grid[i]);
        if (hi > lo) interp.at(grid[i]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) values[i] = interp.at(grid[i]);
    }
    record.set_channel(ch.channel, std::move(values));
  }
  return record;
}

std::vector<Window> split_windows(std::size_t total_samples) {
  std::vector<Window> out;
  for (std::size_t start = 0; start + kWindowLength <= total_samples; start += kWindowHop) {
    out.push_back(Window{start});
  }
  return out;
}

std::vector<Window> split_windows(const DriveRecord& record) {
  return split_windows(record.length());
}

double mean_speed(const DriveRecord& record, const Window& window) {
  const auto vs = record.channel(Channel::VS).subspan(window.start, Window::length);
  double sum = 0.0;
  for (double v : vs) sum += v;
  return sum / static_cast<double>(vs.size());
}

std::vector<Window> filter_by_mean_speed(const DriveRecord& record,
                                         const std::vector<Window>& windows, double threshold) {
  std::vector<Window> out;
  for (const auto& w : windows) {
    if (w.start + Window::length > record.length()) {
      throw DataError("window at " + std::to_string(w.start) + " exceeds record length");
    }
    if (mean_speed(record, w) >= threshold) out.push_back(w);
  }
  return out;
}

}  // namespace ecodrive::telemetry
