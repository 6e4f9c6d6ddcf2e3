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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecodrive::telemetry {

/// Telemetry channels carried through the pipeline. Units:
/// SWA [deg], VS [km/h], ERPM [rev/min], PGP [%], GP, BP (sensor units),
/// XACC/YACC/ZACC [m/s^2], FUEL [l/100km].
enum class Channel : std::size_t { SWA, VS, ERPM, PGP, GP, BP, XACC, YACC, ZACC, FUEL };

inline constexpr std::size_t kChannelCount = 10;
inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::SWA,  Channel::VS,   Channel::ERPM, Channel::PGP,  Channel::GP,
    Channel::BP,   Channel::XACC, Channel::YACC, Channel::ZACC, Channel::FUEL};

/// Channels the comfort/feature pipeline cannot run without.
inline constexpr std::array<Channel, 6> kRequiredChannels = {
    Channel::SWA, Channel::VS, Channel::ERPM, Channel::XACC, Channel::YACC, Channel::FUEL};

inline constexpr double kSampleRate = 32.0;
inline constexpr std::size_t kWindowLength = 256;
inline constexpr std::size_t kWindowHop = 128;

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);
bool is_required(Channel c);

struct Sample {
  double t;
  double value;
};

struct RawChannel {
  Channel channel;
  double rate;  // samples/second, from the median timestamp spacing
  std::vector<Sample> samples;
};

/// Uniform 32 Hz multi-channel record for one driver/trip. Absent channels
/// are empty; every present channel holds exactly `length()` samples.
class DriveRecord {
public:
  DriveRecord() = default;
  explicit DriveRecord(std::string driver_id, double start_time = 0.0);

  const std::string& driver_id() const { return driver_id_; }
  void set_driver_id(std::string id) { driver_id_ = std::move(id); }
  double start_time() const { return start_time_; }
  std::size_t length() const { return length_; }

  bool has(Channel c) const { return !channels_[index(c)].empty(); }
  /// Throws DataError when the channel is absent.
  std::span<const double> channel(Channel c) const;

  /// Installs a channel; the first channel fixes the record length, and VS,
  /// ERPM must be nonnegative.
  void set_channel(Channel c, std::vector<double> values);

private:
  static std::size_t index(Channel c) { return static_cast<std::size_t>(c); }

  std::string driver_id_;
  double start_time_ = 0.0;
  std::size_t length_ = 0;
  std::array<std::vector<double>, kChannelCount> channels_;
};

/// A 256-sample analysis window of a record, identified by its start index.
struct Window {
  std::size_t start = 0;
  static constexpr std::size_t length = kWindowLength;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Maps channels to CSV header names. The time column is always "t".
struct CsvSchema {
  std::map<Channel, std::string> columns;

  /// Every channel mapped to its own name ("SWA", "VS", ...).
  static CsvSchema standard();
};

/// Parses a telemetry CSV. Empty cells mean "no sample at this timestamp"
/// for that channel, so channels logged at different rates can share a file.
std::vector<RawChannel> load_csv(const std::filesystem::path& path,
                                 const CsvSchema& schema = CsvSchema::standard());

/// Writes a record in the layout load_csv reads, one row per sample.
void write_csv(const std::filesystem::path& path, const DriveRecord& record,
               const CsvSchema& schema = CsvSchema::standard());

/// Linear interpolation of every channel onto the 32 Hz grid spanning the
/// intersection of the channels' time ranges. Channels logged faster than
/// 32 Hz are first averaged over one output period.
DriveRecord resample(const std::vector<RawChannel>& channels, std::string driver_id = {});

std::vector<Window> split_windows(std::size_t total_samples);
std::vector<Window> split_windows(const DriveRecord& record);

double mean_speed(const DriveRecord& record, const Window& window);

/// Keeps windows whose mean VS is at least `threshold` km/h.
std::vector<Window> filter_by_mean_speed(const DriveRecord& record,
                                         const std::vector<Window>& windows,
                                         double threshold = 60.0);

}  // namespace ecodrive::telemetry
