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
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ecodrive/advisor.hpp"
#include "ecodrive/comfort.hpp"
#include "ecodrive/features.hpp"
#include "ecodrive/model.hpp"
#include "ecodrive/telemetry.hpp"

namespace ecodrive::pipeline {

namespace fs = std::filesystem;

/// Settings shared by every command. Loaded from a JSON document whose keys
/// match the field names; command-line flags override file values.
struct RunConfig {
  fs::path input;   // telemetry CSV file or directory of CSV files
  fs::path out = ".";
  fs::path models;  // directory holding main_som.json and aux_som.json
  std::size_t main_rows = 15, main_cols = 15;
  std::size_t aux_rows = 15, aux_cols = 15;
  std::size_t clusters = 3;
  std::size_t cluster_restarts = 32;
  std::uint64_t seed = 42;
  std::size_t k_stable = 3;
  double peak_threshold = comfort::kPeakThreshold;
  double speed_threshold = 60.0;  // km/h
  double split = 0.75;            // chronological training fraction per driver
  std::size_t drivers = 9;        // synth only
  double duration = 900.0;        // synth only, seconds per driver
  double pcc_threshold = 0.5;     // correlate only

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Throws ConfigError on unreadable files, malformed JSON or unknown keys.
RunConfig load_config(const fs::path& path);

inline constexpr const char* kMainModelFile = "main_som.json";
inline constexpr const char* kAuxModelFile = "aux_som.json";

/// One drive after ingest, speed filtering, metrics and feature extraction.
struct DriveData {
  std::string driver_id;
  telemetry::DriveRecord record;
  std::vector<telemetry::Window> windows;  // kept after the speed filter
  std::vector<comfort::WindowMetrics> metrics;
  std::vector<features::WindowFeatures> features;
};

/// CSV files in name order when `input` is a directory; the driver id is
/// the file stem.
std::vector<fs::path> telemetry_files(const fs::path& input);
DriveData prepare(telemetry::DriveRecord record, const RunConfig& config);
std::vector<DriveData> load_drives(const RunConfig& config);

struct TrainedModels {
  model::SomModel main;
  model::SomModel aux;
  std::vector<advisor::ClusterProfile> main_profiles;
  std::vector<advisor::ClusterProfile> aux_profiles;
  double main_initial_qe = 0.0, main_final_qe = 0.0;
  double aux_initial_qe = 0.0, aux_final_qe = 0.0;
  std::size_t training_windows = 0;
  std::size_t total_windows = 0;
};

/// Fits normalizers and maps on the first `split` of each drive's windows,
/// clusters the prototypes, and labels clusters from profiles over all
/// windows: comfort by ascending VR, fuel by ascending fuel.
TrainedModels train_models(const std::vector<DriveData>& drives, const RunConfig& config);

struct WindowResult {
  std::size_t window_start = 0;
  std::size_t main_cluster = 0;
  std::size_t aux_cluster = 0;
  advisor::Classification classification;
};

std::vector<WindowResult> classify_drive(const DriveData& drive, const model::SomModel& main,
                                         const model::SomModel& aux);

/// Subcommands. Each returns the process exit code (0 success); ConfigError
/// and DataError propagate to the caller.
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_classify(const RunConfig& config, std::ostream& log);
int cmd_advise(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);
int cmd_correlate(const RunConfig& config, std::ostream& log);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

}  // namespace ecodrive::pipeline
