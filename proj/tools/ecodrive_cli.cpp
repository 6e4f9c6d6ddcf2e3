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

// Command-line front end: synth, train, classify, advise, report, correlate.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "ecodrive/errors.hpp"
#include "ecodrive/pipeline.hpp"

namespace {

using ecodrive::pipeline::RunConfig;

// Flag values are kept apart from the config so that only flags the user
// actually passed override the file.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> input, out, models;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> main_rows, main_cols, aux_rows, aux_cols;
  std::optional<std::size_t> clusters, restarts, k_stable, drivers;
  std::optional<double> peak_threshold, speed_threshold, split, duration, pcc_threshold;
};

template <typename T>
void apply(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config ? ecodrive::pipeline::load_config(*o.config) : RunConfig{};
  if (o.input) c.input = *o.input;
  if (o.out) c.out = *o.out;
  if (o.models) c.models = *o.models;
  apply(o.seed, c.seed);
  apply(o.main_rows, c.main_rows);
  apply(o.main_cols, c.main_cols);
  apply(o.aux_rows, c.aux_rows);
  apply(o.aux_cols, c.aux_cols);
  apply(o.clusters, c.clusters);
  apply(o.restarts, c.cluster_restarts);
  apply(o.k_stable, c.k_stable);
  apply(o.drivers, c.drivers);
  apply(o.peak_threshold, c.peak_threshold);
  apply(o.speed_threshold, c.speed_threshold);
  apply(o.split, c.split);
  apply(o.duration, c.duration);
  apply(o.pcc_threshold, c.pcc_threshold);
  return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "Master random seed");
  cmd->add_option("--out", o.out, "Existing output directory");
}

void add_input(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--input", o.input, "Telemetry CSV file or directory");
  cmd->add_option("--speed-threshold", o.speed_threshold, "Minimum mean window speed [km/h]");
  cmd->add_option("--peak-threshold", o.peak_threshold, "Acceleration peak threshold [m/s^2]");
}

void add_models(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--models", o.models, "Directory with trained model files (default: --out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driving style classification and eco-driving advice"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "Write synthetic labelled telemetry CSVs");
  add_common(synth, o);
  synth->add_option("--drivers", o.drivers, "Number of drives to generate");
  synth->add_option("--duration", o.duration, "Seconds per drive");

  auto* train = app.add_subcommand("train", "Train, cluster and label both maps");
  add_common(train, o);
  add_input(train, o);
  train->add_option("--main-rows", o.main_rows);
  train->add_option("--main-cols", o.main_cols);
  train->add_option("--aux-rows", o.aux_rows);
  train->add_option("--aux-cols", o.aux_cols);
  train->add_option("--clusters", o.clusters, "Clusters per map");
  train->add_option("--restarts", o.restarts, "k-means restarts");
  train->add_option("--split", o.split, "Chronological training fraction per drive");

  auto* classify = app.add_subcommand("classify", "Label every window of the input");
  add_common(classify, o);
  add_input(classify, o);
  add_models(classify, o);

  auto* advise = app.add_subcommand("advise", "Emit the advice event stream and reports");
  add_common(advise, o);
  add_input(advise, o);
  add_models(advise, o);
  advise->add_option("--k-stable", o.k_stable, "Consecutive windows before advice changes");

  auto* report = app.add_subcommand("report", "Driver summaries, KDE surfaces and heatmaps");
  add_common(report, o);
  add_input(report, o);
  add_models(report, o);

  auto* correlate = app.add_subcommand("correlate", "Feature/target correlation table");
  add_common(correlate, o);
  add_input(correlate, o);
  correlate->add_option("--pcc-threshold", o.pcc_threshold, "Selection threshold on |PCC|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ecodrive::pipeline::kExitUsage;
  }

  namespace p = ecodrive::pipeline;
  try {
    const RunConfig config = resolve(o);
    if (*synth) return p::cmd_synth(config, std::cout);
    if (*train) return p::cmd_train(config, std::cout);
    if (*classify) return p::cmd_classify(config, std::cout);
    if (*advise) return p::cmd_advise(config, std::cout);
    if (*report) return p::cmd_report(config, std::cout);
    if (*correlate) return p::cmd_correlate(config, std::cout);
  } catch (const ecodrive::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return p::kExitUsage;
  } catch (const ecodrive::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return p::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return p::kExitData;
  }
  return p::kExitUsage;
}
