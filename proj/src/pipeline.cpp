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

#include "ecodrive/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ecodrive/analytics.hpp"
#include "ecodrive/errors.hpp"
#include "ecodrive/random.hpp"
#include "ecodrive/som.hpp"
#include "ecodrive/synthgen.hpp"

namespace ecodrive::pipeline {
namespace {

using nlohmann::json;

void require_output_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("output directory does not exist: " + dir.string());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

template <typename T>
void read_key(const json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

model::Seeds draw_seeds(Rng& rng) {
  model::Seeds s;
  s.init = rng();
  s.train = rng();
  s.cluster = rng();
  return s;
}

struct TrainedMap {
  model::SomModel model;
  double initial_qe = 0.0;
  double final_qe = 0.0;
};

TrainedMap fit_map(std::string role, features::FeatureSet set, std::size_t rows, std::size_t cols,
                   const std::vector<features::WindowFeatures>& training, const RunConfig& config,
                   const model::Seeds& seeds) {
  TrainedMap out;
  auto& m = out.model;
  m.role = std::move(role);
  m.feature_set = std::move(set);
  const auto raw = features::extract(training, m.feature_set);
  m.normalizer = features::fit_normalizer(raw, features::feature_names(m.feature_set));
  const auto z = m.normalizer.apply(raw);
  m.schedule = som::TrainingSchedule::defaults(rows, cols, z.size());
  m.seeds = seeds;
  m.cluster_restarts = config.cluster_restarts;
  auto result = som::train(som::init_random(rows, cols, z, seeds.init), z, m.schedule, seeds.train);
  m.grid = std::move(result.grid);
  out.initial_qe = result.initial_qe;
  out.final_qe = result.epoch_qe.empty() ? result.initial_qe : result.epoch_qe.back();
  m.partition = som::cluster_prototypes(m.grid, config.clusters, m.cluster_restarts, seeds.cluster);
  return out;
}

// Profiles every window by the cluster of its BMU and, for three clusters,
// attaches labels ordered by `metric`.
std::vector<advisor::ClusterProfile> profile_and_label(model::SomModel& m,
                                                       const std::vector<DriveData>& drives,
                                                       advisor::Metric metric) {
  std::vector<std::size_t> bmus;
  std::vector<comfort::WindowMetrics> metrics;
  for (const auto& d : drives) {
    const auto z = m.normalizer.apply(features::extract(d.features, m.feature_set));
    for (std::size_t k = 0; k < z.size(); ++k) {
      bmus.push_back(som::bmu(m.grid, z[k]).index);
      metrics.push_back(d.metrics[k]);
    }
  }
  auto profiles = advisor::profile_clusters(m.partition, bmus, metrics);
  m.ordering_metric = std::string(advisor::metric_name(metric));
  m.cluster_labels.clear();
  if (profiles.size() == 3) {
    profiles = advisor::label_clusters(std::move(profiles), metric);
    m.cluster_labels.resize(3);
    for (const auto& p : profiles) m.cluster_labels[p.cluster] = *p.label;
  }
  return profiles;
}

std::pair<model::SomModel, model::SomModel> load_models(const RunConfig& config) {
  const fs::path dir = config.models.empty() ? config.out : config.models;
  auto main = model::load(dir / kMainModelFile);
  auto aux = model::load(dir / kAuxModelFile);
  if (main.cluster_labels.empty() || aux.cluster_labels.empty())
    throw DataError("models must be labelled with three clusters");
  return {std::move(main), std::move(aux)};
}

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

void write_improvements(const fs::path& dir, const std::vector<advisor::ClusterProfile>& main,
                        const std::vector<advisor::ClusterProfile>& aux) {
  const std::pair<const std::vector<advisor::ClusterProfile>*, advisor::Metric> reports[] = {
      {&main, advisor::Metric::Vr}, {&main, advisor::Metric::MsdvY}, {&aux, advisor::Metric::Fuel}};
  for (const auto& [profiles, metric] : reports) {
    const std::string name(advisor::metric_name(metric));
    auto out = open_output(dir / ("improvement_" + name + ".csv"));
    advisor::write_improvement_csv(out, advisor::improvement_report(*profiles, metric), name);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (main_rows == 0 || main_cols == 0 || aux_rows == 0 || aux_cols == 0)
    throw ConfigError("grid dimensions must be positive");
  if (clusters == 0) throw ConfigError("clusters must be positive");
  if (cluster_restarts == 0) throw ConfigError("cluster_restarts must be positive");
  if (k_stable == 0) throw ConfigError("k_stable must be positive");
  if (!(peak_threshold > 0.0)) throw ConfigError("peak_threshold must be positive");
  if (!(speed_threshold > 0.0)) throw ConfigError("speed_threshold must be positive");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (drivers == 0) throw ConfigError("drivers must be positive");
  if (!(duration >= 16.0)) throw ConfigError("duration must be at least 16 s");
  if (!(pcc_threshold > 0.0 && pcc_threshold <= 1.0)) throw ConfigError("pcc_threshold must lie in (0, 1]");
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "input", "out", "models", "main_rows", "main_cols", "aux_rows", "aux_cols", "clusters",
      "cluster_restarts", "seed", "k_stable", "peak_threshold", "speed_threshold", "split",
      "drivers", "duration", "pcc_threshold"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
  RunConfig c;
  try {
    if (doc.contains("input")) c.input = doc.at("input").get<std::string>();
    if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
    if (doc.contains("models")) c.models = doc.at("models").get<std::string>();
    read_key(doc, "main_rows", c.main_rows);
    read_key(doc, "main_cols", c.main_cols);
    read_key(doc, "aux_rows", c.aux_rows);
    read_key(doc, "aux_cols", c.aux_cols);
    read_key(doc, "clusters", c.clusters);
    read_key(doc, "cluster_restarts", c.cluster_restarts);
    read_key(doc, "seed", c.seed);
    read_key(doc, "k_stable", c.k_stable);
    read_key(doc, "peak_threshold", c.peak_threshold);
    read_key(doc, "speed_threshold", c.speed_threshold);
    read_key(doc, "split", c.split);
    read_key(doc, "drivers", c.drivers);
    read_key(doc, "duration", c.duration);
    read_key(doc, "pcc_threshold", c.pcc_threshold);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::vector<fs::path> telemetry_files(const fs::path& input) {
  if (input.empty()) throw ConfigError("no telemetry input given");
  if (fs::is_regular_file(input)) return {input};
  if (!fs::is_directory(input)) throw DataError("telemetry input not found: " + input.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .csv files in " + input.string());
  return files;
}

DriveData prepare(telemetry::DriveRecord record, const RunConfig& config) {
  DriveData d;
  d.driver_id = record.driver_id();
  d.windows = telemetry::filter_by_mean_speed(record, telemetry::split_windows(record),
                                              config.speed_threshold);
  comfort::MetricsOptions options;
  options.peak_threshold = config.peak_threshold;
  d.metrics = comfort::window_metrics(record, d.windows, options);
  d.features = features::compute_features(record, d.windows);
  d.record = std::move(record);
  return d;
}

std::vector<DriveData> load_drives(const RunConfig& config) {
  std::vector<DriveData> drives;
  for (const auto& file : telemetry_files(config.input)) {
    auto channels = telemetry::load_csv(file, telemetry::CsvSchema::standard());
    drives.push_back(prepare(telemetry::resample(channels, file.stem().string()), config));
  }
  return drives;
}

TrainedModels train_models(const std::vector<DriveData>& drives, const RunConfig& config) {
  config.validate();
  TrainedModels out;
  std::vector<features::WindowFeatures> training;
  for (const auto& d : drives) {
    out.total_windows += d.features.size();
    const auto n = static_cast<std::size_t>(config.split * static_cast<double>(d.features.size()));
    training.insert(training.end(), d.features.begin(),
                    d.features.begin() + static_cast<std::ptrdiff_t>(n));
  }
  if (out.total_windows < 10)
    throw DataError("only " + std::to_string(out.total_windows) +
                    " windows remain after the speed filter; at least 10 are needed");
  out.training_windows = training.size();

  Rng seeder(config.seed);
  const auto main_seeds = draw_seeds(seeder);
  const auto aux_seeds = draw_seeds(seeder);
  auto main = fit_map("main", features::main_feature_set(), config.main_rows, config.main_cols,
                      training, config, main_seeds);
  auto aux = fit_map("auxiliary", features::auxiliary_feature_set(), config.aux_rows,
                     config.aux_cols, training, config, aux_seeds);
  out.main_profiles = profile_and_label(main.model, drives, advisor::Metric::Vr);
  out.aux_profiles = profile_and_label(aux.model, drives, advisor::Metric::Fuel);
  out.main = std::move(main.model);
  out.aux = std::move(aux.model);
  out.main_initial_qe = main.initial_qe;
  out.main_final_qe = main.final_qe;
  out.aux_initial_qe = aux.initial_qe;
  out.aux_final_qe = aux.final_qe;
  return out;
}

std::vector<WindowResult> classify_drive(const DriveData& drive, const model::SomModel& main,
                                         const model::SomModel& aux) {
  std::vector<WindowResult> out;
  out.reserve(drive.features.size());
  for (const auto& w : drive.features) {
    WindowResult r;
    r.window_start = w.window_start;
    r.main_cluster = main.cluster_of(features::extract(w, main.feature_set));
    r.aux_cluster = aux.cluster_of(features::extract(w, aux.feature_set));
    r.classification = {main.cluster_labels.at(r.main_cluster), aux.cluster_labels.at(r.aux_cluster)};
    out.push_back(r);
  }
  return out;
}

int cmd_synth(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto grid = synthgen::style_grid(config.seed, config.duration);
  Rng extra(config.seed ^ 0x9e3779b97f4a7c15ULL);
  json styles = json::array();
  for (std::size_t i = 0; i < config.drivers; ++i) {
    auto spec = grid[i % grid.size()];
    if (i >= grid.size()) {
      spec.spec.seed = extra();
      spec.label.name += "_" + std::to_string(i / grid.size());
    }
    const auto record = synthgen::generate(spec.spec, spec.label.name);
    const auto path = config.out / (spec.label.name + ".csv");
    telemetry::write_csv(path, record, telemetry::CsvSchema::standard());
    json entry = json::object();
    entry["driver_id"] = spec.label.name;
    entry["comfort"] = std::string(level_name(spec.label.comfort));
    entry["fuel"] = std::string(level_name(spec.label.fuel));
    entry["steering_aggressiveness"] = spec.spec.steering_aggressiveness;
    entry["gas_aggressiveness"] = spec.spec.gas_aggressiveness;
    entry["braking_spikiness"] = spec.spec.braking_spikiness;
    entry["erpm_bias"] = spec.spec.erpm_bias;
    entry["base_speed"] = spec.spec.base_speed;
    entry["duration"] = spec.spec.duration;
    entry["seed"] = spec.spec.seed;
    styles.push_back(std::move(entry));
    log << "wrote " << path.string() << '\n';
  }
  auto labels = open_output(config.out / "styles.json");
  labels << styles.dump(2) << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto drives = load_drives(config);
  const auto trained = train_models(drives, config);
  model::save(trained.main, config.out / kMainModelFile);
  model::save(trained.aux, config.out / kAuxModelFile);

  auto metrics = open_output(config.out / "metrics.csv");
  comfort::write_metrics_csv_header(metrics);
  for (const auto& d : drives) comfort::write_metrics_csv_rows(metrics, d.driver_id, d.metrics);
  {
    auto out = open_output(config.out / "main_profiles.csv");
    advisor::write_profiles_csv(out, trained.main_profiles);
  }
  {
    auto out = open_output(config.out / "aux_profiles.csv");
    advisor::write_profiles_csv(out, trained.aux_profiles);
  }
  if (trained.main_profiles.size() == 3 && trained.aux_profiles.size() == 3)
    write_improvements(config.out, trained.main_profiles, trained.aux_profiles);

  log << std::setprecision(6);
  log << "windows: " << trained.total_windows << " (training " << trained.training_windows << ")\n";
  log << "main SOM quantization error: " << trained.main_initial_qe << " -> "
      << trained.main_final_qe << '\n';
  log << "auxiliary SOM quantization error: " << trained.aux_initial_qe << " -> "
      << trained.aux_final_qe << '\n';
  log << "main cluster profiles\n";
  advisor::write_profiles_csv(log, trained.main_profiles);
  log << "auxiliary cluster profiles\n";
  advisor::write_profiles_csv(log, trained.aux_profiles);
  return kExitOk;
}

int cmd_classify(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto [main, aux] = load_models(config);
  const auto drives = load_drives(config);
  auto out = open_output(config.out / "classifications.csv");
  out << "driver_id,window_start,main_cluster,comfort,aux_cluster,fuel\n";
  std::size_t total = 0;
  for (const auto& d : drives) {
    for (const auto& r : classify_drive(d, main, aux)) {
      out << d.driver_id << ',' << r.window_start << ',' << r.main_cluster << ','
          << level_name(r.classification.comfort) << ',' << r.aux_cluster << ','
          << level_name(r.classification.fuel) << '\n';
      ++total;
    }
  }
  log << "classified " << total << " windows from " << drives.size() << " drive(s)\n";
  return kExitOk;
}

int cmd_advise(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto [main, aux] = load_models(config);
  const auto drives = load_drives(config);
  const auto matrix = advisor::build_advice_matrix();
  auto events = open_output(config.out / "advice_events.txt");
  std::vector<advisor::Classification> all;
  std::vector<std::size_t> main_bmus, aux_bmus;
  std::vector<comfort::WindowMetrics> all_metrics;
  for (const auto& d : drives) {
    advisor::AdviceState state;
    state.k_stable = config.k_stable;
    const auto results = classify_drive(d, main, aux);
    for (std::size_t k = 0; k < results.size(); ++k) {
      all.push_back(results[k].classification);
      if (auto ev = advisor::stream_advise(state, results[k].classification, d.metrics[k], matrix)) {
        const std::string line = "driver=" + d.driver_id + " " + advisor::format_event(*ev);
        events << line << '\n';
        log << line << '\n';
      }
    }
    const auto zm = main.normalizer.apply(features::extract(d.features, main.feature_set));
    const auto za = aux.normalizer.apply(features::extract(d.features, aux.feature_set));
    for (std::size_t k = 0; k < zm.size(); ++k) {
      main_bmus.push_back(som::bmu(main.grid, zm[k]).index);
      aux_bmus.push_back(som::bmu(aux.grid, za[k]).index);
    }
    all_metrics.insert(all_metrics.end(), d.metrics.begin(), d.metrics.end());
  }
  if (all.empty()) throw DataError("no windows remain after the speed filter");
  {
    auto out = open_output(config.out / "intersection.csv");
    advisor::write_intersection_csv(out, advisor::intersect(all));
  }
  // Reductions need every cluster populated; a short drive may not visit
  // all of them, in which case only the intersection table is written.
  try {
    auto mp = advisor::profile_clusters(main.partition, main_bmus, all_metrics);
    auto ap = advisor::profile_clusters(aux.partition, aux_bmus, all_metrics);
    // Labels come from the model, not from this input.
    for (auto& p : mp) p.label = main.cluster_labels.at(p.cluster);
    for (auto& p : ap) p.label = aux.cluster_labels.at(p.cluster);
    write_improvements(config.out, mp, ap);
  } catch (const DataError& e) {
    log << "improvement report skipped: " << e.what() << '\n';
  }
  log << "advised " << all.size() << " windows from " << drives.size() << " drive(s)\n";
  return kExitOk;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto [main, aux] = load_models(config);
  const auto drives = load_drives(config);
  std::map<std::string, std::vector<comfort::WindowMetrics>> metrics_by_driver;
  std::map<std::string, std::vector<advisor::Classification>> classes_by_driver;
  log << std::setprecision(6);
  for (const auto& d : drives) {
    metrics_by_driver[d.driver_id] = d.metrics;
    auto& classes = classes_by_driver[d.driver_id];
    for (const auto& r : classify_drive(d, main, aux)) classes.push_back(r.classification);

    std::vector<analytics::Point2> points;
    for (const auto& m : d.metrics) points.push_back({m.fuel, m.vr});
    const std::string stem = safe_name(d.driver_id);
    try {
      const auto surface = analytics::kde2d(points);
      auto csv = open_output(config.out / ("kde_" + stem + ".csv"));
      analytics::write_kde_csv(csv, surface);
      auto side = open_output(config.out / ("kde_" + stem + ".json"));
      side << analytics::kde_sidecar_json(surface);
      log << "driver " << d.driver_id << " kde_integral=" << surface.integral() << '\n';
    } catch (const DataError& e) {
      log << "driver " << d.driver_id << " kde skipped: " << e.what() << '\n';
    }
  }
  for (const auto& [id, table] : analytics::driver_heatmap(classes_by_driver)) {
    auto out = open_output(config.out / ("heatmap_" + safe_name(id) + ".csv"));
    advisor::write_intersection_csv(out, table);
  }
  auto summary = open_output(config.out / "summary.csv");
  analytics::write_summary_csv(summary, analytics::driver_summary(metrics_by_driver));
  return kExitOk;
}

int cmd_correlate(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_output_dir(config.out);
  const auto drives = load_drives(config);
  std::vector<features::WindowFeatures> feats;
  std::vector<comfort::WindowMetrics> metrics;
  for (const auto& d : drives) {
    feats.insert(feats.end(), d.features.begin(), d.features.end());
    metrics.insert(metrics.end(), d.metrics.begin(), d.metrics.end());
  }
  const auto table = features::correlation_table(feats, metrics);
  {
    auto out = open_output(config.out / "correlation.csv");
    features::write_correlation_csv(out, table);
  }
  log << std::setprecision(3);
  features::write_correlation_csv(log, table);
  log << "features with |PCC| >= " << config.pcc_threshold << ":";
  for (const auto& name : features::feature_names(features::select_by_threshold(table, config.pcc_threshold)))
    log << ' ' << name;
  log << '\n';
  return kExitOk;
}

}  // namespace ecodrive::pipeline
