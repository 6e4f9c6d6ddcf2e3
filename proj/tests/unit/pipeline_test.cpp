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


// End-to-end runs of the command-line tool in scratch directories.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "ecodrive/advisor.hpp"
#include "ecodrive/model.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using ecodrive::testing::read_text;
using ecodrive::testing::TempDir;
using ecodrive::testing::write_text;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli_output.txt";
  const std::string cmd = std::string("\"") + ECODRIVE_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_text(log);
  return r;
}

std::size_t count_with_extension(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && e.path().extension() == ext) ++n;
  }
  return n;
}

// One synthetic corpus and one trained model pair shared by the suite.
class Pipeline : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    root_ = new TempDir();
    fs::create_directories(data());
    fs::create_directories(models());
    ASSERT_EQ(run_cli("synth --out " + data().string() + " --duration 300 --seed 42", root_->path()).code, 0);
    const auto r = run_cli("train --input " + data().string() + " --out " + models().string(), root_->path());
    ASSERT_EQ(r.code, 0) << r.output;
  }
  static void TearDownTestSuite() {
    delete root_;
    root_ = nullptr;
  }

  static fs::path data() { return root_->path() / "data"; }
  static fs::path models() { return root_->path() / "models"; }

  TempDir scratch_;

  static TempDir* root_;
};

TempDir* Pipeline::root_ = nullptr;

TEST_F(Pipeline, SynthWritesNineDeterministicDrives) {
  EXPECT_EQ(count_with_extension(data(), "style_", ".csv"), 9u);
  const auto styles = nlohmann::json::parse(read_text(data() / "styles.json"));
  EXPECT_EQ(styles.size(), 9u);
  ASSERT_EQ(run_cli("synth --out " + scratch_.path().string() + " --duration 300 --seed 42", scratch_.path()).code, 0);
  for (const auto& e : fs::directory_iterator(data())) {
    EXPECT_EQ(read_text(e.path()), read_text(scratch_.path() / e.path().filename()))
        << e.path().filename();
  }
}

TEST_F(Pipeline, SynthDriverCountAndSeed) {
  ASSERT_EQ(run_cli("synth --out " + scratch_.path().string() + " --drivers 11 --duration 60 --seed 3",
                    scratch_.path()).code,
            0);
  EXPECT_EQ(count_with_extension(scratch_.path(), "style_", ".csv"), 11u);
  TempDir other;
  ASSERT_EQ(run_cli("synth --out " + other.path().string() + " --drivers 1 --duration 60 --seed 4", other.path()).code, 0);
  EXPECT_NE(read_text(scratch_ / "style_cL_fL.csv"), read_text(other / "style_cL_fL.csv"));
}

TEST_F(Pipeline, MissingOutputDirectoryIsADataError) {
  const auto r = run_cli("synth --out " + (scratch_.path() / "absent").string(), scratch_.path());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("does not exist"), std::string::npos);
}

TEST_F(Pipeline, TrainWritesLoadableReproducibleModels) {
  for (const char* f : {"main_som.json", "aux_som.json", "metrics.csv", "main_profiles.csv",
                        "aux_profiles.csv", "improvement_VR.csv", "improvement_MSDV_y.csv",
                        "improvement_fuel.csv"}) {
    EXPECT_TRUE(fs::exists(models() / f)) << f;
  }
  const auto main = ecodrive::model::load(models() / "main_som.json");
  const auto aux = ecodrive::model::load(models() / "aux_som.json");
  EXPECT_EQ(main.cluster_labels.size(), 3u);
  EXPECT_EQ(aux.cluster_labels.size(), 3u);
  EXPECT_EQ(main.feature_set.size(), 5u);
  EXPECT_EQ(aux.feature_set.size(), 2u);
  ASSERT_EQ(run_cli("train --input " + data().string() + " --out " + scratch_.path().string(), scratch_.path()).code, 0);
  EXPECT_EQ(read_text(models() / "main_som.json"), read_text(scratch_ / "main_som.json"));
  EXPECT_EQ(read_text(models() / "aux_som.json"), read_text(scratch_ / "aux_som.json"));
}

TEST_F(Pipeline, SeedChangesTheModel) {
  ASSERT_EQ(run_cli("train --input " + data().string() + " --out " + scratch_.path().string() + " --seed 7",
                    scratch_.path()).code,
            0);
  EXPECT_NE(read_text(models() / "main_som.json"), read_text(scratch_ / "main_som.json"));
}

struct Event {
  std::string driver;
  std::size_t window_start;
  std::string comfort, fuel, advice;
};

std::vector<Event> parse_events(const std::string& text) {
  static const std::regex re(R"(driver=(\S+) window_start=(\d+) comfort=([LMH]) fuel=([LMH]) advice=(.*))");
  std::vector<Event> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    EXPECT_TRUE(std::regex_match(line, m, re)) << line;
    if (!m.empty()) out.push_back({m[1], std::stoul(m[2]), m[3], m[4], m[5]});
  }
  return out;
}

TEST_F(Pipeline, AdviceStreamMatchesClassifications) {
  const std::string common = " --models " + models().string() + " --out " + scratch_.path().string();
  const std::string input = " --input " + (data() / "style_cH_fM.csv").string();
  ASSERT_EQ(run_cli("classify" + input + common, scratch_.path()).code, 0);
  ASSERT_EQ(run_cli("advise" + input + common, scratch_.path()).code, 0);

  // Replay the classification stream through the debouncer.
  std::istringstream csv(read_text(scratch_ / "classifications.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "driver_id,window_start,main_cluster,comfort,aux_cluster,fuel");
  ecodrive::advisor::AdviceState state;
  std::vector<std::pair<std::size_t, ecodrive::advisor::Classification>> expected;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 6u);
    const ecodrive::advisor::Classification c{*ecodrive::parse_level(f[3]), *ecodrive::parse_level(f[5])};
    ecodrive::comfort::WindowMetrics w;
    w.window_start = std::stoul(f[1]);
    if (auto e = ecodrive::advisor::stream_advise(state, c, w)) expected.emplace_back(e->window_start, c);
  }
  const auto events = parse_events(read_text(scratch_ / "advice_events.txt"));
  ASSERT_EQ(events.size(), expected.size());
  ASSERT_FALSE(events.empty());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(events[i].window_start, expected[i].first);
    EXPECT_EQ(events[i].comfort[0], ecodrive::level_letter(expected[i].second.comfort));
    EXPECT_EQ(events[i].fuel[0], ecodrive::level_letter(expected[i].second.fuel));
  }
  // A steady aggressive drive settles on its own style within k_stable windows.
  EXPECT_EQ(events[0].window_start, 2u * 128u);
  EXPECT_EQ(events[0].comfort, "H");
  EXPECT_EQ(events[0].fuel, "M");
  EXPECT_EQ(events[0].advice,
            "\"Release gas pedal / switch to a lower gear\" \"Operate steering wheel more smoothly\"");
  EXPECT_TRUE(fs::exists(scratch_ / "intersection.csv"));
}

TEST_F(Pipeline, CalmDriverIsToldToKeepDriving) {
  ASSERT_EQ(run_cli("advise --input " + (data() / "style_cL_fL.csv").string() + " --models " +
                        models().string() + " --out " + scratch_.path().string(),
                    scratch_.path()).code,
            0);
  const auto events = parse_events(read_text(scratch_ / "advice_events.txt"));
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events[0].comfort, "L");
  EXPECT_EQ(events[0].fuel, "L");
  for (const auto& e : events) {
    if (e.comfort == "L" && e.fuel == "L") {
      EXPECT_TRUE(e.advice == "\"Keep driving style\"" ||
                  e.advice == "\"Keep driving style\" \"Avoid braking peaks\"")
          << e.advice;
    }
  }
}

TEST_F(Pipeline, KStableFlagDelaysFirstAdvice) {
  ASSERT_EQ(run_cli("advise --k-stable 5 --input " + (data() / "style_cH_fM.csv").string() + " --models " +
                        models().string() + " --out " + scratch_.path().string(),
                    scratch_.path()).code,
            0);
  const auto events = parse_events(read_text(scratch_ / "advice_events.txt"));
  ASSERT_FALSE(events.empty());
  EXPECT_GE(events[0].window_start, 4u * 128u);
}

TEST_F(Pipeline, ReportCoversEveryDriver) {
  fs::create_directories(scratch_ / "in");
  for (const char* f : {"style_cL_fL.csv", "style_cM_fH.csv", "style_cH_fM.csv"}) {
    fs::copy_file(data() / f, scratch_ / "in" / f);
  }
  const auto r = run_cli("report --input " + (scratch_ / "in").string() + " --models " + models().string() +
                             " --out " + scratch_.path().string(),
                         scratch_.path());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count_with_extension(scratch_.path(), "kde_", ".csv"), 3u);
  EXPECT_EQ(count_with_extension(scratch_.path(), "kde_", ".json"), 3u);
  EXPECT_EQ(count_with_extension(scratch_.path(), "heatmap_", ".csv"), 3u);
  const auto summary = read_text(scratch_ / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
  const auto kde = nlohmann::json::parse(read_text(scratch_ / "kde_style_cL_fL.json"));
  EXPECT_NEAR(kde["integral"].get<double>(), 1.0, 0.05);
}

TEST_F(Pipeline, CorrelateWritesTable) {
  ASSERT_EQ(run_cli("correlate --input " + data().string() + " --out " + scratch_.path().string(), scratch_.path()).code,
            0);
  const auto table = read_text(scratch_ / "correlation.csv");
  EXPECT_NE(table.find("VR,"), std::string::npos);
  EXPECT_NE(table.find("Fuel,"), std::string::npos);
}

TEST_F(Pipeline, AdviseIsDeterministic) {
  TempDir other;
  const std::string tail = " --input " + data().string() + " --models " + models().string();
  ASSERT_EQ(run_cli("advise" + tail + " --out " + scratch_.path().string(), scratch_.path()).code, 0);
  ASSERT_EQ(run_cli("advise" + tail + " --out " + other.path().string(), other.path()).code, 0);
  for (const char* f : {"advice_events.txt", "intersection.csv"}) {
    EXPECT_EQ(read_text(scratch_ / f), read_text(other / f)) << f;
  }
}

TEST_F(Pipeline, DamagedOrMissingModelsAreDataErrors) {
  const std::string input = " --input " + (data() / "style_cL_fL.csv").string();
  EXPECT_EQ(run_cli("advise" + input + " --out " + scratch_.path().string(), scratch_.path()).code, 2);

  auto doc = nlohmann::ordered_json::parse(read_text(models() / "main_som.json"));
  doc["features"].erase(doc["features"].size() - 1);
  write_text(scratch_ / "main_som.json", doc.dump(2));
  fs::copy_file(models() / "aux_som.json", scratch_ / "aux_som.json");
  const auto r = run_cli("advise" + input + " --out " + scratch_.path().string(), scratch_.path());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("dimension"), std::string::npos) << r.output;
}

TEST_F(Pipeline, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli("", scratch_.path()).code, 1);
  EXPECT_EQ(run_cli("train --bogus", scratch_.path()).code, 1);
  EXPECT_EQ(run_cli("train --input " + data().string() + " --split 1.5 --out " + scratch_.path().string(),
                    scratch_.path()).code,
            1);
  EXPECT_EQ(run_cli("train --out " + scratch_.path().string(), scratch_.path()).code, 1);
  EXPECT_EQ(run_cli("--help", scratch_.path()).code, 0);
}

TEST_F(Pipeline, ConfigFileWithFlagOverride) {
  write_text(scratch_ / "run.json", nlohmann::json{{"input", data().string()},
                                                   {"out", scratch_.path().string()},
                                                   {"seed", 7}}
                                        .dump());
  ASSERT_EQ(run_cli("train --config " + (scratch_ / "run.json").string(), scratch_.path()).code, 0);
  const auto seven = read_text(scratch_ / "main_som.json");
  ASSERT_EQ(run_cli("train --config " + (scratch_ / "run.json").string() + " --seed 42", scratch_.path()).code, 0);
  EXPECT_NE(read_text(scratch_ / "main_som.json"), seven);
  EXPECT_EQ(read_text(scratch_ / "main_som.json"), read_text(models() / "main_som.json"));

  write_text(scratch_ / "bad.json", R"({"sead": 1})");
  const auto r = run_cli("train --config " + (scratch_ / "bad.json").string(), scratch_.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("sead"), std::string::npos);
}

TEST_F(Pipeline, TooFewWindowsIsADataError) {
  fs::create_directories(scratch_ / "tiny");
  ASSERT_EQ(run_cli("synth --out " + (scratch_ / "tiny").string() + " --drivers 1 --duration 40", scratch_.path()).code, 0);
  const auto r = run_cli("train --input " + (scratch_ / "tiny").string() + " --out " + scratch_.path().string(),
                         scratch_.path());
  EXPECT_EQ(r.code, 2) << r.output;
}

TEST_F(Pipeline, MalformedTelemetryIsADataError) {
  fs::create_directories(scratch_ / "bad");
  write_text(scratch_ / "bad" / "x.csv", "t,SWA\n0,1\n");
  const auto r = run_cli("train --input " + (scratch_ / "bad").string() + " --out " + scratch_.path().string(),
                         scratch_.path());
  EXPECT_EQ(r.code, 2) << r.output;
}

}  // namespace
