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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ecodrive/errors.hpp"
#include "test_util.hpp"

namespace ecodrive::telemetry {
namespace {

using ecodrive::testing::Gen;
using ecodrive::testing::TempDir;
using ecodrive::testing::write_text;

std::string full_header() { return "t,SWA,VS,ERPM,PGP,GP,BP,XACC,YACC,ZACC,FUEL\n"; }

const RawChannel& find(const std::vector<RawChannel>& chs, Channel c) {
  for (const auto& ch : chs)
    if (ch.channel == c) return ch;
  throw std::logic_error("channel not found");
}

RawChannel sampled(Channel c, double rate, double t0, double t1, auto&& f) {
  RawChannel ch{c, rate, {}};
  for (std::size_t i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) / rate;
    if (t > t1 + 1e-12) break;
    ch.samples.push_back({t, f(t)});
  }
  return ch;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

TEST(LoadCsv, ParsesEveryMappedChannel) {
  TempDir dir;
  write_text(dir / "a.csv", full_header() + "0,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n"
                                            "\n"
                                            "0.03125,2,81,2010,11,0.6,0,0.2,0.3,9.7,3.1\n"
                                            "0.0625,3,82,2020,12,0.7,0,0.3,0.4,9.9,3.2\n");
  const auto chs = load_csv(dir / "a.csv", CsvSchema::standard());
  ASSERT_EQ(chs.size(), 10u);
  for (const auto& ch : chs) {
    EXPECT_EQ(ch.samples.size(), 3u) << channel_name(ch.channel);
    EXPECT_NEAR(ch.rate, 32.0, 1e-9);
  }
  EXPECT_DOUBLE_EQ(find(chs, Channel::ERPM).samples[2].value, 2020.0);
  EXPECT_DOUBLE_EQ(find(chs, Channel::SWA).samples[1].t, 0.03125);
}

TEST(LoadCsv, EmptyCellsMeanNoSample) {
  TempDir dir;
  write_text(dir / "a.csv", "t,SWA,VS,ERPM,PGP,GP,BP,XACC,YACC,ZACC,FUEL\n"
                            "0,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n"
                            "0.1,2,81,2010,11,0.6,0,0.2,0.3,9.7,\n"
                            "0.2,3,82,2020,12,0.7,0,0.3,0.4,9.9,\n"
                            "0.3,3,82,2020,12,0.7,0,0.3,0.4,9.9,3.5\n");
  const auto chs = load_csv(dir / "a.csv", CsvSchema::standard());
  EXPECT_EQ(find(chs, Channel::FUEL).samples.size(), 2u);
  EXPECT_NEAR(find(chs, Channel::FUEL).rate, 1.0 / 0.3, 1e-9);
  EXPECT_EQ(find(chs, Channel::SWA).samples.size(), 4u);
}

TEST(LoadCsv, RejectsDecreasingTimestamps) {
  TempDir dir;
  write_text(dir / "a.csv", full_header() + "0,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n"
                                            "0.5,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n"
                                            "0.25,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n");
  const auto msg = error_of([&] { load_csv(dir / "a.csv", CsvSchema::standard()); });
  EXPECT_NE(msg.find("non-monotonic"), std::string::npos) << msg;
  EXPECT_NE(msg.find("row 4"), std::string::npos) << msg;
  EXPECT_THROW(load_csv(dir / "a.csv", CsvSchema::standard()), DataError);
}

TEST(LoadCsv, MissingColumnIsNamed) {
  TempDir dir;
  write_text(dir / "a.csv", "t,SWA,VS,ERPM,PGP,GP,BP,YACC,ZACC,FUEL\n0,1,80,2000,10,0.5,0,0.2,9.8,3\n");
  const auto msg = error_of([&] { load_csv(dir / "a.csv", CsvSchema::standard()); });
  EXPECT_NE(msg.find("\"XACC\""), std::string::npos) << msg;
}

TEST(LoadCsv, UnparseableCellReportsRow) {
  TempDir dir;
  write_text(dir / "a.csv", full_header() + "0,1,80,2000,10,0.5,0,0.1,0.2,9.8,3\n"
                                            "0.5,1,80,abc,10,0.5,0,0.1,0.2,9.8,3\n");
  const auto msg = error_of([&] { load_csv(dir / "a.csv", CsvSchema::standard()); });
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("ERPM"), std::string::npos) << msg;
}

TEST(LoadCsv, MissingFileAndSchemaGaps) {
  TempDir dir;
  EXPECT_THROW(load_csv(dir / "nope.csv", CsvSchema::standard()), DataError);
  write_text(dir / "a.csv", full_header());
  CsvSchema partial;
  partial.columns = {{Channel::VS, "VS"}};
  EXPECT_THROW(load_csv(dir / "a.csv", partial), ConfigError);
}

TEST(LoadCsv, CustomHeaderNames) {
  TempDir dir;
  write_text(dir / "a.csv", "t,steer,speed,rpm,ax,ay,fuel\n0,1,80,2000,0.1,0.2,3\n1,2,81,2001,0.2,0.3,4\n");
  CsvSchema s;
  s.columns = {{Channel::SWA, "steer"}, {Channel::VS, "speed"}, {Channel::ERPM, "rpm"},
               {Channel::XACC, "ax"},   {Channel::YACC, "ay"},  {Channel::FUEL, "fuel"}};
  const auto chs = load_csv(dir / "a.csv", s);
  ASSERT_EQ(chs.size(), 6u);
  EXPECT_DOUBLE_EQ(find(chs, Channel::YACC).samples[1].value, 0.3);
}

TEST(Resample, ConstantAt10HzStaysConstant) {
  const auto rec = resample({sampled(Channel::VS, 10.0, 0.0, 5.0, [](double) { return 5.0; })});
  ASSERT_GT(rec.length(), 150u);
  for (double v : rec.channel(Channel::VS)) EXPECT_EQ(v, 5.0);
}

TEST(Resample, LinearRampIsExact) {
  const auto rec = resample({sampled(Channel::SWA, 10.0, 0.0, 1.0, [](double t) { return t; })});
  ASSERT_EQ(rec.length(), 33u);
  const auto v = rec.channel(Channel::SWA);
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_NEAR(v[i], static_cast<double>(i) / 32.0, 1e-12);
}

TEST(Resample, SineAt10HzTracksClosedForm) {
  auto f = [](double t) { return std::sin(2.0 * std::numbers::pi * t); };
  const auto rec = resample({sampled(Channel::YACC, 10.0, 0.0, 10.0, f)});
  const auto v = rec.channel(Channel::YACC);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    worst = std::max(worst, std::abs(v[i] - f(static_cast<double>(i) / 32.0)));
  EXPECT_LT(worst, 0.05);
}

TEST(Resample, IdentityAt32Hz) {
  Gen g(7);
  std::vector<RawChannel> chs;
  for (Channel c : {Channel::VS, Channel::XACC}) {
    RawChannel ch{c, 32.0, {}};
    for (std::size_t i = 0; i < 500; ++i)
      ch.samples.push_back({10.0 + static_cast<double>(i) / 32.0, g.real(0.0, 100.0)});
    chs.push_back(ch);
  }
  const auto rec = resample(chs, "d");
  ASSERT_EQ(rec.length(), 500u);
  EXPECT_EQ(rec.start_time(), 10.0);
  for (const auto& ch : chs) {
    const auto v = rec.channel(ch.channel);
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], ch.samples[i].value);
  }
}

TEST(Resample, GridStartsAtLatestChannelStart) {
  const auto a = sampled(Channel::VS, 10.0, 0.0, 10.0, [](double t) { return t; });
  const auto b = sampled(Channel::SWA, 20.0, 2.0, 8.0, [](double t) { return 2.0 * t; });
  const auto rec = resample({a, b});
  EXPECT_EQ(rec.start_time(), 2.0);
  EXPECT_EQ(rec.length(), 6u * 32u + 1u);
  EXPECT_NEAR(rec.channel(Channel::VS)[32], 3.0, 1e-12);
  EXPECT_NEAR(rec.channel(Channel::SWA)[32], 6.0, 1e-12);
}

TEST(Resample, FastChannelIsBoxAveraged) {
  Gen g(3);
  RawChannel fast{Channel::ZACC, 128.0, {}};
  for (std::size_t i = 0; i <= 1280; ++i)
    fast.samples.push_back({static_cast<double>(i) / 128.0, g.real(-1.0, 1.0)});
  const auto rec = resample({fast});
  const auto v = rec.channel(Channel::ZACC);
  // Brute force: mean of samples with t in [t_k - 1/64, t_k + 1/64).
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double tk = static_cast<double>(k) / 32.0;
    double sum = 0.0;
    int count = 0;
    for (const auto& s : fast.samples) {
      if (s.t >= tk - 1.0 / 64.0 && s.t < tk + 1.0 / 64.0) {
        sum += s.value;
        ++count;
      }
    }
    ASSERT_GT(count, 0);
    ASSERT_NEAR(v[k], sum / count, 1e-12) << k;
  }
}

TEST(Resample, DisjointRangesFail) {
  const auto a = sampled(Channel::VS, 10.0, 0.0, 1.0, [](double) { return 1.0; });
  const auto b = sampled(Channel::SWA, 10.0, 2.0, 3.0, [](double) { return 1.0; });
  EXPECT_THROW(resample({a, b}), DataError);
  EXPECT_THROW(resample({}), DataError);
  RawChannel one{Channel::VS, 10.0, {{0.0, 1.0}}};
  EXPECT_THROW(resample({one}), DataError);
}

TEST(DriveRecordTest, EnforcesInvariants) {
  DriveRecord r("x");
  r.set_channel(Channel::SWA, {1.0, 2.0, 3.0});
  EXPECT_THROW(r.set_channel(Channel::VS, {1.0, 2.0}), DataError);
  EXPECT_THROW(r.set_channel(Channel::VS, {1.0, -0.5, 2.0}), DataError);
  EXPECT_THROW(r.set_channel(Channel::ERPM, {1.0, -0.5, 2.0}), DataError);
  r.set_channel(Channel::XACC, {-1.0, -2.0, -3.0});
  EXPECT_EQ(r.length(), 3u);
  EXPECT_FALSE(r.has(Channel::FUEL));
  EXPECT_THROW(r.channel(Channel::FUEL), DataError);
  // Replacing the only channel may change the length.
  DriveRecord s("y");
  s.set_channel(Channel::VS, {1.0});
  s.set_channel(Channel::VS, {1.0, 2.0});
  EXPECT_EQ(s.length(), 2u);
}

// Enumerates every start index and keeps those whose window fits and sit on
// the hop lattice.
std::vector<std::size_t> brute_force_starts(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < n; ++s)
    if (s % 128 == 0 && s + 256 <= n) out.push_back(s);
  return out;
}

TEST(SplitWindows, MatchesBruteForceEnumeration) {
  for (std::size_t n : {0u, 1u, 255u, 256u, 257u, 383u, 384u, 385u, 512u, 1000u, 10000u}) {
    const auto ws = split_windows(n);
    const auto expect = brute_force_starts(n);
    ASSERT_EQ(ws.size(), expect.size()) << n;
    for (std::size_t i = 0; i < ws.size(); ++i) EXPECT_EQ(ws[i].start, expect[i]);
  }
  EXPECT_EQ(split_windows(512).size(), 3u);
  EXPECT_EQ(split_windows(512)[2].start, 256u);
}

TEST(SplitWindows, CountFormulaProperty) {
  Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = g.index(0, 20000);
    const std::size_t expect = n < 256 ? 0 : (n - 256) / 128 + 1;
    const auto ws = split_windows(n);
    ASSERT_EQ(ws.size(), expect) << n;
    for (std::size_t i = 1; i < ws.size(); ++i) ASSERT_EQ(ws[i].start - ws[i - 1].start, 128u);
    if (!ws.empty()) ASSERT_LE(ws.back().start + 256, n);
  }
}

DriveRecord speed_record(const std::vector<double>& vs) {
  DriveRecord r("s");
  r.set_channel(Channel::VS, vs);
  return r;
}

TEST(FilterBySpeed, ThresholdIsInclusive) {
  auto below = speed_record(std::vector<double>(256, 59.9));
  EXPECT_TRUE(filter_by_mean_speed(below, split_windows(below)).empty());
  auto at = speed_record(std::vector<double>(256, 60.0));
  EXPECT_EQ(filter_by_mean_speed(at, split_windows(at)).size(), 1u);
}

TEST(FilterBySpeed, MixedWindowUsesArithmeticMean) {
  // Half at 50.0, half at 94.6: mean 72.3.
  std::vector<double> vs(256, 50.0);
  for (std::size_t i = 128; i < 256; ++i) vs[i] = 94.6;
  auto r = speed_record(vs);
  EXPECT_NEAR(mean_speed(r, Window{0}), 72.3, 1e-12);
  EXPECT_EQ(filter_by_mean_speed(r, split_windows(r)).size(), 1u);
  EXPECT_TRUE(filter_by_mean_speed(r, split_windows(r), 72.31).empty());
}

TEST(FilterBySpeed, IdempotentAndOrderPreserving) {
  Gen g(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> vs(256 * 12);
    for (std::size_t i = 0; i < vs.size(); ++i) vs[i] = 60.0 + 30.0 * std::sin(i / 300.0 + trial) + g.real(-5, 5);
    for (double& v : vs) v = std::max(0.0, v);
    auto r = speed_record(vs);
    const auto all = split_windows(r);
    const auto once = filter_by_mean_speed(r, all);
    const auto twice = filter_by_mean_speed(r, once);
    EXPECT_EQ(once, twice);
    EXPECT_LE(once.size(), all.size());
    for (std::size_t i = 1; i < once.size(); ++i) EXPECT_LT(once[i - 1].start, once[i].start);
    for (const auto& w : all) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 256; ++i) sum += vs[w.start + i];
      const bool kept = std::find(once.begin(), once.end(), w) != once.end();
      EXPECT_EQ(kept, sum / 256.0 >= 60.0);
    }
  }
}

TEST(CsvRoundTrip, WriteLoadResampleIsLossless) {
  TempDir dir;
  Gen g(9);
  DriveRecord r("rt", 0.0);
  for (Channel c : kAllChannels) {
    std::vector<double> v(300);
    for (double& x : v) x = g.real(0.0, 3000.0);
    r.set_channel(c, v);
  }
  write_csv(dir / "r.csv", r, CsvSchema::standard());
  const auto back = resample(load_csv(dir / "r.csv", CsvSchema::standard()), "rt");
  ASSERT_EQ(back.length(), r.length());
  for (Channel c : kAllChannels) {
    const auto a = r.channel(c);
    const auto b = back.channel(c);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
  }
}

TEST(ChannelNames, RoundTrip) {
  for (Channel c : kAllChannels) EXPECT_EQ(channel_from_name(channel_name(c)), c);
  EXPECT_FALSE(channel_from_name("speed").has_value());
  EXPECT_TRUE(is_required(Channel::FUEL));
  EXPECT_FALSE(is_required(Channel::ZACC));
}

}  // namespace
}  // namespace ecodrive::telemetry
