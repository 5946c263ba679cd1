// Copyright 2026 The AeroFL Authors. All Rights Reserved.
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
// =============================================================================

#include <cmath>
#include <sstream>
#include <string>

#include "aerofl/cmapss.hpp"
#include "aerofl/error.hpp"
#include "aerofl/rng.hpp"
#include "aerofl/synthetic.hpp"
#include "doctest.h"

using namespace aerofl;

namespace {

// Engine with T cycles; sensor i at cycle t reads i + 0.01 * t * i plus noise.
EngineTrajectory ramp_engine(int id, int T, std::uint64_t seed) {
  Rng rng(seed);
  EngineTrajectory e;
  e.engine_id = id;
  for (int t = 1; t <= T; ++t) {
    CycleRow r;
    r.cycle = t;
    for (std::size_t s = 0; s < kNumSettings; ++s) r.settings[s] = rng.uniform();
    for (std::size_t i = 0; i < kNumRawSensors; ++i) {
      const double si = static_cast<double>(i + 1);
      r.sensors[i] = si + 0.01 * t * si + 0.1 * rng.normal();
    }
    e.rows.push_back(r);
  }
  return e;
}

std::string zero_line(int unit, int cycle) {
  std::string s = std::to_string(unit) + " " + std::to_string(cycle);
  for (std::size_t i = 0; i < kNumSettings + kNumRawSensors; ++i) s += " 0";
  return s + "\n";
}

NormStats identity_stats() {
  NormStats s;
  s.mean.fill(0.0);
  s.stddev.fill(1.0);
  return s;
}

}  // namespace

TEST_CASE("minimal trajectory file") {
  auto trajs = parse_trajectory_file(zero_line(1, 1));
  REQUIRE(trajs.size() == 1);
  CHECK(trajs[0].engine_id == 1);
  CHECK(trajs[0].length() == 1);
}

TEST_CASE("rows group by unit in file order") {
  std::string text = zero_line(1, 1) + zero_line(1, 2) + zero_line(2, 1) +
                     zero_line(2, 2) + zero_line(2, 3);
  auto trajs = parse_trajectory_file(text);
  REQUIRE(trajs.size() == 2);
  CHECK(trajs[0].length() == 2);
  CHECK(trajs[1].length() == 3);
  CHECK(trajs[1].rows[2].cycle == 3);
}

TEST_CASE("malformed trajectory lines report their line number") {
  std::string good = zero_line(1, 1);
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_trajectory_file(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of(good + "1 2 0 0\n") == 2);
  std::string bad = zero_line(1, 2);
  bad.replace(bad.find(" 0"), 2, " x");
  CHECK(line_of(good + bad) == 2);
  CHECK(line_of(good + zero_line(1, 3)) == 2);  // skipped cycle
  CHECK(line_of(zero_line(1, 2)) == 1);         // must start at 1
  CHECK_THROWS_AS(parse_trajectory_file(""), DataError);
  CHECK_THROWS_AS(parse_trajectory_file("\n  \n"), DataError);
}

TEST_CASE("RUL file") {
  CHECK(parse_rul_file("112\n98\n") == std::vector<int>{112, 98});
  CHECK(parse_rul_file("7") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_rul_file(""), DataError);
  CHECK_THROWS_AS(parse_rul_file("12\n-3\n"), ParseError);
  CHECK_THROWS_AS(parse_rul_file("12\n3.5\n"), ParseError);
  CHECK_THROWS_AS(parse_rul_file("12 4\n"), ParseError);
}

TEST_CASE("sensor selection keeps the fourteen informative channels in order") {
  CycleRow r;
  for (std::size_t i = 0; i < kNumRawSensors; ++i) r.sensors[i] = static_cast<double>(i + 1);
  auto s = select_sensors(r);
  const std::array<double, 14> want = {2, 3, 4, 7, 8, 9, 11, 12, 13, 14, 15, 17, 20, 21};
  CHECK(s == want);

  EngineTrajectory e;
  e.rows = {r, r};
  auto series = select_sensors(e);
  CHECK(series.length == 2);
  CHECK(std::equal(series.row(0).begin(), series.row(0).end(), series.row(1).begin()));
}

TEST_CASE("normalizer uses the sample standard deviation") {
  EngineTrajectory e;
  e.engine_id = 1;
  CycleRow a, b;
  a.cycle = 1;
  b.cycle = 2;
  for (std::size_t i = 0; i < kNumRawSensors; ++i) {
    a.sensors[i] = 0.0;
    b.sensors[i] = 2.0;
  }
  e.rows = {a, b};
  auto stats = fit_normalizer(std::span(&e, 1));
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    CHECK(stats.mean[c] == 1.0);
    CHECK(stats.stddev[c] == doctest::Approx(std::sqrt(2.0)));
  }

  e.rows = {a};
  CHECK_THROWS_AS(fit_normalizer(std::span(&e, 1)), DataError);
  e.rows = {a, a, a};
  CHECK_THROWS_AS(fit_normalizer(std::span(&e, 1)), DataError);
}

TEST_CASE("normalizing the training set with its own statistics") {
  std::vector<EngineTrajectory> train;
  for (int i = 1; i <= 5; ++i) train.push_back(ramp_engine(i, 60 + 10 * i, 40 + i));
  auto stats = fit_normalizer(train);

  std::array<double, kNumChannels> sum{}, sq{};
  std::size_t n = 0;
  for (const auto& e : train) {
    auto z = apply_normalizer(select_sensors(e), stats);
    for (std::size_t t = 0; t < z.length; ++t) {
      for (std::size_t c = 0; c < kNumChannels; ++c) {
        sum[c] += z.row(t)[c];
        sq[c] += z.row(t)[c] * z.row(t)[c];
      }
    }
    n += z.length;
  }
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    const double mean = sum[c] / n;
    CHECK(std::abs(mean) < 1e-5);
    CHECK((sq[c] - n * mean * mean) / (n - 1) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("mean maps to 0 and mean + std to 1; inverse recovers input") {
    ChannelSeries s;
    s.length = 2;
    for (std::size_t c = 0; c < kNumChannels; ++c) s.values.push_back(stats.mean[c]);
    for (std::size_t c = 0; c < kNumChannels; ++c)
      s.values.push_back(stats.mean[c] + stats.stddev[c]);
    auto z = apply_normalizer(s, stats);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      CHECK(z.row(0)[c] == 0.0);
      CHECK(z.row(1)[c] == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto raw = select_sensors(train[2]);
    auto zz = apply_normalizer(raw, stats);
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
      const std::size_t c = i % kNumChannels;
      const double back = zz.values[i] * stats.stddev[c] + stats.mean[c];
      CHECK(std::abs(back - raw.values[i]) <= 1e-6 * std::abs(raw.values[i]));
    }
  }
}

TEST_CASE("serialize then parse preserves every column") {
  std::vector<EngineTrajectory> trajs = {ramp_engine(1, 7, 3), ramp_engine(2, 4, 4)};
  auto text = serialize_trajectories(trajs);
  auto back = parse_trajectory_file(text);
  REQUIRE(back.size() == 2);
  for (std::size_t e = 0; e < 2; ++e) {
    REQUIRE(back[e].length() == trajs[e].length());
    CHECK(back[e].engine_id == trajs[e].engine_id);
    for (std::size_t t = 0; t < trajs[e].length(); ++t) {
      CHECK(back[e].rows[t].cycle == trajs[e].rows[t].cycle);
      CHECK(back[e].rows[t].settings == trajs[e].rows[t].settings);
      CHECK(back[e].rows[t].sensors == trajs[e].rows[t].sensors);
    }
  }
  CHECK(serialize_trajectories(back) == text);
}

TEST_CASE("training windows") {
  const auto stats = identity_stats();
  SUBCASE("T = 50 gives one end-of-life window") {
    auto w = make_training_windows(ramp_engine(1, 50, 1), stats);
    REQUIRE(w.size() == 1);
    CHECK(w[0].label == 0.0f);
    CHECK(w[0].end_cycle == 50);
  }
  SUBCASE("T = 200 gives 151 windows with capped labels") {
    auto e = ramp_engine(3, 200, 2);
    auto w = make_training_windows(e, stats);
    REQUIRE(w.size() == 151);
    CHECK(w.front().label == 125.0f);
    CHECK(w.front().end_cycle == 50);
    CHECK(w.back().label == 0.0f);
    CHECK(w[200 - 125 - 50].label == 125.0f);
    CHECK(w[200 - 124 - 50].label == 124.0f);
    for (const auto& x : w) CHECK(x.engine_id == 3);

    // Channel-major layout: window k, channel c, step t is row k + t.
    const auto& row = e.rows[10 + 7];
    CHECK(w[10].values[4 * kWindowLength + 7] ==
          static_cast<float>(select_sensors(row)[4]));
  }
  SUBCASE("short training engines are skipped") {
    CHECK(make_training_windows(ramp_engine(1, 49, 1), stats).empty());
  }
}

TEST_CASE("test windows") {
  const auto stats = identity_stats();
  SUBCASE("T = 60, final RUL 20") {
    auto w = make_test_windows(ramp_engine(1, 60, 5), 20, stats);
    REQUIRE(w.size() == 11);
    CHECK(w.front().label == 30.0f);
    CHECK(w.back().label == 20.0f);
  }
  SUBCASE("labels are capped") {
    auto w = make_test_windows(ramp_engine(1, 60, 5), 200, stats);
    for (const auto& x : w) CHECK(x.label == 125.0f);
  }
  SUBCASE("short trajectory is left-padded with its first row") {
    auto e = ramp_engine(9, 31, 6);
    auto w = make_test_windows(e, 40, stats);
    REQUIRE(w.size() == 1);
    CHECK(w[0].label == 40.0f);
    CHECK(w[0].end_cycle == 31);
    const auto first = select_sensors(e.rows[0]);
    const auto last = select_sensors(e.rows[30]);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      for (std::size_t t = 0; t <= 19; ++t)
        CHECK(w[0].values[c * kWindowLength + t] == static_cast<float>(first[c]));
      CHECK(w[0].values[c * kWindowLength + 49] == static_cast<float>(last[c]));
    }
  }
}

TEST_CASE("synthetic dataset passes the same protocol checks") {
  SyntheticSpec spec;
  spec.train_engines = 20;
  spec.test_engines = 20;
  auto ds = synthetic_dataset(Subset::kFD001, spec);
  CHECK(ds.train_engines.size() == 20);
  std::size_t rows = 0;
  for (const auto& e : ds.train_engines) rows += e.length();
  CHECK(ds.train.size() == rows - 20 * 49);
  for (const auto& w : ds.train) CHECK((w.label >= 0.0f && w.label <= 125.0f));
  for (const auto& w : ds.test) {
    CHECK((w.label >= 0.0f && w.label <= 125.0f));
    for (float v : w.values) CHECK(std::isfinite(v));
  }
}

TEST_CASE("subset names") {
  CHECK(parse_subset("FD002") == Subset::kFD002);
  CHECK(parse_subset("fd001") == Subset::kFD001);
  CHECK(subset_name(Subset::kFD001) == "FD001");
  CHECK_THROWS_AS(parse_subset("FD003"), ConfigError);
}
