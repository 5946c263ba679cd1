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

// C-MAPSS ingestion: parsing of the official text files, sensor selection,
// z-score normalization, and labeled sliding windows.
//
// Train/test files carry 26 whitespace-separated columns per line:
//   unit  cycle  setting1..3  s1..s21
// RUL files carry one nonnegative integer per line, one per test engine.

#ifndef AEROFL_CMAPSS_HPP_
#define AEROFL_CMAPSS_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aerofl {

inline constexpr std::size_t kNumSettings = 3;
inline constexpr std::size_t kNumRawSensors = 21;
inline constexpr std::size_t kNumColumns = 2 + kNumSettings + kNumRawSensors;
inline constexpr std::size_t kNumChannels = 14;
inline constexpr std::size_t kWindowLength = 50;
inline constexpr double kRulCap = 125.0;

// 1-based sensor numbers retained as model input, in channel order.
inline constexpr std::array<int, kNumChannels> kRetainedSensors = {
    2, 3, 4, 7, 8, 9, 11, 12, 13, 14, 15, 17, 20, 21};

struct CycleRow {
  int cycle = 0;
  std::array<double, kNumSettings> settings{};
  std::array<double, kNumRawSensors> sensors{};
};

struct EngineTrajectory {
  int engine_id = 0;
  std::vector<CycleRow> rows;

  std::size_t length() const noexcept { return rows.size(); }
};

// Row-major (cycle, channel) series of the 14 retained channels.
struct ChannelSeries {
  std::size_t length = 0;
  std::vector<double> values;  // length * kNumChannels

  std::span<const double> row(std::size_t t) const {
    return {values.data() + t * kNumChannels, kNumChannels};
  }
};

struct NormStats {
  std::array<double, kNumChannels> mean{};
  std::array<double, kNumChannels> stddev{};
};

struct SensorWindow {
  // Channel-major: values[c * kWindowLength + t].
  std::array<float, kNumChannels * kWindowLength> values{};
  float label = 0.0f;
  int engine_id = 0;
  int end_cycle = 0;
};

enum class Subset { kFD001, kFD002 };

std::string_view subset_name(Subset subset) noexcept;
Subset parse_subset(std::string_view name);  // throws ConfigError

std::vector<EngineTrajectory> parse_trajectory_file(std::string_view content);
std::vector<int> parse_rul_file(std::string_view content);

// Shortest round-trip text for every column; parse_trajectory_file of the
// result reproduces the input exactly.
std::string serialize_trajectories(std::span<const EngineTrajectory> trajs);

std::array<double, kNumChannels> select_sensors(const CycleRow& row) noexcept;
ChannelSeries select_sensors(const EngineTrajectory& traj);

// Sample standard deviation (n - 1). Throws DataError for fewer than two
// rows or a constant retained channel.
NormStats fit_normalizer(std::span<const EngineTrajectory> train);

ChannelSeries apply_normalizer(const ChannelSeries& series,
                               const NormStats& stats);

// One window per end cycle t in [W, T], label min(125, T - t). Trajectories
// shorter than W yield no windows and a warning on stderr.
std::vector<SensorWindow> make_training_windows(
    const EngineTrajectory& traj, const NormStats& stats,
    std::size_t window = kWindowLength);

// Labels min(125, final_rul + T - t). A trajectory shorter than W yields a
// single window whose missing prefix replicates the first row.
std::vector<SensorWindow> make_test_windows(
    const EngineTrajectory& traj, int final_rul, const NormStats& stats,
    std::size_t window = kWindowLength);

struct SubsetFiles {
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path rul;
};

SubsetFiles subset_files(const std::filesystem::path& root, Subset subset);

std::string read_text_file(const std::filesystem::path& path);

// Fully prepared subset: normalizer fitted on train, windows for both splits.
struct Dataset {
  Subset subset = Subset::kFD001;
  std::vector<EngineTrajectory> train_engines;
  std::vector<EngineTrajectory> test_engines;
  std::vector<int> test_rul;
  NormStats stats;
  std::vector<SensorWindow> train;
  std::vector<SensorWindow> test;
  std::size_t short_test_trajectories = 0;
};

Dataset load_dataset(const std::filesystem::path& root, Subset subset);
Dataset build_dataset(Subset subset, std::vector<EngineTrajectory> train,
                      std::vector<EngineTrajectory> test,
                      std::vector<int> test_rul);

}  // namespace aerofl

#endif  // AEROFL_CMAPSS_HPP_
