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

#include "aerofl/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "aerofl/error.hpp"
#include "aerofl/rng.hpp"

namespace aerofl {
namespace {

struct Regime {
  std::array<double, kNumSettings> settings;
  double offset;  // shifts every sensor baseline
};

constexpr std::array<Regime, 6> kRegimes = {{
    {{0.0, 0.0, 100.0}, 0.0},
    {{10.0, 0.25, 100.0}, -35.0},
    {{20.0, 0.7, 100.0}, -80.0},
    {{25.0, 0.62, 60.0}, -120.0},
    {{35.0, 0.84, 100.0}, -160.0},
    {{42.0, 0.84, 100.0}, -190.0},
}};

// Baseline and end-of-life drift for each of the 21 raw sensors. Sensors that
// are not retained stay constant, as several do in the real files.
constexpr std::array<double, kNumRawSensors> kBase = {
    518.67, 642.5, 1589.7, 1408.9, 14.62, 21.61, 553.4, 2388.1, 9065.0, 1.3,
    47.5,   521.4, 2388.1, 8143.0, 8.44,  0.03,  392.0, 2388.0, 100.0,  38.8,
    23.3};
constexpr std::array<double, kNumRawSensors> kDrift = {
    0.0, 1.4,  12.0, 16.0, 0.0,  0.0, -2.8, 0.25, 18.0, 0.0, 0.9,
    -2.2, 0.25, 12.0, 0.08, 0.0, 4.0, 0.0,  0.0,  -0.7, -0.45};
constexpr std::array<double, kNumRawSensors> kNoise = {
    0.0, 0.5, 6.0, 9.0, 0.0, 0.0, 0.9, 0.07, 22.0, 0.0, 0.27,
    0.74, 0.07, 19.0, 0.037, 0.0, 1.5, 0.0, 0.0, 0.18, 0.11};

void append_row(std::string& out, int unit, int cycle, const Regime& regime,
                double wear, Rng& rng) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d %d", unit, cycle);
  out += buf;
  for (double s : regime.settings) {
    std::snprintf(buf, sizeof(buf), " %.4f", s + 0.001 * rng.normal());
    out += buf;
  }
  for (std::size_t i = 0; i < kNumRawSensors; ++i) {
    double v = kBase[i];
    if (kNoise[i] > 0.0) v += regime.offset * 0.01 * kBase[i] / 100.0;
    v += kDrift[i] * wear + kNoise[i] * rng.normal();
    std::snprintf(buf, sizeof(buf), " %.4f", v);
    out += buf;
  }
  out += '\n';
}

// Wear grows slowly, then accelerates over the last ~150 cycles of life.
double wear_at(int cycle, int life, double rate) {
  const double x = static_cast<double>(cycle) / static_cast<double>(life);
  return rate * (0.15 * x + std::pow(x, 6.0));
}

}  // namespace

SyntheticFiles generate_synthetic_cmapss(const SyntheticSpec& spec) {
  if (spec.train_engines < 1 || spec.test_engines < 1 ||
      spec.min_life < 2 || spec.max_life < spec.min_life ||
      (spec.operating_conditions != 1 && spec.operating_conditions != 6)) {
    throw ConfigError("invalid synthetic fleet specification");
  }
  Rng rng(derive_seed(spec.seed, Stream::kSynthetic));
  auto life = [&] {
    return spec.min_life +
           static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_life - spec.min_life + 1)));
  };
  auto regime = [&]() -> const Regime& {
    if (spec.operating_conditions == 1) return kRegimes[0];
    return kRegimes[rng.below(kRegimes.size())];
  };

  SyntheticFiles files;
  for (int unit = 1; unit <= spec.train_engines; ++unit) {
    const int T = life();
    const double rate = rng.uniform(0.8, 1.2);
    for (int c = 1; c <= T; ++c) {
      append_row(files.train, unit, c, regime(), wear_at(c, T, rate), rng);
    }
  }
  for (int unit = 1; unit <= spec.test_engines; ++unit) {
    const int T = life();
    const double rate = rng.uniform(0.8, 1.2);
    // Observed prefix covers 10%..90% of life, at least 20 cycles.
    const int observed = std::clamp(
        static_cast<int>(std::lround(rng.uniform(0.1, 0.9) * T)), 20, T - 1);
    for (int c = 1; c <= observed; ++c) {
      append_row(files.test, unit, c, regime(), wear_at(c, T, rate), rng);
    }
    files.rul += std::to_string(T - observed) + "\n";
  }
  return files;
}

void write_synthetic_cmapss(const std::filesystem::path& root, Subset subset,
                            const SyntheticSpec& spec) {
  auto files = generate_synthetic_cmapss(spec);
  std::filesystem::create_directories(root);
  auto paths = subset_files(root, subset);
  auto write = [](const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    out << s;
  };
  write(paths.train, files.train);
  write(paths.test, files.test);
  write(paths.rul, files.rul);
}

Dataset synthetic_dataset(Subset subset, const SyntheticSpec& spec) {
  auto files = generate_synthetic_cmapss(spec);
  return build_dataset(subset, parse_trajectory_file(files.train),
                       parse_trajectory_file(files.test),
                       parse_rul_file(files.rul));
}

}  // namespace aerofl
