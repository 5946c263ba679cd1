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

#include "aerofl/cmapss.hpp"

#include <boost/algorithm/string/predicate.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aerofl/error.hpp"

namespace aerofl {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// Calls fn(line_number, line) for every line, including blank ones.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    fn(++line_no, content.substr(pos, end - pos));
    pos = end + 1;
  }
}

double parse_real(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(line_no, "non-numeric token '" + std::string(token) + "'");
  }
  return value;
}

int parse_integral(std::string_view token, std::size_t line_no) {
  double value = parse_real(token, line_no);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw ParseError(line_no, "expected an integer, got '" + std::string(token) + "'");
  }
  return static_cast<int>(value);
}

}  // namespace

std::string_view subset_name(Subset subset) noexcept {
  switch (subset) {
    case Subset::kFD001:
      return "FD001";
    case Subset::kFD002:
      return "FD002";
  }
  return "?";
}

Subset parse_subset(std::string_view name) {
  if (boost::iequals(name, "FD001")) return Subset::kFD001;
  if (boost::iequals(name, "FD002")) return Subset::kFD002;
  throw ConfigError("unknown subset '" + std::string(name) +
                    "' (expected FD001 or FD002)");
}

std::vector<EngineTrajectory> parse_trajectory_file(std::string_view content) {
  std::vector<EngineTrajectory> out;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    auto tokens = split_tokens(line);
    if (tokens.empty()) return;
    if (tokens.size() != kNumColumns) {
      throw ParseError(line_no, "expected " + std::to_string(kNumColumns) +
                                    " columns, got " +
                                    std::to_string(tokens.size()));
    }
    int unit = parse_integral(tokens[0], line_no);
    if (unit <= 0) throw ParseError(line_no, "unit id must be positive");
    CycleRow row;
    row.cycle = parse_integral(tokens[1], line_no);
    for (std::size_t i = 0; i < kNumSettings; ++i) {
      row.settings[i] = parse_real(tokens[2 + i], line_no);
    }
    for (std::size_t i = 0; i < kNumRawSensors; ++i) {
      row.sensors[i] = parse_real(tokens[2 + kNumSettings + i], line_no);
    }

    if (out.empty() || out.back().engine_id != unit) {
      for (const auto& traj : out) {
        if (traj.engine_id == unit) {
          throw ParseError(line_no, "unit " + std::to_string(unit) +
                                        " is not contiguous in the file");
        }
      }
      out.push_back(EngineTrajectory{unit, {}});
    }
    auto& traj = out.back();
    int expected = static_cast<int>(traj.rows.size()) + 1;
    if (row.cycle != expected) {
      throw ParseError(line_no, "unit " + std::to_string(unit) + ": cycle " +
                                    std::to_string(row.cycle) + ", expected " +
                                    std::to_string(expected));
    }
    traj.rows.push_back(row);
  });
  if (out.empty()) throw DataError("trajectory file is empty");
  return out;
}

std::vector<int> parse_rul_file(std::string_view content) {
  std::vector<int> out;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    auto tokens = split_tokens(line);
    if (tokens.empty()) return;
    if (tokens.size() != 1) {
      throw ParseError(line_no, "expected one RUL value per line");
    }
    int value = parse_integral(tokens[0], line_no);
    if (value < 0) throw ParseError(line_no, "negative RUL");
    out.push_back(value);
  });
  if (out.empty()) throw DataError("RUL file is empty");
  return out;
}

std::string serialize_trajectories(std::span<const EngineTrajectory> trajs) {
  std::string out;
  char buf[64];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
  };
  for (const auto& traj : trajs) {
    for (const auto& row : traj.rows) {
      out += std::to_string(traj.engine_id);
      out += ' ';
      out += std::to_string(row.cycle);
      for (double v : row.settings) {
        out += ' ';
        put(v);
      }
      for (double v : row.sensors) {
        out += ' ';
        put(v);
      }
      out += '\n';
    }
  }
  return out;
}

std::array<double, kNumChannels> select_sensors(const CycleRow& row) noexcept {
  std::array<double, kNumChannels> out{};
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    out[c] = row.sensors[static_cast<std::size_t>(kRetainedSensors[c] - 1)];
  }
  return out;
}

ChannelSeries select_sensors(const EngineTrajectory& traj) {
  ChannelSeries series;
  series.length = traj.rows.size();
  series.values.reserve(series.length * kNumChannels);
  for (const auto& row : traj.rows) {
    auto selected = select_sensors(row);
    series.values.insert(series.values.end(), selected.begin(), selected.end());
  }
  return series;
}

NormStats fit_normalizer(std::span<const EngineTrajectory> train) {
  std::size_t n = 0;
  for (const auto& traj : train) n += traj.rows.size();
  if (n < 2) throw DataError("normalizer needs at least two training rows");

  // Two-pass: mean, then centered sum of squares.
  NormStats stats;
  std::array<double, kNumChannels> sum{};
  for (const auto& traj : train) {
    for (const auto& row : traj.rows) {
      auto x = select_sensors(row);
      for (std::size_t c = 0; c < kNumChannels; ++c) sum[c] += x[c];
    }
  }
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    stats.mean[c] = sum[c] / static_cast<double>(n);
  }
  std::array<double, kNumChannels> ss{};
  for (const auto& traj : train) {
    for (const auto& row : traj.rows) {
      auto x = select_sensors(row);
      for (std::size_t c = 0; c < kNumChannels; ++c) {
        double d = x[c] - stats.mean[c];
        ss[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    stats.stddev[c] = std::sqrt(ss[c] / static_cast<double>(n - 1));
    if (!(stats.stddev[c] > 0.0)) {
      throw DataError("sensor s" + std::to_string(kRetainedSensors[c]) +
                      " is constant across the training set");
    }
  }
  return stats;
}

ChannelSeries apply_normalizer(const ChannelSeries& series,
                               const NormStats& stats) {
  ChannelSeries out = series;
  for (std::size_t t = 0; t < out.length; ++t) {
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      auto& v = out.values[t * kNumChannels + c];
      v = (v - stats.mean[c]) / stats.stddev[c];
    }
  }
  return out;
}

namespace {

// Window ending at 1-based cycle `end`, rows [end - W, end). Rows before the
// first cycle replicate row 0.
SensorWindow cut_window(const ChannelSeries& norm, std::size_t end,
                        std::size_t window) {
  SensorWindow w;
  for (std::size_t t = 0; t < window; ++t) {
    std::ptrdiff_t src = static_cast<std::ptrdiff_t>(end) -
                         static_cast<std::ptrdiff_t>(window) +
                         static_cast<std::ptrdiff_t>(t);
    auto row = norm.row(static_cast<std::size_t>(std::max<std::ptrdiff_t>(src, 0)));
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      w.values[c * kWindowLength + t] = static_cast<float>(row[c]);
    }
  }
  w.end_cycle = static_cast<int>(end);
  return w;
}

void check_window(std::size_t window) {
  if (window != kWindowLength) {
    throw ConfigError("window length is fixed at " +
                      std::to_string(kWindowLength));
  }
}

}  // namespace

std::vector<SensorWindow> make_training_windows(const EngineTrajectory& traj,
                                                const NormStats& stats,
                                                std::size_t window) {
  check_window(window);
  const std::size_t T = traj.length();
  std::vector<SensorWindow> out;
  if (T < window) {
    std::cerr << "warning: training engine " << traj.engine_id << " has " << T
              << " cycles (< " << window << "), skipped\n";
    return out;
  }
  auto norm = apply_normalizer(select_sensors(traj), stats);
  out.reserve(T - window + 1);
  for (std::size_t end = window; end <= T; ++end) {
    auto w = cut_window(norm, end, window);
    w.label = static_cast<float>(std::min(kRulCap, static_cast<double>(T - end)));
    w.engine_id = traj.engine_id;
    out.push_back(w);
  }
  return out;
}

std::vector<SensorWindow> make_test_windows(const EngineTrajectory& traj,
                                            int final_rul,
                                            const NormStats& stats,
                                            std::size_t window) {
  check_window(window);
  if (final_rul < 0) throw DataError("negative final RUL");
  const std::size_t T = traj.length();
  auto norm = apply_normalizer(select_sensors(traj), stats);
  std::vector<SensorWindow> out;
  auto label_at = [&](std::size_t end) {
    return static_cast<float>(
        std::min(kRulCap, static_cast<double>(final_rul) +
                              static_cast<double>(T - end)));
  };
  if (T < window) {
    auto w = cut_window(norm, T, window);
    w.label = label_at(T);
    w.engine_id = traj.engine_id;
    out.push_back(w);
    return out;
  }
  out.reserve(T - window + 1);
  for (std::size_t end = window; end <= T; ++end) {
    auto w = cut_window(norm, end, window);
    w.label = label_at(end);
    w.engine_id = traj.engine_id;
    out.push_back(w);
  }
  return out;
}

SubsetFiles subset_files(const std::filesystem::path& root, Subset subset) {
  std::string name(subset_name(subset));
  return {root / ("train_" + name + ".txt"), root / ("test_" + name + ".txt"),
          root / ("RUL_" + name + ".txt")};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

Dataset build_dataset(Subset subset, std::vector<EngineTrajectory> train,
                      std::vector<EngineTrajectory> test,
                      std::vector<int> test_rul) {
  if (test.size() != test_rul.size()) {
    throw DataError("RUL file has " + std::to_string(test_rul.size()) +
                    " entries for " + std::to_string(test.size()) +
                    " test engines");
  }
  Dataset ds;
  ds.subset = subset;
  ds.stats = fit_normalizer(train);
  for (const auto& traj : train) {
    auto w = make_training_windows(traj, ds.stats);
    ds.train.insert(ds.train.end(), w.begin(), w.end());
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test[i].length() < kWindowLength) ++ds.short_test_trajectories;
    auto w = make_test_windows(test[i], test_rul[i], ds.stats);
    ds.test.insert(ds.test.end(), w.begin(), w.end());
  }
  ds.train_engines = std::move(train);
  ds.test_engines = std::move(test);
  ds.test_rul = std::move(test_rul);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& root, Subset subset) {
  auto files = subset_files(root, subset);
  auto with_context = [](const std::filesystem::path& p, auto&& parse) {
    try {
      return parse(read_text_file(p));
    } catch (const DataError& e) {
      throw DataError(p.string() + ": " + e.what());
    }
  };
  auto train = with_context(files.train, [](const std::string& s) {
    return parse_trajectory_file(s);
  });
  auto test = with_context(files.test, [](const std::string& s) {
    return parse_trajectory_file(s);
  });
  auto rul = with_context(files.rul, [](const std::string& s) {
    return parse_rul_file(s);
  });
  return build_dataset(subset, std::move(train), std::move(test),
                       std::move(rul));
}

}  // namespace aerofl
