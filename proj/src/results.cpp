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

#include "aerofl/results.hpp"

#include <boost/algorithm/string.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>

#include "aerofl/error.hpp"

namespace aerofl {

std::string cell_stem(const CellKey& key) {
  return group_stem({key.subset, key.partition, key.bits}) + "_s" + std::to_string(key.seed);
}

std::string group_stem(const GroupKey& key) {
  return std::string(subset_name(key.subset)) + "_" +
         std::string(partition_name(key.partition)) + "_b" +
         std::to_string(bits_of(key.bits));
}

namespace {

template <typename T>
T field(const std::vector<std::string>& cols, std::size_t i, std::size_t line) {
  T v{};
  const auto& s = cols[i];
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "bad value '" + s + "' in column " + std::to_string(i + 1));
  }
  return v;
}

}  // namespace

CellSeries parse_results_csv(std::string_view text) {
  std::vector<std::string> lines;
  boost::split(lines, text, boost::is_any_of("\n"));
  while (!lines.empty() && boost::trim_copy(lines.back()).empty()) lines.pop_back();
  const std::string header = boost::trim_copy(csv_header());
  if (lines.empty() || boost::trim_copy(lines[0]) != header) {
    throw ParseError(1, "expected header '" + header + "'");
  }
  if (lines.size() < 2) throw DataError("results file has no rows");

  CellSeries out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    std::vector<std::string> cols;
    boost::split(cols, boost::trim_copy(lines[i]), boost::is_any_of(","));
    if (cols.size() != 9) {
      throw ParseError(line, "expected 9 columns, got " + std::to_string(cols.size()));
    }
    CellKey key;
    try {
      key.subset = parse_subset(cols[0]);
      key.bits = parse_bit_width(cols[1]);
      key.partition = parse_partition(cols[2]);
    } catch (const ConfigError& e) {
      throw ParseError(line, e.what());
    }
    key.seed = field<std::uint64_t>(cols, 3, line);
    if (i == 1) {
      out.key = key;
    } else if (!(key == out.key)) {
      throw ParseError(line, "row belongs to a different cell");
    }
    RoundMetrics m;
    m.round = field<int>(cols, 4, line);
    if (m.round != static_cast<int>(i)) {
      throw ParseError(line, "expected round " + std::to_string(i));
    }
    m.mae = field<double>(cols, 5, line);
    m.nasa_score = field<double>(cols, 6, line);
    m.l_priv = field<double>(cols, 7, line);
    m.payload_bytes = field<double>(cols, 8, line);
    out.rounds.push_back(m);
  }
  return out;
}

std::map<CellKey, CellSeries> read_results_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("no results directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  // Directory iteration order is unspecified.
  std::sort(files.begin(), files.end());
  std::map<CellKey, CellSeries> out;
  std::map<CellKey, fs::path> origin;
  for (const auto& f : files) {
    // Report tables written next to the runs are not per-round logs.
    std::string first_line;
    {
      std::ifstream in(f);
      std::getline(in, first_line);
    }
    if (boost::trim_copy(first_line) != boost::trim_copy(csv_header())) continue;
    CellSeries s;
    try {
      s = parse_results_csv(read_text_file(f));
    } catch (const DataError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
    auto [it, inserted] = out.emplace(s.key, std::move(s));
    if (!inserted) {
      throw DataError("cell " + cell_stem(it->first) + " appears in both " +
                      origin[it->first].string() + " and " + f.string());
    }
    origin[it->first] = f;
  }
  return out;
}

std::map<GroupKey, std::vector<const CellSeries*>> group_cells(
    const std::map<CellKey, CellSeries>& cells) {
  std::map<GroupKey, std::vector<const CellSeries*>> out;
  // Map order already sorts by seed within a group.
  for (const auto& [key, series] : cells) {
    out[{key.subset, key.partition, key.bits}].push_back(&series);
  }
  return out;
}

}  // namespace aerofl
