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

// Reading per-round result CSVs back in, grouped by experiment cell.

#ifndef AEROFL_RESULTS_HPP_
#define AEROFL_RESULTS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "aerofl/cmapss.hpp"
#include "aerofl/fed_sim.hpp"
#include "aerofl/partition.hpp"
#include "aerofl/quantizer.hpp"

namespace aerofl {

struct CellKey {
  Subset subset = Subset::kFD001;
  PartitionMode partition = PartitionMode::kNonIid;
  BitWidth bits = BitWidth::kFp32;
  std::uint64_t seed = 0;

  auto tie() const { return std::tuple(subset, partition, bits, seed); }
  bool operator<(const CellKey& o) const { return tie() < o.tie(); }
  bool operator==(const CellKey& o) const { return tie() == o.tie(); }
};

// "FD001_noniid_b4_s42"
std::string cell_stem(const CellKey& key);

// One configuration across seeds.
struct GroupKey {
  Subset subset = Subset::kFD001;
  PartitionMode partition = PartitionMode::kNonIid;
  BitWidth bits = BitWidth::kFp32;

  auto tie() const { return std::tuple(subset, partition, bits); }
  bool operator<(const GroupKey& o) const { return tie() < o.tie(); }
  bool operator==(const GroupKey& o) const { return tie() == o.tie(); }
};

std::string group_stem(const GroupKey& key);  // "FD001_noniid_b4"

struct CellSeries {
  CellKey key;
  std::vector<RoundMetrics> rounds;  // ordered by round, 1-based
  const RoundMetrics& final() const { return rounds.back(); }
};

// Parses one CSV in the per-round schema. All rows must share one cell, and
// rounds must run 1, 2, ... without gaps. Throws DataError with the line.
CellSeries parse_results_csv(std::string_view text);

// Every *.csv under dir (recursively), keyed by cell. Duplicate cells and
// unreadable files throw DataError naming the file.
std::map<CellKey, CellSeries> read_results_dir(const std::filesystem::path& dir);

// Cells grouped by configuration; within a group, sorted by seed.
std::map<GroupKey, std::vector<const CellSeries*>> group_cells(
    const std::map<CellKey, CellSeries>& cells);

}  // namespace aerofl

#endif  // AEROFL_RESULTS_HPP_
