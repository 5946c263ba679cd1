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

// Executes a grid of experiment cells with a bounded worker pool and writes
// per-cell CSVs, checkpoints, per-configuration summaries and a manifest.

#ifndef AEROFL_RUNNER_HPP_
#define AEROFL_RUNNER_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerofl/config.hpp"
#include "aerofl/results.hpp"

namespace aerofl {

std::string_view library_version() noexcept;

// Noniid cells first (subset, bits, seed), then the IID addendum.
std::vector<CellKey> build_grid(const RunConfig& config);

// Restricts a grid; unset fields match everything.
struct GridFilter {
  std::optional<std::vector<Subset>> subsets;
  std::optional<std::vector<BitWidth>> bits;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<PartitionMode> partition;

  bool matches(const CellKey& cell) const;
};

using DatasetLoader = std::function<std::shared_ptr<const Dataset>(Subset)>;

// Loads from root once per subset; thread-safe.
DatasetLoader directory_loader(const std::filesystem::path& root);

struct RunOptions {
  std::filesystem::path data_root;  // recorded in the manifest; checksummed
  bool resume = false;              // reuse complete cells already on disk
  bool quiet = false;
  GridFilter filter;
};

enum class CellStatus { kDone, kReused, kFailed, kExcluded };
std::string_view cell_status_name(CellStatus s) noexcept;

struct CellOutcome {
  CellKey key;
  CellStatus status = CellStatus::kExcluded;
  std::string error;
  double final_mae = 0.0;
  double final_score = 0.0;
  double seconds = 0.0;
};

struct RunReport {
  std::vector<CellOutcome> cells;  // full configured grid, in grid order
  std::size_t count(CellStatus s) const;
};

// Output layout under config.output:
//   runs/<cell>.csv          per-round metrics
//   checkpoints/<cell>.json  final global parameters
//   summary/<group>.json     final-round vectors across seeds
//   config.ini, manifest.json
RunReport run_grid(const RunConfig& config, const DatasetLoader& loader,
                   const RunOptions& options);

}  // namespace aerofl

#endif  // AEROFL_RUNNER_HPP_
