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

// Result tables recomputed from per-round CSVs: per-configuration statistics
// against the FP32 baseline, partition comparison, client heterogeneity.

#ifndef AEROFL_REPORT_HPP_
#define AEROFL_REPORT_HPP_

#include <map>
#include <string>
#include <vector>

#include "aerofl/partition.hpp"
#include "aerofl/results.hpp"
#include "aerofl/stats.hpp"

namespace aerofl {

struct ConfigSummary {
  GroupKey group;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_mae;
  std::vector<double> final_score;
  MeanStd mae;
  MeanStd score;
  double score_cv = 0.0;  // percent
};

// Throws DataError when fewer than two seeds are present.
ConfigSummary summarize(const GroupKey& group, const std::vector<const CellSeries*>& cells);

struct BaselineComparison {
  ConfigSummary summary;
  bool is_baseline = false;  // the FP32 row itself
  PairedTestResult mae_test;    // differences are Cfg - FP32
  PairedTestResult score_test;
};

// Every configuration of one partition mode, per subset, FP32 first then
// decreasing bit width. Throws DataError when a subset lacks FP32 or when a
// configuration's seeds differ from the baseline's.
std::vector<BaselineComparison> compare_to_baseline(
    const std::map<CellKey, CellSeries>& cells, PartitionMode mode);

std::string format_results_table(const std::vector<BaselineComparison>& rows,
                                 PartitionMode mode);
std::string results_table_csv(const std::vector<BaselineComparison>& rows);

// IID against Non-IID for every (subset, bits) present under both modes.
struct PartitionPair {
  ConfigSummary iid;
  ConfigSummary noniid;
};
std::vector<PartitionPair> compare_partitions(const std::map<CellKey, CellSeries>& cells);
std::string format_partition_table(const std::vector<PartitionPair>& rows);
std::string partition_table_csv(const std::vector<PartitionPair>& rows);

struct SubsetHeterogeneity {
  Subset subset = Subset::kFD001;
  PartitionMode mode = PartitionMode::kNonIid;
  std::uint64_t seed = 0;
  HeterogeneityReport report;
};
std::string format_heterogeneity_table(const std::vector<SubsetHeterogeneity>& rows);
std::string heterogeneity_csv(const std::vector<SubsetHeterogeneity>& rows);

}  // namespace aerofl

#endif  // AEROFL_REPORT_HPP_
