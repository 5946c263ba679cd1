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

#ifndef AEROFL_PARTITION_HPP_
#define AEROFL_PARTITION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aerofl/cmapss.hpp"

namespace aerofl {

enum class PartitionMode { kNonIid, kIid };

std::string_view partition_name(PartitionMode mode) noexcept;  // "noniid"/"iid"
PartitionMode parse_partition(std::string_view name);

// NonIid: assignments hold engine ids. Iid: assignments hold window indices.
struct ClientPartition {
  PartitionMode mode = PartitionMode::kNonIid;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> assignments;

  std::size_t clients() const noexcept { return assignments.size(); }
};

// Seeded permutation of engine ids (no sorting by RUL), cut into N
// contiguous blocks; the first M mod N blocks get one extra engine.
ClientPartition partition_noniid(std::span<const int> engine_ids,
                                 int clients, std::uint64_t seed);

// Seeded permutation of window indices cut into N near-equal blocks.
ClientPartition partition_iid(std::size_t window_count, int clients,
                              std::uint64_t seed);

// Window indices owned by each client.
std::vector<std::vector<std::size_t>> client_window_indices(
    const ClientPartition& partition, std::span<const SensorWindow> windows);

// Earth mover's distance between two RUL samples on unit-cycle bins over
// [0, 125]: sum over bins of |CDF_a - CDF_b|. Values are binned by floor
// after clamping to the range. Throws std::invalid_argument on empty input.
double emd_1d(std::span<const double> a, std::span<const double> b);

struct HeterogeneityReport {
  std::vector<double> client_mean_rul;
  std::vector<double> client_emd;
  std::vector<std::size_t> client_windows;
  double global_mean_rul = 0.0;
  double average_emd = 0.0;
};

// Window-label statistics per client against the pooled label distribution.
// Throws std::invalid_argument if a client owns no windows.
HeterogeneityReport heterogeneity_report(const ClientPartition& partition,
                                         std::span<const SensorWindow> windows);

}  // namespace aerofl

#endif  // AEROFL_PARTITION_HPP_
