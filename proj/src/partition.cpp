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

#include "aerofl/partition.hpp"

#include <boost/algorithm/string/predicate.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "aerofl/error.hpp"
#include "aerofl/rng.hpp"

namespace aerofl {

std::string_view partition_name(PartitionMode mode) noexcept {
  return mode == PartitionMode::kNonIid ? "noniid" : "iid";
}

PartitionMode parse_partition(std::string_view name) {
  if (boost::iequals(name, "noniid") || boost::iequals(name, "non-iid")) {
    return PartitionMode::kNonIid;
  }
  if (boost::iequals(name, "iid")) return PartitionMode::kIid;
  throw ConfigError("unknown partition '" + std::string(name) +
                    "' (expected noniid or iid)");
}

namespace {

std::vector<std::vector<int>> chunk(const std::vector<int>& items, int clients) {
  const std::size_t n = static_cast<std::size_t>(clients);
  const std::size_t base = items.size() / n;
  const std::size_t extra = items.size() % n;
  std::vector<std::vector<int>> out(n);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out[k].assign(items.begin() + static_cast<std::ptrdiff_t>(pos),
                  items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

void check_clients(int clients, std::size_t items, const char* what) {
  if (clients <= 0) throw std::invalid_argument("client count must be positive");
  if (items < static_cast<std::size_t>(clients)) {
    throw std::invalid_argument(std::string("fewer ") + what + " (" +
                                std::to_string(items) + ") than clients (" +
                                std::to_string(clients) + ")");
  }
}

}  // namespace

ClientPartition partition_noniid(std::span<const int> engine_ids, int clients,
                                 std::uint64_t seed) {
  check_clients(clients, engine_ids.size(), "engines");
  std::vector<int> ids(engine_ids.begin(), engine_ids.end());
  Rng rng(seed);
  rng.shuffle(ids.begin(), ids.end());
  return {PartitionMode::kNonIid, seed, chunk(ids, clients)};
}

ClientPartition partition_iid(std::size_t window_count, int clients,
                              std::uint64_t seed) {
  check_clients(clients, window_count, "windows");
  std::vector<int> idx(window_count);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx.begin(), idx.end());
  return {PartitionMode::kIid, seed, chunk(idx, clients)};
}

std::vector<std::vector<std::size_t>> client_window_indices(
    const ClientPartition& partition, std::span<const SensorWindow> windows) {
  std::vector<std::vector<std::size_t>> out(partition.clients());
  if (partition.mode == PartitionMode::kIid) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (int i : partition.assignments[k]) {
        if (i < 0 || static_cast<std::size_t>(i) >= windows.size()) {
          throw std::invalid_argument("window index out of range");
        }
        out[k].push_back(static_cast<std::size_t>(i));
      }
    }
    return out;
  }
  std::unordered_map<int, std::size_t> owner;
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int id : partition.assignments[k]) owner[id] = k;
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto it = owner.find(windows[i].engine_id);
    if (it != owner.end()) out[it->second].push_back(i);
  }
  return out;
}

namespace {

constexpr std::size_t kBins = static_cast<std::size_t>(kRulCap) + 1;

std::vector<double> unit_cdf(std::span<const double> sample) {
  std::vector<double> hist(kBins, 0.0);
  for (double v : sample) {
    double c = std::clamp(v, 0.0, kRulCap);
    hist[static_cast<std::size_t>(std::floor(c))] += 1.0;
  }
  const double n = static_cast<double>(sample.size());
  double run = 0.0;
  for (auto& h : hist) {
    run += h;
    h = run / n;
  }
  return hist;
}

}  // namespace

double emd_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("emd_1d: empty sample");
  }
  auto ca = unit_cdf(a);
  auto cb = unit_cdf(b);
  double sum = 0.0;
  // Both CDFs reach 1 at the last bin, so it contributes nothing.
  for (std::size_t v = 0; v + 1 < kBins; ++v) sum += std::abs(ca[v] - cb[v]);
  return sum;
}

HeterogeneityReport heterogeneity_report(const ClientPartition& partition,
                                         std::span<const SensorWindow> windows) {
  auto per_client = client_window_indices(partition, windows);
  std::vector<double> global;
  for (const auto& idx : per_client) {
    for (auto i : idx) global.push_back(windows[i].label);
  }
  if (global.empty()) throw std::invalid_argument("partition owns no windows");

  HeterogeneityReport rep;
  rep.global_mean_rul =
      std::accumulate(global.begin(), global.end(), 0.0) / static_cast<double>(global.size());
  for (std::size_t k = 0; k < per_client.size(); ++k) {
    if (per_client[k].empty()) {
      throw std::invalid_argument("client " + std::to_string(k + 1) +
                                  " has no windows");
    }
    std::vector<double> labels;
    labels.reserve(per_client[k].size());
    for (auto i : per_client[k]) labels.push_back(windows[i].label);
    rep.client_windows.push_back(labels.size());
    rep.client_mean_rul.push_back(std::accumulate(labels.begin(), labels.end(), 0.0) /
                                  static_cast<double>(labels.size()));
    rep.client_emd.push_back(emd_1d(labels, global));
  }
  rep.average_emd = std::accumulate(rep.client_emd.begin(), rep.client_emd.end(), 0.0) /
                    static_cast<double>(rep.client_emd.size());
  return rep;
}

}  // namespace aerofl
