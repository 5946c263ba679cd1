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

// Synchronous FedAvg over quantized client deltas:
//
//   w_{r+1} = w_r + (1/N) sum_k Q_b(w_r^(k) - w_r)
//
// Every client starts round r from the same snapshot w_r, trains E local
// epochs of mini-batch Adam on MSE, and uploads its quantized delta. The
// server decodes, dequantizes, and applies the unweighted mean.

#ifndef AEROFL_FED_SIM_HPP_
#define AEROFL_FED_SIM_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aerofl/cmapss.hpp"
#include "aerofl/model.hpp"
#include "aerofl/partition.hpp"
#include "aerofl/quantizer.hpp"

namespace aerofl {

inline constexpr std::uint64_t kDefaultSeeds[] = {42,   123,  256,  789,  1024,
                                                  2024, 3141, 4242, 5555, 9999};

struct ExperimentConfig {
  Subset subset = Subset::kFD001;
  BitWidth bits = BitWidth::kFp32;
  PartitionMode partition = PartitionMode::kNonIid;
  int rounds = 20;
  int local_epochs = 2;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int clients = 10;
  std::uint64_t seed = 42;
  int client_threads = 1;  // parallel local training within a round

  // Throws ConfigError. local_epochs may be 0 (no-op clients).
  void validate() const;
};

struct RoundMetrics {
  int round = 0;  // 1-based: metrics after aggregating round index round - 1
  double mae = 0.0;
  double nasa_score = 0.0;
  double l_priv = 0.0;
  double payload_bytes = 0.0;
  double wall_seconds = 0.0;
};

// s * 10^4 + r * 10^2 + k, with r 0-based and k 1-based.
std::uint64_t derive_client_seed(std::uint64_t s, int r, int k) noexcept;

// Trains a copy of global on windows[indices] and returns w_local - w_global.
// Fresh Adam state; the final short batch of each epoch is kept. Throws
// std::invalid_argument for an empty client.
ModelParams local_train(const ModelParams& global,
                        std::span<const SensorWindow> windows,
                        std::span<const std::size_t> indices,
                        const ExperimentConfig& config,
                        std::uint64_t seed_client);

// global + mean of dequantized deltas. Throws std::invalid_argument for an
// empty set, mixed bit widths, or a delta whose shapes differ from global.
ModelParams aggregate(const ModelParams& global,
                      std::span<const QuantizedDelta> deltas);

struct Evaluation {
  double mae = 0.0;
  double nasa_score = 0.0;
  std::vector<double> predictions;
};

Evaluation evaluate(const ModelParams& params,
                    std::span<const SensorWindow> windows);

// Client assignment used by a simulation with this experiment seed. Non-IID
// blocks cover engines with at least one full window.
ClientPartition simulation_partition(const Dataset& data, PartitionMode mode, int clients,
                                     std::uint64_t seed);

class FedSimulation {
 public:
  FedSimulation(ExperimentConfig config, std::shared_ptr<const Dataset> data);

  // Runs round next_round() and advances.
  RoundMetrics run_round();

  int next_round() const noexcept { return round_; }
  const ModelParams& global_params() const noexcept { return global_; }
  const ClientPartition& partition() const noexcept { return partition_; }
  const ExperimentConfig& config() const noexcept { return config_; }
  std::span<const std::vector<std::size_t>> client_indices() const noexcept {
    return client_indices_;
  }

 private:
  ExperimentConfig config_;
  std::shared_ptr<const Dataset> data_;
  ClientPartition partition_;
  std::vector<std::vector<std::size_t>> client_indices_;
  ModelParams global_;
  int round_ = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RoundMetrics> rounds;
  ModelParams final_params;

  double final_mae() const { return rounds.back().mae; }
  double final_score() const { return rounds.back().nasa_score; }
};

ExperimentResult run_experiment(
    const ExperimentConfig& config, std::shared_ptr<const Dataset> data,
    const std::function<void(const RoundMetrics&)>& on_round = {});

// subset,config_bits,partition,seed,round,mae,nasa_score,l_priv,payload_bytes
std::string csv_header();
std::string csv_row(const ExperimentConfig& config, const RoundMetrics& m);
std::string to_csv(const ExperimentResult& result);

}  // namespace aerofl

#endif  // AEROFL_FED_SIM_HPP_
