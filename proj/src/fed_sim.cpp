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

#include "aerofl/fed_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "aerofl/adam.hpp"
#include "aerofl/error.hpp"
#include "aerofl/metrics.hpp"
#include "aerofl/rng.hpp"

namespace aerofl {

void ExperimentConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (local_epochs < 0) throw ConfigError("local_epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (clients < 1) throw ConfigError("clients must be >= 1");
  if (clients > 99) throw ConfigError("clients must be <= 99 (client seed layout)");
  if (rounds > 100) throw ConfigError("rounds must be <= 100 (client seed layout)");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (client_threads < 1) throw ConfigError("client_threads must be >= 1");
}

std::uint64_t derive_client_seed(std::uint64_t s, int r, int k) noexcept {
  return s * 10000 + static_cast<std::uint64_t>(r) * 100 +
         static_cast<std::uint64_t>(k);
}

namespace {

void fill_batch(std::span<const SensorWindow> windows,
                std::span<const std::size_t> idx, Tensor& x, Tensor& y) {
  const std::size_t B = idx.size();
  constexpr std::size_t kWindowSize = kNumChannels * kWindowLength;
  x = Tensor({B, kNumChannels, kWindowLength});
  y = Tensor({B, 1});
  for (std::size_t b = 0; b < B; ++b) {
    const auto& w = windows[idx[b]];
    std::copy(w.values.begin(), w.values.end(), x.data() + b * kWindowSize);
    y[b] = w.label;
  }
}

}  // namespace

ModelParams local_train(const ModelParams& global,
                        std::span<const SensorWindow> windows,
                        std::span<const std::size_t> indices,
                        const ExperimentConfig& config,
                        std::uint64_t seed_client) {
  if (indices.empty()) {
    throw std::invalid_argument("local_train: client has no windows");
  }
  ModelParams local = global;
  AdamState<float> adam(AdamHyperParams{config.learning_rate});
  Rng rng(seed_client);
  std::vector<std::size_t> order(indices.begin(), indices.end());
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  Tensor x, y;
  for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t len = std::min(bs, order.size() - start);
      fill_batch(windows, std::span(order).subspan(start, len), x, y);
      auto fwd = forward(local, x);
      auto loss = mse_loss_and_grad(fwd.predictions, y);
      auto grads = backward(local, fwd.cache, loss.grad);
      adam_step(local, grads, adam);
    }
  }
  return subtract(local, global);
}

ModelParams aggregate(const ModelParams& global,
                      std::span<const QuantizedDelta> deltas) {
  if (deltas.empty()) throw std::invalid_argument("aggregate: no client deltas");
  const BitWidth bits = deltas.front().bits();
  std::array<std::vector<double>, kNumParamTensors> sum;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    sum[i].assign(global[i].size(), 0.0);
  }
  for (const auto& q : deltas) {
    if (q.bits() != bits) {
      throw std::invalid_argument("aggregate: clients disagree on bit width");
    }
    auto d = dequantize_delta(q);
    for (std::size_t i = 0; i < kNumParamTensors; ++i) {
      if (d[i].shape() != global[i].shape()) {
        throw std::invalid_argument("aggregate: shape mismatch in " +
                                    std::string(kParamNames[i]));
      }
      for (std::size_t j = 0; j < d[i].size(); ++j) sum[i][j] += d[i][j];
    }
  }
  const double n = static_cast<double>(deltas.size());
  ModelParams out = global;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    for (std::size_t j = 0; j < out[i].size(); ++j) {
      out[i][j] = static_cast<float>(static_cast<double>(global[i][j]) + sum[i][j] / n);
    }
  }
  return out;
}

Evaluation evaluate(const ModelParams& params,
                    std::span<const SensorWindow> windows) {
  constexpr std::size_t kEvalBatch = 256;
  Evaluation ev;
  ev.predictions.resize(windows.size());
  std::vector<double> truth(windows.size());
  const std::size_t batches = (windows.size() + kEvalBatch - 1) / kEvalBatch;
  // Each batch writes disjoint slots; the reductions below run in order.
#pragma omp parallel for schedule(static)
  for (std::size_t bi = 0; bi < batches; ++bi) {
    const std::size_t start = bi * kEvalBatch;
    const std::size_t len = std::min(kEvalBatch, windows.size() - start);
    std::vector<std::size_t> idx(len);
    std::iota(idx.begin(), idx.end(), start);
    Tensor x, y;
    fill_batch(windows, idx, x, y);
    auto fwd = forward(params, x);
    for (std::size_t b = 0; b < len; ++b) {
      ev.predictions[start + b] = fwd.predictions[b];
      truth[start + b] = y[b];
    }
  }
  ev.mae = mae(ev.predictions, truth);
  ev.nasa_score = nasa_score(ev.predictions, truth).total;
  return ev;
}

ClientPartition simulation_partition(const Dataset& data, PartitionMode mode, int clients,
                                     std::uint64_t seed) {
  const auto part_seed = derive_seed(seed, Stream::kPartition);
  if (mode == PartitionMode::kIid) return partition_iid(data.train.size(), clients, part_seed);
  std::vector<int> ids;
  for (const auto& e : data.train_engines) {
    if (e.length() >= kWindowLength) ids.push_back(e.engine_id);
  }
  return partition_noniid(ids, clients, part_seed);
}

FedSimulation::FedSimulation(ExperimentConfig config,
                             std::shared_ptr<const Dataset> data)
    : config_(config), data_(std::move(data)) {
  config_.validate();
  if (!data_) throw std::invalid_argument("FedSimulation: no dataset");
  if (data_->subset != config_.subset) {
    throw ConfigError("dataset is " + std::string(subset_name(data_->subset)) +
                      " but config asks for " +
                      std::string(subset_name(config_.subset)));
  }
  partition_ = simulation_partition(*data_, config_.partition, config_.clients, config_.seed);
  client_indices_ = client_window_indices(partition_, data_->train);
  global_ = init_params(derive_seed(config_.seed, Stream::kInit));
  assert_param_count(global_);
}

RoundMetrics FedSimulation::run_round() {
  if (round_ >= config_.rounds) {
    throw std::logic_error("run_round: all rounds already completed");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int n = config_.clients;
  std::vector<std::vector<std::uint8_t>> uploads(static_cast<std::size_t>(n));
  std::vector<double> distortions(static_cast<std::size_t>(n), 0.0);
  const ModelParams snapshot = global_;
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1) num_threads(config_.client_threads)
  for (int k = 1; k <= n; ++k) {
    try {
      const auto slot = static_cast<std::size_t>(k - 1);
      auto delta = local_train(snapshot, data_->train, client_indices_[slot],
                               config_, derive_client_seed(config_.seed, round_, k));
      distortions[slot] = delta_distortion(delta, config_.bits) /
                          static_cast<double>(kExpectedParamCount);
      uploads[slot] = encode_delta(quantize_delta(delta, config_.bits, k, round_));
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<QuantizedDelta> received;
  received.reserve(uploads.size());
  for (const auto& bytes : uploads) received.push_back(decode_delta(bytes));
  global_ = aggregate(snapshot, received);

  RoundMetrics m;
  m.round = ++round_;
  auto ev = evaluate(global_, data_->test);
  m.mae = ev.mae;
  m.nasa_score = ev.nasa_score;
  double sum = 0.0;
  for (double d : distortions) sum += d;
  m.l_priv = sum / static_cast<double>(n);
  m.payload_bytes = payload_bytes(kExpectedParamCount, config_.bits);
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

ExperimentResult run_experiment(
    const ExperimentConfig& config, std::shared_ptr<const Dataset> data,
    const std::function<void(const RoundMetrics&)>& on_round) {
  FedSimulation sim(config, std::move(data));
  ExperimentResult result;
  result.config = sim.config();
  for (int r = 0; r < config.rounds; ++r) {
    result.rounds.push_back(sim.run_round());
    if (on_round) on_round(result.rounds.back());
  }
  result.final_params = sim.global_params();
  return result;
}

std::string csv_header() {
  return "subset,config_bits,partition,seed,round,mae,nasa_score,l_priv,payload_bytes\n";
}

std::string csv_row(const ExperimentConfig& config, const RoundMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%s,%llu,%d,%.6f,%.6f,%.9e,%.2f\n",
                std::string(subset_name(config.subset)).c_str(), bits_of(config.bits),
                std::string(partition_name(config.partition)).c_str(),
                static_cast<unsigned long long>(config.seed), m.round, m.mae,
                m.nasa_score, m.l_priv, m.payload_bytes);
  return buf;
}

std::string to_csv(const ExperimentResult& result) {
  std::string out = csv_header();
  for (const auto& m : result.rounds) out += csv_row(result.config, m);
  return out;
}

}  // namespace aerofl
