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

// AeroConv1D: a 9,697-parameter feed-forward 1-D CNN for RUL regression.
//
//   input              (B, 14, 50)
//   conv1 k3 s1 p1     (B, 32, 50)  + ReLU      1,376 params
//   maxpool k2 s2      (B, 32, 25)
//   conv2 k3 s1 p1     (B, 64, 25)  + ReLU      6,208 params
//   global avg pool    (B, 64)
//   fc1                (B, 32)      + ReLU      2,080 params
//   fc2                (B, 1)                      33 params
//
// Kernels are templated on the storage type. Reductions always accumulate
// in double. float is used for training; double backs the gradient check.

#ifndef AEROFL_MODEL_HPP_
#define AEROFL_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aerofl/tensor.hpp"

namespace aerofl {

inline constexpr std::size_t kInChannels = 14;
inline constexpr std::size_t kSeqLen = 50;
inline constexpr std::size_t kConv1Out = 32;
inline constexpr std::size_t kPooledLen = kSeqLen / 2;
inline constexpr std::size_t kConv2Out = 64;
inline constexpr std::size_t kHidden = 32;
inline constexpr std::size_t kKernel = 3;

inline constexpr std::size_t kNumParamTensors = 8;
inline constexpr std::size_t kExpectedParamCount = 9697;

enum ParamIndex : std::size_t {
  kConv1W = 0,
  kConv1B,
  kConv2W,
  kConv2B,
  kFc1W,
  kFc1B,
  kFc2W,
  kFc2B,
};

inline constexpr std::array<std::string_view, kNumParamTensors> kParamNames = {
    "conv1_w", "conv1_b", "conv2_w", "conv2_b",
    "fc1_w",   "fc1_b",   "fc2_w",   "fc2_b"};

const std::array<Shape, kNumParamTensors>& param_shapes();

// The eight named tensors of AeroConv1D. Gradients, Adam moments, and
// weight deltas share this layout.
template <typename T>
struct BasicModelParams {
  std::array<BasicTensor<T>, kNumParamTensors> tensors;

  // Correctly shaped, zero-filled. Throws std::logic_error if the layer
  // table does not add up to 9,697 scalars.
  static BasicModelParams zeros();

  BasicTensor<T>& operator[](std::size_t i) noexcept { return tensors[i]; }
  const BasicTensor<T>& operator[](std::size_t i) const noexcept {
    return tensors[i];
  }

  bool operator==(const BasicModelParams&) const = default;
};

using ModelParams = BasicModelParams<float>;

template <typename T>
std::size_t param_count(const BasicModelParams<T>& params) noexcept {
  std::size_t n = 0;
  for (const auto& t : params.tensors) n += t.size();
  return n;
}

enum class Layer { kConv1, kConv2, kFc1, kFc2 };

// Weights plus bias of one layer.
template <typename T>
std::size_t layer_param_count(const BasicModelParams<T>& params, Layer layer) {
  auto w = 2 * static_cast<std::size_t>(layer);
  return params[w].size() + params[w + 1].size();
}

// Throws std::logic_error unless the model holds exactly 9,697 parameters
// with per-layer counts 1,376 / 6,208 / 2,080 / 33.
template <typename T>
void assert_param_count(const BasicModelParams<T>& params);

// Weights ~ U[-sqrt(1/fan_in), +sqrt(1/fan_in)], biases zero.
ModelParams init_params(std::uint64_t seed);

template <typename To, typename From>
BasicModelParams<To> convert_params(const BasicModelParams<From>& params);

// a - b, elementwise.
template <typename T>
BasicModelParams<T> subtract(const BasicModelParams<T>& a,
                             const BasicModelParams<T>& b);

// FNV-1a over the raw bytes of every tensor.
template <typename T>
std::uint64_t fingerprint(const BasicModelParams<T>& params) noexcept;

// Activations retained by forward() for backward().
template <typename T>
struct ForwardCache {
  std::size_t batch = 0;
  std::uint64_t params_fingerprint = 0;
  std::vector<T> input;           // B x 14 x 50
  std::vector<T> conv1;           // B x 32 x 50, post-ReLU
  std::vector<std::uint8_t> pool_argmax;  // B x 32 x 25, 0 or 1
  std::vector<T> pool;            // B x 32 x 25
  std::vector<T> conv2;           // B x 64 x 25, post-ReLU
  std::vector<T> gap;             // B x 64
  std::vector<T> fc1;             // B x 32, post-ReLU
};

template <typename T>
struct ForwardResult {
  BasicTensor<T> predictions;  // B x 1
  ForwardCache<T> cache;
};

// batch must have shape (B, 14, 50) with B >= 1; throws
// std::invalid_argument otherwise.
template <typename T>
ForwardResult<T> forward(const BasicModelParams<T>& params,
                         const BasicTensor<T>& batch);

// Throws std::invalid_argument when the cache was produced with different
// parameters or upstream_grad is not (B, 1).
template <typename T>
BasicModelParams<T> backward(const BasicModelParams<T>& params,
                             const ForwardCache<T>& cache,
                             const BasicTensor<T>& upstream_grad);

template <typename T>
struct LossAndGrad {
  double loss = 0.0;
  BasicTensor<T> grad;
};

// Mean squared error over the batch and its gradient 2 (pred - target) / B.
template <typename T>
LossAndGrad<T> mse_loss_and_grad(const BasicTensor<T>& pred,
                                 const BasicTensor<T>& target);

// Checkpoint form: {"conv1_w": {"shape": [...], "values": [...]}, ...}.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(std::string_view text);

}  // namespace aerofl

#endif  // AEROFL_MODEL_HPP_
