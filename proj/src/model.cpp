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

#include "aerofl/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "aerofl/rng.hpp"
#include "json.hpp"

namespace aerofl {

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

const std::array<Shape, kNumParamTensors>& param_shapes() {
  static const std::array<Shape, kNumParamTensors> shapes = {
      Shape{kConv1Out, kInChannels, kKernel}, Shape{kConv1Out},
      Shape{kConv2Out, kConv1Out, kKernel},   Shape{kConv2Out},
      Shape{kHidden, kConv2Out},              Shape{kHidden},
      Shape{1, kHidden},                      Shape{1}};
  return shapes;
}

template <typename T>
BasicModelParams<T> BasicModelParams<T>::zeros() {
  BasicModelParams<T> p;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    p.tensors[i] = BasicTensor<T>(param_shapes()[i]);
  }
  assert_param_count(p);
  return p;
}

template <typename T>
void assert_param_count(const BasicModelParams<T>& params) {
  struct Expect {
    Layer layer;
    std::size_t count;
  };
  static constexpr Expect kLayers[] = {{Layer::kConv1, 1376},
                                       {Layer::kConv2, 6208},
                                       {Layer::kFc1, 2080},
                                       {Layer::kFc2, 33}};
  for (const auto& e : kLayers) {
    if (layer_param_count(params, e.layer) != e.count) {
      throw std::logic_error("AeroConv1D layer " +
                             std::to_string(static_cast<int>(e.layer)) +
                             " has " +
                             std::to_string(layer_param_count(params, e.layer)) +
                             " parameters, expected " + std::to_string(e.count));
    }
  }
  if (param_count(params) != kExpectedParamCount) {
    throw std::logic_error("AeroConv1D has " +
                           std::to_string(param_count(params)) +
                           " parameters, expected 9697");
  }
}

ModelParams init_params(std::uint64_t seed) {
  auto p = ModelParams::zeros();
  Rng rng(seed);
  for (std::size_t i = 0; i < kNumParamTensors; i += 2) {
    const auto& shape = p[i].shape();
    // fan_in = in_channels * kernel for conv, in_features for linear.
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < shape.size(); ++d) fan_in *= shape[d];
    double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (auto& v : p[i].values()) {
      v = static_cast<float>(rng.uniform(-bound, bound));
      // float rounding can step just past the bound.
      v = std::clamp(v, -static_cast<float>(bound), static_cast<float>(bound));
    }
  }
  return p;
}

template <typename To, typename From>
BasicModelParams<To> convert_params(const BasicModelParams<From>& params) {
  BasicModelParams<To> out;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    const auto& src = params[i];
    std::vector<To> values(src.size());
    std::transform(src.values().begin(), src.values().end(), values.begin(),
                   [](From v) { return static_cast<To>(v); });
    out[i] = BasicTensor<To>(src.shape(), std::move(values));
  }
  return out;
}

template <typename T>
BasicModelParams<T> subtract(const BasicModelParams<T>& a,
                             const BasicModelParams<T>& b) {
  BasicModelParams<T> out = a;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    if (a[i].shape() != b[i].shape()) {
      throw std::invalid_argument("subtract: shape mismatch in " +
                                  std::string(kParamNames[i]));
    }
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = a[i][j] - b[i][j];
  }
  return out;
}

template <typename T>
std::uint64_t fingerprint(const BasicModelParams<T>& params) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : params.tensors) {
    for (const T v : t.values()) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof(T));
      h = (h ^ bits) * 0x100000001b3ULL;
      h ^= h >> 29;
    }
  }
  return h;
}

namespace {

// Conv layers run as small GEMMs over an im2col buffer:
//   cols[(c, k)][t] = in[c][t + k - 1]   (zero outside [0, len))
//   out[t][o]       = bias[o] + sum_{(c, k)} cols[(c, k)][t] * wt[(c, k)][o]
// with wt the transposed weight. The innermost loops run over output
// channels, which are contiguous in both wt and out.

void im2col(const double* __restrict in, std::size_t cin, std::size_t len,
            double* __restrict cols) {
  for (std::size_t c = 0; c < cin; ++c) {
    const double* x = in + c * len;
    double* c0 = cols + (c * kKernel + 0) * len;
    double* c1 = cols + (c * kKernel + 1) * len;
    double* c2 = cols + (c * kKernel + 2) * len;
    c0[0] = 0.0;
    std::copy(x, x + len - 1, c0 + 1);
    std::copy(x, x + len, c1);
    std::copy(x + 1, x + len, c2);
    c2[len - 1] = 0.0;
  }
}

// w is (cout, cin, k); returns ((cin, k), cout).
std::vector<double> transpose_conv_weight(const std::vector<double>& w,
                                          std::size_t cout, std::size_t cin) {
  const std::size_t rows = cin * kKernel;
  std::vector<double> wt(rows * cout);
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t r = 0; r < rows; ++r) wt[r * cout + o] = w[o * rows + r];
  }
  return wt;
}

// out is (len, cout), time-major.
void conv_forward(const double* __restrict cols, std::size_t rows,
                  std::size_t len, const double* __restrict wt,
                  const double* __restrict bias, std::size_t cout,
                  double* __restrict out) {
  for (std::size_t t = 0; t < len; ++t) {
    double* __restrict y = out + t * cout;
    std::copy(bias, bias + cout, y);
    for (std::size_t r = 0; r < rows; ++r) {
      const double xv = cols[r * len + t];
      if (xv == 0.0) continue;  // padding and ReLU zeros
      const double* __restrict wr = wt + r * cout;
      for (std::size_t o = 0; o < cout; ++o) y[o] += xv * wr[o];
    }
  }
}

// dz is (len, cout), the gradient w.r.t. the pre-activation. Accumulates
// dwt ((cin, k), cout) and db; when dcols is non-null, writes the im2col
// gradient ((cin, k), len).
void conv_backward(const double* __restrict cols, std::size_t rows,
                   std::size_t len, const double* __restrict wt,
                   std::size_t cout, const double* __restrict dz,
                   double* __restrict dwt, double* __restrict db,
                   double* __restrict dcols) {
  for (std::size_t t = 0; t < len; ++t) {
    const double* __restrict g = dz + t * cout;
    for (std::size_t o = 0; o < cout; ++o) db[o] += g[o];
    for (std::size_t r = 0; r < rows; ++r) {
      const double xv = cols[r * len + t];
      const double* __restrict wr = wt + r * cout;
      if (dcols != nullptr) {
        double s = 0.0;
        for (std::size_t o = 0; o < cout; ++o) s += wr[o] * g[o];
        dcols[r * len + t] = s;
      }
      if (xv == 0.0) continue;
      double* __restrict dw = dwt + r * cout;
      for (std::size_t o = 0; o < cout; ++o) dw[o] += xv * g[o];
    }
  }
}

// Adjoint of im2col: din[c][t + k - 1] += dcols[(c, k)][t].
void col2im(const double* __restrict dcols, std::size_t cin, std::size_t len,
            double* __restrict din) {
  for (std::size_t c = 0; c < cin; ++c) {
    const double* d0 = dcols + (c * kKernel + 0) * len;
    const double* d1 = dcols + (c * kKernel + 1) * len;
    const double* d2 = dcols + (c * kKernel + 2) * len;
    double* x = din + c * len;
    for (std::size_t s = 0; s < len; ++s) {
      double v = d1[s];
      if (s + 1 < len) v += d0[s + 1];
      if (s > 0) v += d2[s - 1];
      x[s] = v;
    }
  }
}

template <typename T>
std::vector<double> widen(const T* src, std::size_t n) {
  return std::vector<double>(src, src + n);
}

template <typename T>
std::array<std::vector<double>, kNumParamTensors> widen_params(
    const BasicModelParams<T>& params) {
  std::array<std::vector<double>, kNumParamTensors> out;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    out[i] = widen(params[i].data(), params[i].size());
  }
  return out;
}

template <typename T>
void check_batch_shape(const BasicTensor<T>& batch) {
  const auto& s = batch.shape();
  if (s.size() != 3 || s[0] == 0 || s[1] != kInChannels || s[2] != kSeqLen) {
    throw std::invalid_argument("forward: expected batch shape (B, 14, 50), got " +
                                shape_string(s));
  }
}

}  // namespace

template <typename T>
ForwardResult<T> forward(const BasicModelParams<T>& params,
                         const BasicTensor<T>& batch) {
  check_batch_shape(batch);
  const std::size_t B = batch.shape()[0];

  ForwardResult<T> r;
  auto& c = r.cache;
  c.batch = B;
  c.params_fingerprint = fingerprint(params);
  c.input.assign(batch.values().begin(), batch.values().end());
  c.conv1.resize(B * kConv1Out * kSeqLen);
  c.pool.resize(B * kConv1Out * kPooledLen);
  c.pool_argmax.resize(B * kConv1Out * kPooledLen);
  c.conv2.resize(B * kConv2Out * kPooledLen);
  c.gap.resize(B * kConv2Out);
  c.fc1.resize(B * kHidden);
  r.predictions = BasicTensor<T>({B, 1});

  const auto w = widen_params(params);
  const auto wt1 = transpose_conv_weight(w[kConv1W], kConv1Out, kInChannels);
  const auto wt2 = transpose_conv_weight(w[kConv2W], kConv2Out, kConv1Out);
  std::vector<double> x(kInChannels * kSeqLen);
  std::vector<double> cols1(kInChannels * kKernel * kSeqLen);
  std::vector<double> acc1(kSeqLen * kConv1Out);
  std::vector<double> pooled(kConv1Out * kPooledLen);
  std::vector<double> cols2(kConv1Out * kKernel * kPooledLen);
  std::vector<double> acc2(kPooledLen * kConv2Out);
  std::vector<double> gap(kConv2Out);
  std::vector<double> hidden(kHidden);

  for (std::size_t b = 0; b < B; ++b) {
    const T* xin = c.input.data() + b * kInChannels * kSeqLen;
    std::copy(xin, xin + x.size(), x.begin());
    im2col(x.data(), kInChannels, kSeqLen, cols1.data());
    conv_forward(cols1.data(), kInChannels * kKernel, kSeqLen, wt1.data(),
                 w[kConv1B].data(), kConv1Out, acc1.data());
    T* h1 = c.conv1.data() + b * kConv1Out * kSeqLen;
    for (std::size_t o = 0; o < kConv1Out; ++o) {
      for (std::size_t t = 0; t < kSeqLen; ++t) {
        const double v = acc1[t * kConv1Out + o];
        h1[o * kSeqLen + t] = v > 0.0 ? static_cast<T>(v) : T{0};
      }
    }

    T* p = c.pool.data() + b * kConv1Out * kPooledLen;
    std::uint8_t* arg = c.pool_argmax.data() + b * kConv1Out * kPooledLen;
    for (std::size_t i = 0; i < kConv1Out * kPooledLen; ++i) {
      const T lo = h1[2 * i];
      const T hi = h1[2 * i + 1];
      // Ties go to the lower index.
      arg[i] = hi > lo ? 1 : 0;
      p[i] = hi > lo ? hi : lo;
      pooled[i] = static_cast<double>(p[i]);
    }

    im2col(pooled.data(), kConv1Out, kPooledLen, cols2.data());
    conv_forward(cols2.data(), kConv1Out * kKernel, kPooledLen, wt2.data(),
                 w[kConv2B].data(), kConv2Out, acc2.data());
    T* h2 = c.conv2.data() + b * kConv2Out * kPooledLen;
    for (std::size_t o = 0; o < kConv2Out; ++o) {
      for (std::size_t t = 0; t < kPooledLen; ++t) {
        const double v = acc2[t * kConv2Out + o];
        h2[o * kPooledLen + t] = v > 0.0 ? static_cast<T>(v) : T{0};
      }
    }

    T* g = c.gap.data() + b * kConv2Out;
    for (std::size_t o = 0; o < kConv2Out; ++o) {
      double s = 0.0;
      for (std::size_t t = 0; t < kPooledLen; ++t) {
        s += static_cast<double>(h2[o * kPooledLen + t]);
      }
      g[o] = static_cast<T>(s / static_cast<double>(kPooledLen));
      gap[o] = static_cast<double>(g[o]);
    }

    T* h3 = c.fc1.data() + b * kHidden;
    for (std::size_t j = 0; j < kHidden; ++j) {
      double s = w[kFc1B][j];
      const double* row = w[kFc1W].data() + j * kConv2Out;
      for (std::size_t i = 0; i < kConv2Out; ++i) s += row[i] * gap[i];
      h3[j] = s > 0.0 ? static_cast<T>(s) : T{0};
      hidden[j] = static_cast<double>(h3[j]);
    }

    double y = w[kFc2B][0];
    for (std::size_t j = 0; j < kHidden; ++j) y += w[kFc2W][j] * hidden[j];
    r.predictions[b] = static_cast<T>(y);
  }
  return r;
}

template <typename T>
BasicModelParams<T> backward(const BasicModelParams<T>& params,
                             const ForwardCache<T>& cache,
                             const BasicTensor<T>& upstream_grad) {
  const std::size_t B = cache.batch;
  if (B == 0 || cache.input.size() != B * kInChannels * kSeqLen) {
    throw std::invalid_argument("backward: empty or corrupt forward cache");
  }
  if (cache.params_fingerprint != fingerprint(params)) {
    throw std::invalid_argument(
        "backward: cache was produced with different parameters");
  }
  if (upstream_grad.shape() != Shape{B, 1}) {
    throw std::invalid_argument("backward: upstream gradient shape " +
                                shape_string(upstream_grad.shape()) +
                                " does not match batch " + std::to_string(B));
  }

  std::array<std::vector<double>, kNumParamTensors> acc;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    acc[i].assign(params[i].size(), 0.0);
  }

  const auto w = widen_params(params);
  const auto wt2 = transpose_conv_weight(w[kConv2W], kConv2Out, kConv1Out);
  // Conv weight gradients accumulate transposed, ((cin, k), cout).
  std::vector<double> dwt1(kInChannels * kKernel * kConv1Out, 0.0);
  std::vector<double> dwt2(kConv1Out * kKernel * kConv2Out, 0.0);
  std::vector<double> d_fc1(kHidden), d_gap(kConv2Out);
  std::vector<double> d_conv2(kPooledLen * kConv2Out);
  std::vector<double> d_cols2(kConv1Out * kKernel * kPooledLen);
  std::vector<double> d_pool(kConv1Out * kPooledLen);
  std::vector<double> d_conv1(kSeqLen * kConv1Out);
  std::vector<double> x(kInChannels * kSeqLen);
  std::vector<double> cols1(kInChannels * kKernel * kSeqLen);
  std::vector<double> pooled(kConv1Out * kPooledLen);
  std::vector<double> cols2(kConv1Out * kKernel * kPooledLen);

  for (std::size_t b = 0; b < B; ++b) {
    const double gy = static_cast<double>(upstream_grad[b]);
    const T* h3 = cache.fc1.data() + b * kHidden;
    const T* g = cache.gap.data() + b * kConv2Out;
    const T* h2 = cache.conv2.data() + b * kConv2Out * kPooledLen;
    const T* p = cache.pool.data() + b * kConv1Out * kPooledLen;
    const std::uint8_t* arg = cache.pool_argmax.data() + b * kConv1Out * kPooledLen;
    const T* h1 = cache.conv1.data() + b * kConv1Out * kSeqLen;
    const T* xin = cache.input.data() + b * kInChannels * kSeqLen;

    // fc2
    acc[kFc2B][0] += gy;
    for (std::size_t j = 0; j < kHidden; ++j) {
      acc[kFc2W][j] += gy * static_cast<double>(h3[j]);
      d_fc1[j] = h3[j] > T{0} ? gy * w[kFc2W][j] : 0.0;
    }

    // fc1
    std::fill(d_gap.begin(), d_gap.end(), 0.0);
    for (std::size_t j = 0; j < kHidden; ++j) {
      const double dz = d_fc1[j];
      acc[kFc1B][j] += dz;
      if (dz == 0.0) continue;
      const double* row = w[kFc1W].data() + j * kConv2Out;
      double* drow = acc[kFc1W].data() + j * kConv2Out;
      for (std::size_t i = 0; i < kConv2Out; ++i) {
        drow[i] += dz * static_cast<double>(g[i]);
        d_gap[i] += dz * row[i];
      }
    }

    // Global average pool spreads 1/25 to every position; d_conv2 is
    // time-major like the forward accumulator.
    for (std::size_t o = 0; o < kConv2Out; ++o) {
      const double share = d_gap[o] / static_cast<double>(kPooledLen);
      for (std::size_t t = 0; t < kPooledLen; ++t) {
        d_conv2[t * kConv2Out + o] = h2[o * kPooledLen + t] > T{0} ? share : 0.0;
      }
    }

    std::copy(p, p + pooled.size(), pooled.begin());
    im2col(pooled.data(), kConv1Out, kPooledLen, cols2.data());
    conv_backward(cols2.data(), kConv1Out * kKernel, kPooledLen, wt2.data(),
                  kConv2Out, d_conv2.data(), dwt2.data(), acc[kConv2B].data(),
                  d_cols2.data());
    col2im(d_cols2.data(), kConv1Out, kPooledLen, d_pool.data());

    // Max pool routes to the stored argmax.
    std::fill(d_conv1.begin(), d_conv1.end(), 0.0);
    for (std::size_t i = 0; i < kConv1Out * kPooledLen; ++i) {
      const std::size_t src = 2 * i + arg[i];
      if (h1[src] > T{0}) {
        const std::size_t o = src / kSeqLen;
        const std::size_t t = src % kSeqLen;
        d_conv1[t * kConv1Out + o] = d_pool[i];
      }
    }

    std::copy(xin, xin + x.size(), x.begin());
    im2col(x.data(), kInChannels, kSeqLen, cols1.data());
    conv_backward(cols1.data(), kInChannels * kKernel, kSeqLen, nullptr,
                  kConv1Out, d_conv1.data(), dwt1.data(), acc[kConv1B].data(),
                  nullptr);
  }

  auto untranspose = [](const std::vector<double>& dwt, std::vector<double>& dw,
                        std::size_t cout) {
    const std::size_t rows = dwt.size() / cout;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < cout; ++o) dw[o * rows + r] = dwt[r * cout + o];
    }
  };
  untranspose(dwt1, acc[kConv1W], kConv1Out);
  untranspose(dwt2, acc[kConv2W], kConv2Out);

  BasicModelParams<T> grads;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    std::vector<T> values(acc[i].size());
    std::transform(acc[i].begin(), acc[i].end(), values.begin(),
                   [](double v) { return static_cast<T>(v); });
    grads[i] = BasicTensor<T>(params[i].shape(), std::move(values));
  }
  return grads;
}

template <typename T>
LossAndGrad<T> mse_loss_and_grad(const BasicTensor<T>& pred,
                                 const BasicTensor<T>& target) {
  if (pred.shape() != target.shape() || pred.empty()) {
    throw std::invalid_argument("mse: prediction shape " +
                                shape_string(pred.shape()) +
                                " does not match target " +
                                shape_string(target.shape()));
  }
  const double n = static_cast<double>(pred.size());
  LossAndGrad<T> out;
  out.grad = BasicTensor<T>(pred.shape());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    sum += d * d;
    out.grad[i] = static_cast<T>(2.0 * d / n);
  }
  out.loss = sum / n;
  return out;
}

std::string params_to_json(const ModelParams& params) {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    j[std::string(kParamNames[i])] = {
        {"shape", params[i].shape()},
        {"values", std::vector<float>(params[i].values().begin(),
                                      params[i].values().end())}};
  }
  return j.dump();
}

ModelParams params_from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text);
  auto p = ModelParams::zeros();
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    const std::string name(kParamNames[i]);
    if (!j.contains(name)) {
      throw std::invalid_argument("checkpoint is missing tensor " + name);
    }
    auto shape = j[name].at("shape").get<Shape>();
    if (shape != param_shapes()[i]) {
      throw std::invalid_argument("checkpoint tensor " + name + " has shape " +
                                  shape_string(shape));
    }
    p[i] = Tensor(shape, j[name].at("values").get<std::vector<float>>());
  }
  return p;
}

#define AEROFL_INSTANTIATE(T)                                                  \
  template struct BasicModelParams<T>;                                         \
  template void assert_param_count(const BasicModelParams<T>&);                \
  template BasicModelParams<T> subtract(const BasicModelParams<T>&,            \
                                        const BasicModelParams<T>&);           \
  template std::uint64_t fingerprint(const BasicModelParams<T>&) noexcept;     \
  template ForwardResult<T> forward(const BasicModelParams<T>&,                \
                                    const BasicTensor<T>&);                    \
  template BasicModelParams<T> backward(const BasicModelParams<T>&,            \
                                        const ForwardCache<T>&,                \
                                        const BasicTensor<T>&);                \
  template LossAndGrad<T> mse_loss_and_grad(const BasicTensor<T>&,             \
                                            const BasicTensor<T>&);

AEROFL_INSTANTIATE(float)
AEROFL_INSTANTIATE(double)
#undef AEROFL_INSTANTIATE

template BasicModelParams<double> convert_params(const BasicModelParams<float>&);
template BasicModelParams<float> convert_params(const BasicModelParams<double>&);

}  // namespace aerofl
