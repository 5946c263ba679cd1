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

#include <cmath>
#include <numeric>

#include "aerofl/adam.hpp"
#include "aerofl/model.hpp"
#include "aerofl/rng.hpp"
#include "doctest.h"
#include "oracles/finite_diff.hpp"

using namespace aerofl;

namespace {

template <typename T>
BasicTensor<T> random_batch(std::size_t B, std::uint64_t seed) {
  Rng rng(seed);
  BasicTensor<T> x({B, kInChannels, kSeqLen});
  for (auto& v : x.values()) v = static_cast<T>(rng.normal());
  return x;
}

BasicModelParams<double> shadow_params(std::uint64_t seed) {
  auto p = convert_params<double>(init_params(seed));
  // Nonzero biases put every unit in general position.
  Rng rng(seed + 1000);
  for (std::size_t i = 1; i < kNumParamTensors; i += 2) {
    for (auto& v : p[i].values()) v = rng.uniform(-0.1, 0.1);
  }
  return p;
}

}  // namespace

TEST_CASE("parameter counts match the layer table") {
  auto p = init_params(1);
  CHECK(param_count(p) == 9697);
  CHECK(layer_param_count(p, Layer::kConv1) == 1376);
  CHECK(layer_param_count(p, Layer::kConv2) == 6208);
  CHECK(layer_param_count(p, Layer::kFc1) == 2080);
  CHECK(layer_param_count(p, Layer::kFc2) == 33);
  CHECK_NOTHROW(assert_param_count(p));

  p[kFc2W] = Tensor({2, 32});
  CHECK_THROWS_AS(assert_param_count(p), std::logic_error);
}

TEST_CASE("init_params is deterministic and respects fan-in bounds") {
  CHECK(init_params(7) == init_params(7));
  CHECK_FALSE(init_params(7) == init_params(8));
  for (std::uint64_t s : {0ULL, 42ULL, 9999ULL}) {
    auto p = init_params(s);
    CHECK(param_count(p) == 9697);
    const float bound = static_cast<float>(std::sqrt(1.0 / 42.0));
    for (float v : p[kConv1W].values()) {
      CHECK(std::abs(v) <= bound);
    }
    for (std::size_t i = 1; i < kNumParamTensors; i += 2) {
      for (float v : p[i].values()) CHECK(v == 0.0f);
    }
  }
}

TEST_CASE("forward shape contract") {
  auto p = init_params(3);
  SUBCASE("zero input with zero biases gives fc2 bias") {
    auto f = forward(p, Tensor({2, kInChannels, kSeqLen}));
    CHECK(f.predictions.shape() == Shape{2, 1});
    CHECK(f.predictions[0] == 0.0f);
    CHECK(f.predictions[1] == 0.0f);
  }
  SUBCASE("intermediate sizes follow the layer table") {
    auto f = forward(p, random_batch<float>(3, 1));
    CHECK(f.cache.conv1.size() == 3 * 32 * 50);
    CHECK(f.cache.pool.size() == 3 * 32 * 25);
    CHECK(f.cache.conv2.size() == 3 * 64 * 25);
    CHECK(f.cache.gap.size() == 3 * 64);
    CHECK(f.cache.fc1.size() == 3 * 32);
    CHECK(f.predictions.shape() == Shape{3, 1});
  }
  SUBCASE("B = 1 output is finite") {
    auto f = forward(p, random_batch<float>(1, 2));
    CHECK(std::isfinite(f.predictions[0]));
  }
  SUBCASE("bad shapes are rejected") {
    CHECK_THROWS_AS(forward(p, Tensor({1, 13, 50})), std::invalid_argument);
    CHECK_THROWS_AS(forward(p, Tensor({0, 14, 50})), std::invalid_argument);
    CHECK_THROWS_AS(forward(p, Tensor({14, 50})), std::invalid_argument);
  }
}

TEST_CASE("duplicated samples produce duplicated outputs") {
  auto p = init_params(4);
  auto one = random_batch<float>(1, 9);
  Tensor two({2, kInChannels, kSeqLen});
  std::copy(one.values().begin(), one.values().end(), two.data());
  std::copy(one.values().begin(), one.values().end(), two.data() + one.size());
  auto a = forward(p, one);
  auto b = forward(p, two);
  CHECK(b.predictions[0] == a.predictions[0]);
  CHECK(b.predictions[1] == a.predictions[0]);
}

TEST_CASE("backward identities") {
  auto p = init_params(5);
  auto x = random_batch<float>(4, 11);
  auto f = forward(p, x);

  SUBCASE("zero upstream gives zero gradients") {
    auto g = backward(p, f.cache, Tensor({4, 1}));
    for (const auto& t : g.tensors) {
      for (float v : t.values()) CHECK(v == 0.0f);
    }
  }
  SUBCASE("fc2 bias gradient is the sum of upstream gradients") {
    Tensor up({4, 1}, std::vector<float>{0.5f, -1.25f, 2.0f, 0.125f});
    auto g = backward(p, f.cache, up);
    CHECK(g[kFc2B][0] == doctest::Approx(1.375));
  }
  SUBCASE("stale cache is rejected") {
    auto q = p;
    q[kFc1B][0] += 1.0f;
    CHECK_THROWS_AS(backward(q, f.cache, Tensor({4, 1})), std::invalid_argument);
  }
  SUBCASE("mismatched upstream is rejected") {
    CHECK_THROWS_AS(backward(p, f.cache, Tensor({3, 1})), std::invalid_argument);
    CHECK_THROWS_AS(backward(p, ForwardCache<float>{}, Tensor({4, 1})),
                    std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  // Two seeds here; the acceptance suite runs five.
  for (std::uint64_t seed : {101ULL, 202ULL}) {
    const std::size_t B = 1 + seed % 4;
    auto p = shadow_params(seed);
    auto x = random_batch<double>(B, seed + 7);
    BasicTensor<double> y({B, 1});
    Rng rng(seed + 3);
    for (auto& v : y.values()) v = rng.uniform(-1.0, 1.0);

    auto f = forward(p, x);
    auto loss = mse_loss_and_grad(f.predictions, y);
    auto g = backward(p, f.cache, loss.grad);
    auto r = oracle::check_gradients(p, x, y, g);
    INFO("seed " << seed << " checked " << r.checked << " refined " << r.refined
                  << " skipped " << r.skipped_kinks << " err " << r.max_rel_error);
    CHECK(r.max_rel_error < 1e-4);
    CHECK(r.checked + r.skipped_kinks == 9697);
    CHECK(r.skipped_kinks < 9697 / 100);
  }
}

TEST_CASE("permuting a batch permutes predictions and keeps gradients") {
  auto p = init_params(12);
  auto x = random_batch<float>(4, 13);
  Tensor y({4, 1}, std::vector<float>{10, 40, 80, 120});
  const std::size_t perm[4] = {2, 0, 3, 1};
  Tensor xp({4, kInChannels, kSeqLen}), yp({4, 1});
  const std::size_t stride = kInChannels * kSeqLen;
  for (std::size_t i = 0; i < 4; ++i) {
    std::copy_n(x.data() + perm[i] * stride, stride, xp.data() + i * stride);
    yp[i] = y[perm[i]];
  }
  auto f = forward(p, x);
  auto fp = forward(p, xp);
  for (std::size_t i = 0; i < 4; ++i) CHECK(fp.predictions[i] == f.predictions[perm[i]]);
  auto g = backward(p, f.cache, mse_loss_and_grad(f.predictions, y).grad);
  auto gp = backward(p, fp.cache, mse_loss_and_grad(fp.predictions, yp).grad);
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    for (std::size_t j = 0; j < g[i].size(); ++j) {
      CHECK(std::abs(g[i][j] - gp[i][j]) <= 1e-6 * std::max(1.0f, std::abs(g[i][j])));
    }
  }
}

TEST_CASE("mse loss and gradient") {
  SUBCASE("exact fit") {
    Tensor a({2, 1}, std::vector<float>{3, 4});
    auto r = mse_loss_and_grad(a, a);
    CHECK(r.loss == 0.0);
    CHECK(r.grad[0] == 0.0f);
  }
  SUBCASE("single sample") {
    auto r = mse_loss_and_grad(Tensor({1, 1}, std::vector<float>{3}),
                               Tensor({1, 1}, std::vector<float>{1}));
    CHECK(r.loss == 4.0);
    CHECK(r.grad[0] == 4.0f);
  }
  SUBCASE("two samples") {
    auto r = mse_loss_and_grad(Tensor({2, 1}, std::vector<float>{1, 2}),
                               Tensor({2, 1}, std::vector<float>{0, 0}));
    CHECK(r.loss == 2.5);
    CHECK(r.grad[0] == 1.0f);
    CHECK(r.grad[1] == 2.0f);
  }
  CHECK_THROWS_AS(mse_loss_and_grad(Tensor({2, 1}), Tensor({3, 1})),
                  std::invalid_argument);
}

TEST_CASE("adam step") {
  auto p = init_params(21);
  SUBCASE("zero gradients leave parameters unchanged") {
    auto q = p;
    AdamState<float> s;
    adam_step(q, ModelParams::zeros(), s);
    CHECK(q == p);
    CHECK(s.step == 1);
  }
  SUBCASE("first step moves each parameter by about lr") {
    auto q = p;
    auto g = ModelParams::zeros();
    Rng rng(5);
    for (auto& t : g.tensors) {
      for (auto& v : t.values()) v = static_cast<float>(rng.uniform(0.01, 1.0)) * (rng.uniform() < 0.5 ? -1.0f : 1.0f);
    }
    AdamState<float> s;
    adam_step(q, g, s);
    for (std::size_t i = 0; i < kNumParamTensors; ++i) {
      for (std::size_t j = 0; j < q[i].size(); ++j) {
        const double step = static_cast<double>(p[i][j]) - static_cast<double>(q[i][j]);
        CHECK(std::abs(step) == doctest::Approx(1e-3).epsilon(1e-3));
        CHECK((step > 0) == (g[i][j] > 0));
      }
    }
  }
  SUBCASE("deterministic") {
    auto g = ModelParams::zeros();
    g[kFc1W][3] = 0.7f;
    auto a = p, b = p;
    AdamState<float> sa, sb;
    adam_step(a, g, sa);
    adam_step(b, g, sb);
    CHECK(a == b);
    CHECK(sa.m == sb.m);
  }
}

TEST_CASE("checkpoint JSON round trip") {
  auto p = init_params(77);
  p[kFc2B][0] = 0.1f;
  auto q = params_from_json(params_to_json(p));
  CHECK(q == p);
  CHECK_THROWS(params_from_json("{\"conv1_w\": {\"shape\": [1], \"values\": [0]}}"));
}
