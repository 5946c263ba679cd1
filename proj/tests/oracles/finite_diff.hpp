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

// Central finite differences on the double-precision shadow of AeroConv1D.
// Independent of backward(): it only calls forward() and the loss.

#ifndef AEROFL_TESTS_ORACLES_FINITE_DIFF_HPP_
#define AEROFL_TESTS_ORACLES_FINITE_DIFF_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aerofl/model.hpp"

namespace aerofl::oracle {

// Which side of every ReLU and max-pool the forward pass took. A finite
// difference whose two probes change this pattern straddles a kink, where
// the analytic derivative is one-sided.
inline std::uint64_t activation_pattern(const ForwardCache<double>& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](bool bit) {
    h ^= bit ? 1u : 0u;
    h *= 0x100000001b3ULL;
  };
  for (double v : c.conv1) mix(v > 0.0);
  for (auto a : c.pool_argmax) mix(a != 0);
  for (double v : c.conv2) mix(v > 0.0);
  for (double v : c.fc1) mix(v > 0.0);
  return h;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  std::size_t refined = 0;  // checked with a smaller step
};

// Compares analytic against (L(p + eps) - L(p - eps)) / (2 eps) for every
// scalar parameter. Relative error uses max(|a|, |n|, floor) as the scale.
inline GradCheckResult check_gradients(const BasicModelParams<double>& params,
                                       const BasicTensor<double>& x,
                                       const BasicTensor<double>& y,
                                       const BasicModelParams<double>& analytic,
                                       double eps = 1e-3, double floor = 1e-8) {
  auto loss_and_pattern = [&](const BasicModelParams<double>& p) {
    auto f = forward(p, x);
    return std::pair{mse_loss_and_grad(f.predictions, y).loss,
                     activation_pattern(f.cache)};
  };
  const auto base_pattern = loss_and_pattern(params).second;
  GradCheckResult r;
  auto probe = params;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    for (std::size_t j = 0; j < probe[i].size(); ++j) {
      // The network is piecewise linear in any single parameter, so the
      // MSE is piecewise quadratic and a central difference inside one piece
      // is exact up to rounding. When eps straddles a kink, shrink it.
      const double orig = probe[i][j];
      double h = eps;
      double lp = 0.0, lm = 0.0;
      bool clean = false;
      for (int step = 0; step < 4 && !clean; ++step, h *= 0.1) {
        probe[i][j] = orig + h;
        const auto plus = loss_and_pattern(probe);
        probe[i][j] = orig - h;
        const auto minus = loss_and_pattern(probe);
        lp = plus.first;
        lm = minus.first;
        clean = plus.second == base_pattern && minus.second == base_pattern;
        if (clean) break;
      }
      probe[i][j] = orig;
      if (!clean) {
        ++r.skipped_kinks;
        continue;
      }
      if (h != eps) ++r.refined;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = analytic[i][j];
      const double scale = std::max({std::abs(a), std::abs(numeric), floor});
      r.max_rel_error = std::max(r.max_rel_error, std::abs(a - numeric) / scale);
      ++r.checked;
    }
  }
  return r;
}

}  // namespace aerofl::oracle

#endif  // AEROFL_TESTS_ORACLES_FINITE_DIFF_HPP_
