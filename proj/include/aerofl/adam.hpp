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

#ifndef AEROFL_ADAM_HPP_
#define AEROFL_ADAM_HPP_

#include <cstdint>

#include "aerofl/model.hpp"

namespace aerofl {

struct AdamHyperParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamHyperParams hyper;
  BasicModelParams<T> m = BasicModelParams<T>::zeros();
  BasicModelParams<T> v = BasicModelParams<T>::zeros();
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(AdamHyperParams h) : hyper(h) {}
};

// Bias-corrected Adam:
//   m <- b1 m + (1 - b1) g,   v <- b2 v + (1 - b2) g^2
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
// step is incremented before bias correction.
template <typename T>
void adam_step(BasicModelParams<T>& params, const BasicModelParams<T>& grads,
               AdamState<T>& state);

}  // namespace aerofl

#endif  // AEROFL_ADAM_HPP_
