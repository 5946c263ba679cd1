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

#include "aerofl/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace aerofl {

template <typename T>
void adam_step(BasicModelParams<T>& params, const BasicModelParams<T>& grads,
               AdamState<T>& state) {
  const auto& h = state.hyper;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);

  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (g.shape() != p.shape() || m.shape() != p.shape()) {
      throw std::invalid_argument("adam_step: shape mismatch in " +
                                  std::string(kParamNames[i]));
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = static_cast<double>(g[j]);
      const double mj = h.beta1 * static_cast<double>(m[j]) + (1.0 - h.beta1) * gj;
      const double vj = h.beta2 * static_cast<double>(v[j]) + (1.0 - h.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double m_hat = mj / c1;
      const double v_hat = vj / c2;
      p[j] = static_cast<T>(static_cast<double>(p[j]) -
                            h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon));
    }
  }
}

template void adam_step(ModelParams&, const ModelParams&, AdamState<float>&);
template void adam_step(BasicModelParams<double>&,
                        const BasicModelParams<double>&, AdamState<double>&);

}  // namespace aerofl
