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

#ifndef AEROFL_METRICS_HPP_
#define AEROFL_METRICS_HPP_

#include <cstddef>
#include <span>

namespace aerofl {

// Mean absolute error in cycles. Throws std::invalid_argument on empty or
// mismatched inputs.
double mae(std::span<const double> pred, std::span<const double> truth);

// Per-window NASA asymmetric penalty for d = pred - truth:
//   d <  0: exp(-d / 13) - 1   (under-prediction)
//   d >= 0: exp( d / 10) - 1   (over-prediction)
double nasa_term(double d) noexcept;

struct ScoreBreakdown {
  double total = 0.0;
  double under_sum = 0.0;
  double over_sum = 0.0;
  std::size_t under_count = 0;
  std::size_t over_count = 0;  // includes d == 0
};

ScoreBreakdown nasa_score(std::span<const double> pred,
                          std::span<const double> truth);

}  // namespace aerofl

#endif  // AEROFL_METRICS_HPP_
