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

#include "aerofl/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aerofl {
namespace {

void check_pair(std::span<const double> pred, std::span<const double> truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("metric inputs must be non-empty and equal length (" +
                                std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  }
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

double nasa_term(double d) noexcept {
  return d < 0.0 ? std::expm1(-d / 13.0) : std::expm1(d / 10.0);
}

ScoreBreakdown nasa_score(std::span<const double> pred,
                          std::span<const double> truth) {
  check_pair(pred, truth);
  ScoreBreakdown s;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    const double term = nasa_term(d);
    if (d < 0.0) {
      s.under_sum += term;
      ++s.under_count;
    } else {
      s.over_sum += term;
      ++s.over_count;
    }
  }
  s.total = s.under_sum + s.over_sum;
  return s;
}

}  // namespace aerofl
