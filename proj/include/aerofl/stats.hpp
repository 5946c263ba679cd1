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

// Seed-level statistics: mean and sample std, coefficient of variation,
// two-tailed paired t-test, and paired Cohen's d.

#ifndef AEROFL_STATS_HPP_
#define AEROFL_STATS_HPP_

#include <cstddef>
#include <span>

namespace aerofl {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample, divisor n - 1
};

// Throws std::invalid_argument for n < 2.
MeanStd mean_std(std::span<const double> values);

// 100 * std / |mean|. Throws std::invalid_argument when the mean is zero.
double coefficient_of_variation(std::span<const double> values);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

// 2 * P(T >= |t|).
double student_t_two_tailed_p(double t, double df);

struct PairedTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  double mean_diff = 0.0;
  double cohens_d = 0.0;
  // Zero-variance differences: p = 1 if the mean difference is zero, else 0.
  bool degenerate = false;
};

// Differences are a - b. Throws std::invalid_argument unless both inputs
// have the same length n >= 2.
PairedTestResult paired_t_test(std::span<const double> a,
                               std::span<const double> b);

struct EffectSize {
  double d = 0.0;
  bool degenerate = false;  // zero-variance differences
};

// mean(a - b) / std(a - b). At n = 10 the 95% CI is roughly d +- 0.95, so
// the value is only a directional indicator.
EffectSize cohens_d_paired(std::span<const double> a, std::span<const double> b);

}  // namespace aerofl

#endif  // AEROFL_STATS_HPP_
