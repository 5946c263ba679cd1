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

#include "aerofl/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace aerofl {

MeanStd mean_std(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument("mean_std needs at least two values");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double coefficient_of_variation(std::span<const double> values) {
  auto ms = mean_std(values);
  if (ms.mean == 0.0) {
    throw std::invalid_argument("coefficient of variation undefined for zero mean");
  }
  return 100.0 * ms.stddev / std::abs(ms.mean);
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz. Converges for
// x < (a + 1) / (a + b + 2).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete_beta: a and b must be positive");
  }
  if (x < 0.0 || x > 1.0 || std::isnan(x)) {
    throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return incomplete_beta(0.5 * df, 0.5, x);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_tailed_p(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

namespace {

std::vector<double> differences(std::span<const double> a,
                                std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired samples differ in length (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw std::invalid_argument("paired test needs n >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

PairedTestResult paired_t_test(std::span<const double> a,
                               std::span<const double> b) {
  auto d = differences(a, b);
  auto ms = mean_std(d);
  PairedTestResult r;
  r.df = static_cast<int>(d.size()) - 1;
  r.mean_diff = ms.mean;
  if (ms.stddev == 0.0) {
    r.degenerate = true;
    if (ms.mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
      r.cohens_d = 0.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), ms.mean);
      r.p = 0.0;
      r.cohens_d = r.t;
    }
    return r;
  }
  const double n = static_cast<double>(d.size());
  r.t = ms.mean / (ms.stddev / std::sqrt(n));
  r.p = student_t_two_tailed_p(r.t, r.df);
  r.cohens_d = ms.mean / ms.stddev;
  return r;
}

EffectSize cohens_d_paired(std::span<const double> a, std::span<const double> b) {
  auto d = differences(a, b);
  auto ms = mean_std(d);
  if (ms.stddev == 0.0) {
    return {ms.mean == 0.0 ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(), ms.mean),
            true};
  }
  return {ms.mean / ms.stddev, false};
}

}  // namespace aerofl
