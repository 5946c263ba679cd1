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

// Two-tailed Student-t p-values by direct quadrature of the density, in
// long double. Shares nothing with the incomplete-beta route.

#ifndef AEROFL_TESTS_ORACLES_T_CDF_HPP_
#define AEROFL_TESTS_ORACLES_T_CDF_HPP_

#include <cmath>
#include <numbers>

namespace aerofl::oracle {

inline long double t_density(long double t, long double df) {
  const long double log_c = std::lgamma((df + 1.0L) / 2.0L) -
                            std::lgamma(df / 2.0L) -
                            0.5L * std::log(df * std::numbers::pi_v<long double>);
  return std::exp(log_c - (df + 1.0L) / 2.0L * std::log1p(t * t / df));
}

namespace detail {

template <typename F>
long double simpson(F&& f, long double a, long double b, long double fa,
                    long double fm, long double fb, long double whole,
                    long double tol, int depth) {
  const long double m = (a + b) / 2.0L;
  const long double lm = (a + m) / 2.0L;
  const long double rm = (m + b) / 2.0L;
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  const long double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0L * tol) {
    return left + right + delta / 15.0L;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
}

template <typename F>
long double integrate(F&& f, long double a, long double b, long double tol) {
  const long double fa = f(a);
  const long double fb = f(b);
  const long double fm = f((a + b) / 2.0L);
  const long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace detail

// 2 * integral_{|t|}^{inf} density. The tail is mapped onto [0, 1) with
// u = |t| + s / (1 - s).
inline double t_two_tailed_p(double t, double df) {
  const long double t0 = std::abs(static_cast<long double>(t));
  auto g = [&](long double s) -> long double {
    if (s >= 1.0L) return 0.0L;
    const long double one_minus = 1.0L - s;
    const long double u = t0 + s / one_minus;
    return t_density(u, df) / (one_minus * one_minus);
  };
  // Split so the adaptive rule sees the bulk and the far tail separately.
  long double tail = 0.0L;
  const long double cuts[] = {0.0L, 0.5L, 0.9L, 0.99L, 0.999L, 0.9999L, 1.0L};
  for (int i = 0; i + 1 < 7; ++i) {
    tail += detail::integrate(g, cuts[i], cuts[i + 1], 1e-16L);
  }
  return static_cast<double>(2.0L * tail);
}

}  // namespace aerofl::oracle

#endif  // AEROFL_TESTS_ORACLES_T_CDF_HPP_
