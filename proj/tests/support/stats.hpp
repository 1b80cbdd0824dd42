//
// Copyright 2026 The sqfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SQFL_TESTS_SUPPORT_STATS_HPP
#define SQFL_TESTS_SUPPORT_STATS_HPP

#include <cmath>
#include <stdexcept>

namespace sqfl::testing {

// Regularized lower incomplete gamma P(a, x), by series for x < a + 1
// and continued fraction otherwise.
inline double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

inline double chi_square_cdf(double x, int dof) {
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

// Upper critical value: smallest x with CDF(x) >= 1 - alpha.
inline double chi_square_critical(int dof, double alpha) {
  double lo = 0.0, hi = 10.0 * dof + 100.0;
  while (chi_square_cdf(hi, dof) < 1.0 - alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, dof) < 1.0 - alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sqfl::testing

#endif  // SQFL_TESTS_SUPPORT_STATS_HPP
