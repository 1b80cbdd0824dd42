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

// Reference implementations used only by tests. Every routine here is
// an independent route to a quantity the library computes: variational
// (LP-dual) formulas, direct quadrature, bisection on multipliers, and
// brute-force scans. None of them share code with the library.

#ifndef SQFL_TESTS_SUPPORT_ORACLES_HPP
#define SQFL_TESTS_SUPPORT_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sqfl::testing {

inline std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// Quantile by definition: smallest atom value v with mass strictly
// above v at most theta, mass computed by direct O(n) summation per
// candidate.
inline double quantile_by_scan(const std::vector<double>& values,
                               const std::vector<double>& weights,
                               double theta) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  for (double candidate : sorted) {
    double above = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > candidate) above += weights[i];
    }
    if (above <= theta + 1e-15) return candidate;
  }
  return sorted.back();
}

// Rockafellar-Uryasev variational form, which is also the LP dual of
// the capped-simplex maximization:
//   sq_theta = min_eta { eta + (1/theta) sum_i w_i (v_i - eta)_+ }.
// The minimum over eta of this piecewise-linear convex function is
// attained at an atom, so scanning the atoms solves it exactly.
inline double superquantile_lp_dual(const std::vector<double>& values,
                                    const std::vector<double>& weights,
                                    double theta) {
  double best = std::numeric_limits<double>::infinity();
  for (double eta : values) {
    double excess = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      excess += weights[i] * std::max(0.0, values[i] - eta);
    }
    best = std::min(best, eta + excess / theta);
  }
  return best;
}

// Quadrature of (1/theta) * integral_0^theta Q_alpha d(alpha) on a
// midpoint grid; Q_alpha evaluated by the definition scan on suffix
// masses (precomputed once).
inline double superquantile_by_quadrature(const std::vector<double>& values,
                                          const std::vector<double>& weights,
                                          double theta, int grid_points) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) {
              return values[a] < values[b];
            });
  // ascending values with the mass strictly above each atom
  std::vector<double> v(n), above(n);
  double tail = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    v[k] = values[order[k]];
    above[k] = tail - 1e-15;
    tail += weights[order[k]];
  }
  double acc = 0.0;
  for (int g = 0; g < grid_points; ++g) {
    const double alpha = theta * (g + 0.5) / grid_points;
    // smallest v[k] with above[k] <= alpha
    double q = v.back();
    for (std::size_t k = 0; k < n; ++k) {
      if (above[k] <= alpha) {
        q = v[k];
        break;
      }
    }
    acc += q;
  }
  return acc / grid_points;
}

// Exact integral of the (piecewise-constant) quantile function over
// (0, theta], evaluated segment by segment between the breakpoints of
// alpha |-> Q_alpha (the suffix masses).
inline double superquantile_by_exact_integration(
    const std::vector<double>& values, const std::vector<double>& weights,
    double theta) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) {
              return values[a] > values[b];
            });
  // Walking down from the largest atom, Q_alpha equals values[order[k]]
  // for alpha in (m_{k-1}, m_k], where m_k is the mass of the top k+1
  // atoms.
  double integral = 0.0;
  double lo = 0.0;
  for (std::size_t k = 0; k < n && lo < theta; ++k) {
    double hi = lo + weights[order[k]];
    // merge ties: identical values extend the same segment
    while (k + 1 < n && values[order[k + 1]] == values[order[k]]) {
      ++k;
      hi += weights[order[k]];
    }
    const double upper = std::min(hi, theta);
    if (upper > lo) integral += (upper - lo) * values[order[k]];
    lo = hi;
  }
  return integral / theta;
}

// Maximizer of sum pi v - nu * sum pi log(pi / w) over the capped
// simplex, solved by bisection on the simplex multiplier mu:
// pi_i(mu) = min(cap_i, w_i exp((v_i - mu)/nu - 1)) is decreasing in mu,
// and the optimum has sum_i pi_i(mu) = 1.
inline std::vector<double> smoothed_weights_by_bisection(
    const std::vector<double>& values, const std::vector<double>& weights,
    double theta, double nu, double tol = 1e-14) {
  const std::size_t n = values.size();
  std::vector<double> cap(n);
  for (std::size_t i = 0; i < n; ++i) cap[i] = weights[i] / theta;

  const auto mass = [&](double mu) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double expo = (values[i] - mu) / nu - 1.0;
      const double cap_expo = std::log(cap[i] / weights[i]);
      total += expo >= cap_expo ? cap[i] : weights[i] * std::exp(expo);
    }
    return total;
  };

  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  double lo = vmin - nu * (1.0 + std::log(static_cast<double>(n))) -
              nu * std::log(1.0 / theta) - 1.0;
  double hi = vmax + nu * 50.0 + 1.0;
  while (mass(lo) < 1.0) lo -= std::max(1.0, nu);
  while (mass(hi) > 1.0) hi += std::max(1.0, nu);
  for (int it = 0; it < 500 && hi - lo > tol * std::max(1.0, std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  std::vector<double> pi(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double expo = (values[i] - mu) / nu - 1.0;
    const double cap_expo = std::log(cap[i] / weights[i]);
    pi[i] = expo >= cap_expo ? cap[i] : weights[i] * std::exp(expo);
    total += pi[i];
  }
  for (double& p : pi) p /= total;  // absorb the residual bisection gap
  return pi;
}

// Value of the smoothed dual objective at a given feasible point.
inline double smoothed_objective(const std::vector<double>& values,
                                 const std::vector<double>& weights,
                                 double nu, const std::vector<double>& pi) {
  double obj = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    obj += pi[i] * values[i];
    if (pi[i] > 0.0) obj -= nu * pi[i] * std::log(pi[i] / weights[i]);
  }
  return obj;
}

// Central finite differences of a scalar function of a flat parameter
// vector.
template <typename F>
std::vector<double> finite_difference_gradient(F&& f, std::vector<double> x,
                                               double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Reference pmf of the integer Gaussian, normalized over a window wide
// enough that the truncated tail is negligible.
inline std::vector<double> discrete_gaussian_pmf(double sigma2, int k_max) {
  std::vector<double> pmf(2 * k_max + 1);
  double z = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    pmf[k + k_max] = std::exp(-0.5 * k * k / sigma2);
    z += pmf[k + k_max];
  }
  for (double& p : pmf) p /= z;
  return pmf;
}

}  // namespace sqfl::testing

#endif  // SQFL_TESTS_SUPPORT_ORACLES_HPP
