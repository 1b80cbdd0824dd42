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

#include "sqfl/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sqfl::risk {
namespace {

constexpr double kWeightSumTol = 1e-9;

// Indices sorted by descending loss; ties keep ascending index order so
// downstream tie-group handling is stable.
std::vector<std::size_t> descending_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace

double LossVector::weight(std::size_t i) const {
  return weights.empty() ? 1.0 / static_cast<double>(values.size())
                         : weights[i];
}

void LossVector::validate() const {
  if (values.empty()) throw std::invalid_argument("empty distribution");
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("loss values must be finite");
    }
  }
  if (!weights.empty()) {
    if (weights.size() != values.size()) {
      throw std::invalid_argument("weights/values length mismatch");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTol) {
      throw std::invalid_argument("weights must sum to 1");
    }
  }
}

void TailThreshold::validate() const {
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("tail threshold must lie in (0, 1]");
  }
}

double quantile(const LossVector& losses, TailThreshold theta) {
  losses.validate();
  theta.validate();
  const auto order = descending_order(losses.values);
  // Walk atoms from the largest down, accumulating the mass strictly
  // above each candidate value; return the smallest value whose
  // above-mass is <= theta.
  double mass_above = 0.0;
  double candidate = losses.values[order.front()];
  for (std::size_t k = 0; k < order.size();) {
    const double v = losses.values[order[k]];
    if (mass_above <= theta.theta + 1e-15) {
      candidate = v;
    } else {
      return candidate;
    }
    // Absorb the whole tie group of value v.
    while (k < order.size() && losses.values[order[k]] == v) {
      mass_above += losses.weight(order[k]);
      ++k;
    }
  }
  return candidate;
}

double superquantile(const LossVector& losses, TailThreshold theta) {
  losses.validate();
  theta.validate();
  const auto order = descending_order(losses.values);
  // Fill theta units of mass from the top; the boundary atom
  // contributes fractionally.
  double remaining = theta.theta;
  double acc = 0.0;
  for (std::size_t k : order) {
    if (remaining <= 0.0) break;
    const double take = std::min(losses.weight(k), remaining);
    acc += take * losses.values[k];
    remaining -= take;
  }
  return acc / theta.theta;
}

TailWeights dual_weights(const LossVector& losses, TailThreshold theta) {
  losses.validate();
  theta.validate();
  const auto order = descending_order(losses.values);
  const std::size_t n = losses.size();
  TailWeights out;
  out.pi.assign(n, 0.0);

  double remaining = 1.0;
  std::size_t k = 0;
  while (k < n && remaining > 0.0) {
    // Tie group [k, g).
    const double v = losses.values[order[k]];
    std::size_t g = k;
    double group_cap = 0.0;
    while (g < n && losses.values[order[g]] == v) {
      group_cap += losses.weight(order[g]) / theta.theta;
      ++g;
    }
    if (group_cap <= remaining) {
      for (std::size_t j = k; j < g; ++j) {
        out.pi[order[j]] = losses.weight(order[j]) / theta.theta;
      }
      remaining -= group_cap;
    } else {
      // Boundary group: share the residual in proportion to the caps
      // (equal shares under uniform weights).
      for (std::size_t j = k; j < g; ++j) {
        const double cap = losses.weight(order[j]) / theta.theta;
        out.pi[order[j]] = remaining * cap / group_cap;
      }
      remaining = 0.0;
    }
    k = g;
  }
  return out;
}

TailWeights smoothed_weights(const LossVector& losses, TailThreshold theta,
                             SmoothingParam nu) {
  losses.validate();
  theta.validate();
  if (!(nu.nu > 0.0)) {
    throw std::invalid_argument("use dual_weights");
  }
  const std::size_t n = losses.size();
  const auto order = descending_order(losses.values);
  const double f_max = losses.values[order.front()];

  std::vector<double> cap(n), boltz(n);
  for (std::size_t i = 0; i < n; ++i) {
    cap[i] = losses.weight(i) / theta.theta;
    boltz[i] = losses.weight(i) * std::exp((losses.values[i] - f_max) / nu.nu);
  }

  // Suffix sums of the Boltzmann factors in descending-loss order.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    suffix[k] = suffix[k + 1] + boltz[order[k]];
  }

  TailWeights out;
  out.pi.assign(n, 0.0);
  double cap_mass = 0.0;
  for (std::size_t split = 0; split < n; ++split) {
    const double residual = std::max(0.0, 1.0 - cap_mass);
    const double z = suffix[split];
    if (z <= 0.0) {
      // Boltzmann factors underflowed (nu much smaller than the loss
      // gaps): the limit solution cap-fills the remaining atoms.
      LossVector rest;
      std::vector<std::size_t> rest_idx;
      for (std::size_t k = split; k < n; ++k) {
        rest.values.push_back(losses.values[order[k]]);
        rest.weights.push_back(losses.weight(order[k]));
        rest_idx.push_back(order[k]);
      }
      double rest_w = 0.0;
      for (double w : rest.weights) rest_w += w;
      for (double& w : rest.weights) w /= rest_w;
      const double rest_theta = theta.theta * residual / rest_w;
      TailWeights fill =
          dual_weights(rest, TailThreshold{std::min(1.0, rest_theta)});
      for (std::size_t k = 0; k < rest_idx.size(); ++k) {
        out.pi[rest_idx[k]] = fill.pi[k] * residual;
      }
      return out;
    }
    const std::size_t head = order[split];
    const double head_value = residual * boltz[head] / z;
    if (head_value <= cap[head] * (1.0 + 1e-12)) {
      // KKT split found: atoms before `split` sit at their caps, the
      // rest follow the softmax over the residual mass.
      for (std::size_t k = split; k < n; ++k) {
        out.pi[order[k]] = residual * boltz[order[k]] / z;
      }
      return out;
    }
    out.pi[head] = cap[head];
    cap_mass += cap[head];
  }
  return out;  // theta == 1: every atom at its cap.
}

double smoothed_superquantile(const LossVector& losses, TailThreshold theta,
                              SmoothingParam nu) {
  const TailWeights pi = smoothed_weights(losses, theta, nu);
  double value = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    value += pi.pi[i] * losses.values[i];
  }
  return value - nu.nu * kl_from_weights(pi, losses);
}

double entropic_risk(const LossVector& losses, double nu) {
  losses.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("entropic_risk: nu must be > 0");
  const double m = *std::max_element(losses.values.begin(), losses.values.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    acc += losses.weight(i) * std::exp(nu * (losses.values[i] - m));
  }
  return m + std::log(acc) / nu;
}

double kl_from_weights(const TailWeights& pi, const LossVector& losses) {
  double d = 0.0;
  for (std::size_t i = 0; i < pi.pi.size(); ++i) {
    const double p = pi.pi[i];
    if (p > 0.0) d += p * std::log(p / losses.weight(i));
  }
  return d;
}

}  // namespace sqfl::risk
