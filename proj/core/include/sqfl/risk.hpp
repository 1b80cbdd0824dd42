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

#ifndef SQFL_RISK_HPP
#define SQFL_RISK_HPP

#include <vector>

namespace sqfl::risk {

/// Empirical loss distribution: one scalar loss per client, with
/// optional client weights (nonnegative, summing to 1). An empty
/// weight vector means the uniform distribution 1/n.
struct LossVector {
  std::vector<double> values;
  std::vector<double> weights;

  /// Probability mass of atom i (1/n when weights are empty).
  double weight(std::size_t i) const;
  std::size_t size() const { return values.size(); }

  /// Throws std::invalid_argument on empty/non-finite values or on
  /// weights that are negative, mismatched, or do not sum to 1.
  void validate() const;
};

/// Fraction of the distribution treated as the tail; theta = 1 keeps
/// every client and recovers the plain mean.
struct TailThreshold {
  double theta;
  void validate() const;
};

/// A point of the capped simplex {pi : 0 <= pi_i <= w_i/theta,
/// sum pi = 1}: the dual variable whose inner product with the losses
/// attains the superquantile.
struct TailWeights {
  std::vector<double> pi;
};

/// Entropic smoothing strength; nu = 0 means the exact (nonsmooth)
/// functionals.
struct SmoothingParam {
  double nu;
};

/// Smallest loss value eta among the atoms with mass strictly above
/// eta at most theta. No interpolation between atoms.
double quantile(const LossVector& losses, TailThreshold theta);

/// Mean of the worst theta-fraction of the distribution (tail mean),
/// computed in closed form by mass-filling from the largest loss down.
/// Lies in [mean, max] and equals the mean at theta = 1.
double superquantile(const LossVector& losses, TailThreshold theta);

/// Maximizer of sum pi_i * F_i over the capped simplex: greedy cap
/// filling in descending loss order. Equal-loss atoms at the boundary
/// share the residual mass in proportion to their caps, which makes the
/// output deterministic and permutation-equivariant.
TailWeights dual_weights(const LossVector& losses, TailThreshold theta);

/// Maximizer of sum pi_i * F_i - nu * D(pi) over the capped simplex,
/// where D is the KL divergence from the client-weight distribution
/// (uniform by default). Solved exactly by a sort-and-scan capped
/// softmax; requires nu > 0.
TailWeights smoothed_weights(const LossVector& losses, TailThreshold theta,
                             SmoothingParam nu);

/// Value of the smoothed dual objective at smoothed_weights(...).
/// Within 2 * nu * log(n) of the exact superquantile.
double smoothed_superquantile(const LossVector& losses, TailThreshold theta,
                              SmoothingParam nu);

/// (1/nu) * log sum w_i * exp(nu * F_i), evaluated in log-sum-exp
/// stable form; requires nu > 0. Lies in [mean, max].
double entropic_risk(const LossVector& losses, double nu);

/// KL divergence sum pi_i log(pi_i / w_i) of pi from the client-weight
/// distribution, with 0 log 0 = 0.
double kl_from_weights(const TailWeights& pi, const LossVector& losses);

}  // namespace sqfl::risk

#endif  // SQFL_RISK_HPP
