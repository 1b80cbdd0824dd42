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

#include "sqfl/discrete_gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace sqfl::dp {
namespace {

constexpr int kMaxProposals = 1'000'000;

// Bernoulli(exp(-gamma)) for gamma in [0, 1]: draw Bernoulli(gamma/k)
// for k = 1, 2, ... until a failure; accept iff the count of successes
// is even (von Neumann's alternating-series trick).
bool bernoulli_exp_neg_unit(double gamma, RngStream& rng) {
  int k = 1;
  while (rng.next_double() < gamma / k) ++k;
  return (k % 2) == 1;
}

// Two-sided discrete Laplace with integer scale t: pmf(k) proportional
// to exp(-|k| / t).
std::int64_t sample_discrete_laplace(std::int64_t t, RngStream& rng,
                                     int& budget) {
  while (budget-- > 0) {
    const std::int64_t u =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(t)));
    if (!bernoulli_exp_neg_unit(static_cast<double>(u) / static_cast<double>(t),
                                rng)) {
      continue;
    }
    std::int64_t v = 0;
    while (bernoulli_exp_neg_unit(1.0, rng)) ++v;
    const std::int64_t magnitude = u + t * v;
    const bool negative = rng.next_bool();
    if (negative && magnitude == 0) continue;  // do not double-count zero
    return negative ? -magnitude : magnitude;
  }
  throw std::runtime_error("sampler stuck");
}

}  // namespace

void DiscreteGaussianParams::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("discrete Gaussian requires sigma2 > 0");
  }
}

bool bernoulli_exp_neg(double gamma, RngStream& rng) {
  if (!(gamma >= 0.0)) {
    throw std::invalid_argument("bernoulli_exp_neg: gamma must be >= 0");
  }
  while (gamma > 1.0) {
    if (!bernoulli_exp_neg_unit(1.0, rng)) return false;
    gamma -= 1.0;
  }
  return bernoulli_exp_neg_unit(gamma, rng);
}

std::int64_t sample_discrete_gaussian(const DiscreteGaussianParams& params,
                                      RngStream& rng) {
  params.validate();
  const double sigma2 = params.sigma2;
  const auto t =
      static_cast<std::int64_t>(std::floor(std::sqrt(sigma2))) + 1;
  int budget = kMaxProposals;
  while (budget-- > 0) {
    const std::int64_t y = sample_discrete_laplace(t, rng, budget);
    const double d =
        std::abs(static_cast<double>(y)) - sigma2 / static_cast<double>(t);
    if (bernoulli_exp_neg(d * d / (2.0 * sigma2), rng)) return y;
  }
  throw std::runtime_error("sampler stuck");
}

}  // namespace sqfl::dp
