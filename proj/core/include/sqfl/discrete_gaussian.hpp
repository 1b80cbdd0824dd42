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

#ifndef SQFL_DISCRETE_GAUSSIAN_HPP
#define SQFL_DISCRETE_GAUSSIAN_HPP

#include <cstdint>

#include "sqfl/rng.hpp"

namespace sqfl::dp {

/// Parameters of the integer-valued Gaussian, pmf(k) proportional to
/// exp(-k^2 / (2 sigma2)). The sampler accepts any sigma2 > 0; the
/// protocol-level lower bound sigma >= 1/2 is enforced where the
/// privacy theorem needs it, not here.
struct DiscreteGaussianParams {
  double sigma2;
  void validate() const;
};

/// Exact sampler by rejection from a two-sided discrete Laplace
/// proposal. All acceptance decisions are Bernoulli(exp(-gamma)) draws
/// built from uniforms, so no floating-point Gaussian is involved.
/// Expected O(1) proposals; throws after 10^6 stuck iterations (which
/// would indicate a broken RNG).
std::int64_t sample_discrete_gaussian(const DiscreteGaussianParams& params,
                                      RngStream& rng);

/// Bernoulli(exp(-gamma)) for gamma >= 0, via the alternating-series
/// method (no call to exp). Exposed for tests.
bool bernoulli_exp_neg(double gamma, RngStream& rng);

}  // namespace sqfl::dp

#endif  // SQFL_DISCRETE_GAUSSIAN_HPP
