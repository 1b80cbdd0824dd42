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

#ifndef SQFL_EVAL_HPP
#define SQFL_EVAL_HPP

#include <string>
#include <vector>

#include "sqfl/data_synth.hpp"
#include "sqfl/logistic.hpp"

namespace sqfl::eval {

/// Per-client misclassification error in percent, over one split.
struct ErrorDistribution {
  std::vector<double> per_client_error;  // each in [0, 100]
  std::vector<int> client_ids;
  std::string split;
};

/// Argmax prediction per sample (ties toward the smallest class index);
/// per-client error = 100 * (1 - accuracy).
ErrorDistribution evaluate(const fed::ModelParams& model,
                           const std::vector<synth::ClientDataset>& clients,
                           std::string split);

/// Unweighted summary of the per-client error distribution. Percentiles
/// use the same atom-based quantile as the risk functionals; the
/// tau-superquantile is the mean error of the worst (100 - tau)% of
/// clients.
struct SummaryStats {
  int n_clients = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double superquantile90 = 0.0;
  double superquantile95 = 0.0;
};

SummaryStats summarize(const ErrorDistribution& dist);

std::string to_json(const SummaryStats& stats);
std::string to_csv(const ErrorDistribution& dist);

}  // namespace sqfl::eval

#endif  // SQFL_EVAL_HPP
