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

#ifndef SQFL_LOGISTIC_HPP
#define SQFL_LOGISTIC_HPP

#include <vector>

#include "sqfl/data_synth.hpp"
#include "sqfl/rng.hpp"

namespace sqfl::fed {

/// Linear multinomial-logistic model: one weight row per class plus an
/// intercept column, stored flat (K x (dim + 1), row-major).
struct ModelParams {
  int n_classes = 0;
  int dim = 0;  // feature dimension, excluding the intercept
  std::vector<double> coef;

  static ModelParams zeros(int n_classes, int dim);
  int size() const { return n_classes * (dim + 1); }
  double* row(int k) { return &coef[static_cast<std::size_t>(k) * (dim + 1)]; }
  const double* row(int k) const {
    return &coef[static_cast<std::size_t>(k) * (dim + 1)];
  }
  void validate() const;
};

/// Mean cross-entropy over the client's samples plus (lambda/2)||w||^2,
/// evaluated with a log-sum-exp stable softmax.
double client_loss(const synth::ClientDataset& client,
                   const ModelParams& model, double lambda);

/// Gradient of the mean unregularized cross-entropy over `batch`
/// (all samples when batch is empty), flattened like ModelParams::coef.
/// Regularization enters through the (1 - gamma lambda) decay of the
/// local update, not here.
std::vector<double> client_gradient(const synth::ClientDataset& client,
                                    const ModelParams& model,
                                    const std::vector<int>& batch);

struct LocalUpdateConfig {
  double learning_rate;
  double lambda;
  int steps;
  int batch_size;  // <= 0 means full gradient
};

/// tau steps of w <- (1 - gamma lambda) w - gamma grad F_i(w) with
/// mini-batches drawn from `rng` (deterministic full-gradient steps when
/// batch_size <= 0 or >= n_samples).
ModelParams local_update(const synth::ClientDataset& client,
                         ModelParams model, const LocalUpdateConfig& config,
                         RngStream& rng);

/// Predicted class: argmax of the logits, ties broken toward the
/// smallest class index.
int predict(const ModelParams& model, const float* features);

}  // namespace sqfl::fed

#endif  // SQFL_LOGISTIC_HPP
