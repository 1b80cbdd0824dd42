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

#include "sqfl/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqfl::fed {
namespace {

void check_dims(const synth::ClientDataset& client, const ModelParams& model) {
  if (client.dim != model.dim) {
    throw std::invalid_argument("model/client dimension mismatch");
  }
  for (std::int32_t y : client.labels) {
    if (y < 0 || y >= model.n_classes) {
      throw std::invalid_argument("label outside model classes");
    }
  }
}

// Logits for one sample, then shifted softmax in place; returns the
// log-sum-exp so the caller can form the loss.
double softmax_inplace(const ModelParams& model, const float* x,
                       std::vector<double>& probs) {
  const int k_cls = model.n_classes;
  const int d = model.dim;
  double z_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_cls; ++k) {
    const double* w = model.row(k);
    double z = w[d];  // intercept
    for (int j = 0; j < d; ++j) z += w[j] * static_cast<double>(x[j]);
    probs[k] = z;
    z_max = std::max(z_max, z);
  }
  double denom = 0.0;
  for (int k = 0; k < k_cls; ++k) denom += std::exp(probs[k] - z_max);
  const double lse = z_max + std::log(denom);
  for (int k = 0; k < k_cls; ++k) probs[k] = std::exp(probs[k] - lse);
  return lse;
}

}  // namespace

ModelParams ModelParams::zeros(int n_classes, int dim) {
  ModelParams m;
  m.n_classes = n_classes;
  m.dim = dim;
  m.coef.assign(static_cast<std::size_t>(n_classes) * (dim + 1), 0.0);
  return m;
}

void ModelParams::validate() const {
  if (n_classes < 2 || dim < 1 ||
      coef.size() != static_cast<std::size_t>(n_classes) * (dim + 1)) {
    throw std::invalid_argument("malformed model parameters");
  }
  for (double v : coef) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("model parameters must be finite");
    }
  }
}

double client_loss(const synth::ClientDataset& client,
                   const ModelParams& model, double lambda) {
  check_dims(client, model);
  if (client.n_samples == 0) throw std::invalid_argument("empty client");
  std::vector<double> probs(model.n_classes);
  double total = 0.0;
  for (int s = 0; s < client.n_samples; ++s) {
    const float* x = &client.features[static_cast<std::size_t>(s) * client.dim];
    const double lse = softmax_inplace(model, x, probs);
    const double* w = model.row(client.labels[s]);
    double z_y = w[model.dim];
    for (int j = 0; j < model.dim; ++j) {
      z_y += w[j] * static_cast<double>(x[j]);
    }
    total += lse - z_y;
  }
  double sq = 0.0;
  for (double v : model.coef) sq += v * v;
  return total / client.n_samples + 0.5 * lambda * sq;
}

std::vector<double> client_gradient(const synth::ClientDataset& client,
                                    const ModelParams& model,
                                    const std::vector<int>& batch) {
  check_dims(client, model);
  if (client.n_samples == 0) throw std::invalid_argument("empty client");
  std::vector<double> grad(model.size(), 0.0);
  std::vector<double> probs(model.n_classes);
  const int d = model.dim;

  const auto accumulate = [&](int s) {
    const float* x = &client.features[static_cast<std::size_t>(s) * client.dim];
    softmax_inplace(model, x, probs);
    probs[client.labels[s]] -= 1.0;
    for (int k = 0; k < model.n_classes; ++k) {
      double* g = &grad[static_cast<std::size_t>(k) * (d + 1)];
      const double p = probs[k];
      for (int j = 0; j < d; ++j) g[j] += p * static_cast<double>(x[j]);
      g[d] += p;
    }
  };

  int count;
  if (batch.empty()) {
    count = client.n_samples;
    for (int s = 0; s < client.n_samples; ++s) accumulate(s);
  } else {
    count = static_cast<int>(batch.size());
    for (int s : batch) {
      if (s < 0 || s >= client.n_samples) {
        throw std::out_of_range("batch index out of range");
      }
      accumulate(s);
    }
  }
  for (double& g : grad) g /= count;
  return grad;
}

ModelParams local_update(const synth::ClientDataset& client,
                         ModelParams model, const LocalUpdateConfig& config,
                         RngStream& rng) {
  if (config.steps < 1) throw std::invalid_argument("need at least one step");
  const bool full = config.batch_size <= 0 ||
                    config.batch_size >= client.n_samples;
  std::vector<int> batch;
  for (int k = 0; k < config.steps; ++k) {
    if (!full) {
      batch = rng.sample_without_replacement(client.n_samples,
                                             config.batch_size);
    }
    const std::vector<double> grad = client_gradient(client, model, batch);
    const double decay = 1.0 - config.learning_rate * config.lambda;
    for (int i = 0; i < model.size(); ++i) {
      model.coef[i] = decay * model.coef[i] - config.learning_rate * grad[i];
    }
  }
  return model;
}

int predict(const ModelParams& model, const float* features) {
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.n_classes; ++k) {
    const double* w = model.row(k);
    double z = w[model.dim];
    for (int j = 0; j < model.dim; ++j) {
      z += w[j] * static_cast<double>(features[j]);
    }
    if (z > best_z) {
      best_z = z;
      best = k;
    }
  }
  return best;
}

}  // namespace sqfl::fed
