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

#ifndef SQFL_DATA_SYNTH_HPP
#define SQFL_DATA_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sqfl/rng.hpp"

namespace sqfl::synth {

/// Configuration of the synthetic label-shift classification dataset.
/// Class-conditional feature distributions N(mu_k, I) are shared by all
/// clients; only the per-client label distribution differs, drawn from
/// Dir(alpha) with a separate alpha for training and evaluation splits.
struct SynthConfig {
  int n_classes = 10;
  int input_dim = 20;
  int n_informative = 15;
  int n_redundant = 2;
  double class_sep = 5.0;
  int n_train_clients = 2500;
  int n_val_clients = 500;
  int n_test_clients = 500;
  int samples_per_client = 100;
  double dirichlet_alpha_train = 0.5;
  double dirichlet_alpha_eval = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One simulated client's local data.
struct ClientDataset {
  int client_id = 0;
  int n_samples = 0;
  int dim = 0;
  std::vector<float> features;       // n_samples x dim, row-major
  std::vector<std::int32_t> labels;  // in [0, n_classes)
  double weight = 0.0;               // alpha_i, proportional to n_samples

  void validate(int n_classes) const;
};

struct FederatedDataset {
  SynthConfig config;
  std::vector<ClientDataset> train;
  std::vector<ClientDataset> val;
  std::vector<ClientDataset> test;
};

/// Generates the full federated dataset. Deterministic in (config,
/// stream): the same seed yields a bitwise-identical dataset.
FederatedDataset generate(const SynthConfig& config, RngStream& rng);

/// Directory layout: meta.json plus clients/<split>/<id>.feat
/// (float32 little-endian, row-major) and clients/<split>/<id>.lab
/// (int32 little-endian).
void save(const FederatedDataset& dataset, const std::filesystem::path& dir);
FederatedDataset load(const std::filesystem::path& dir);

/// Dirichlet(alpha * 1_K) draw (exposed for tests).
std::vector<double> sample_dirichlet(int k, double alpha, RngStream& rng);

}  // namespace sqfl::synth

#endif  // SQFL_DATA_SYNTH_HPP
