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

#ifndef SQFL_FED_SIM_HPP
#define SQFL_FED_SIM_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sqfl/data_synth.hpp"
#include "sqfl/dp_quantile.hpp"
#include "sqfl/logistic.hpp"
#include "sqfl/privacy_ledger.hpp"
#include "sqfl/rng.hpp"

namespace sqfl::fed {

enum class Algorithm {
  kDeltaFl,          // exact-quantile client filtering
  kDeltaFlDual,      // capped-simplex dual reweighting
  kDeltaFlSmoothed,  // entropic-smoothed reweighting
  kDeltaFlDp,        // end-to-end DP: private quantile + clipped noisy updates
  kFedAvg,
  kFedAvgSub,        // FedAvg with a theta-scaled cohort
  kTiltedErm,        // softmax (entropic-risk) reweighting
};

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm a);

/// How a Delta-FL round turns cohort losses into aggregation weights.
enum class RoundMode { kExactQuantile, kDualWeights, kSmoothed, kDp };

/// Parameters of the distributed-DP quantile protocol inside a round.
struct QuantileProtocolConfig {
  int bins = 64;
  double loss_bound = 1.5;   // losses clipped into [0, loss_bound)
  double sigma_q = 1.0;      // discrete Gaussian scale (>= 1/2 in production)
  std::uint64_t scale = 1;   // integer scaling factor c
  std::uint64_t modulus = 0; // 0: derive the smallest admissible power of two
  double delta = 1e-5;
};

struct FedConfig {
  Algorithm algorithm = Algorithm::kFedAvg;
  double theta = 1.0;
  double nu = 0.0;       // smoothing (Delta-FL smoothed) or tilt (Tilted-ERM)
  double lambda = 0.0;   // L2 regularization
  int rounds = 100;
  int clients_per_round = 10;
  int local_steps = 1;
  int batch_size = 0;    // <= 0: full local gradients
  double learning_rate = 0.1;
  double lr_decay_factor = 1.0;  // step decay gamma_t = gamma0 * c^-floor(t/t0)
  int lr_decay_period = 0;       // 0 disables decay
  double clip_norm = std::numeric_limits<double>::infinity();
  double noise_sigma_w = 0.0;
  QuantileProtocolConfig quantile;
  bool weighted = false;  // alpha_i-weighted objective (non-DP modes)
  std::uint64_t seed = 0;

  void validate() const;
  double learning_rate_at(int round) const;
};

struct RoundRecord {
  int round = 0;
  std::vector<int> selected_ids;
  double quantile = 0.0;        // threshold Q used this round (0 if none)
  int cohort_after_filter = 0;  // |S_theta|
  double mean_train_loss = 0.0;
  double superquantile_train_loss = 0.0;
  double rho_spent = 0.0;
  bool fallback_full_cohort = false;
};

struct FedState {
  ModelParams model;
  int round = 0;
  dp::PrivacyLedger ledger;
  std::vector<RoundRecord> history;
  std::uint64_t seed = 0;
};

FedState make_initial_state(const FedConfig& config, int n_classes, int dim);

/// One Delta-FL round: sample the cohort, compute per-client losses at
/// the current model, derive a threshold or dual weights, run local
/// updates, and aggregate. In DP mode the quantile comes from the
/// distributed protocol, updates are clipped and noised, and the ledger
/// is charged.
void run_round_delta_fl(FedState& state, const FedConfig& config,
                        const std::vector<synth::ClientDataset>& clients,
                        RoundMode mode);

/// One FedAvg round over a cohort of `clients_per_round *
/// subsample_fraction` clients, alpha-weighted aggregation.
void run_round_fedavg(FedState& state, const FedConfig& config,
                      const std::vector<synth::ClientDataset>& clients,
                      double subsample_fraction = 1.0);

/// One Tilted-ERM round: aggregation weights softmax(nu * F_i) over the
/// cohort.
void run_round_tilted(FedState& state, const FedConfig& config,
                      const std::vector<synth::ClientDataset>& clients,
                      double nu);

/// Runs `config.rounds` rounds of the configured algorithm.
/// Deterministic given config.seed.
FedState train(const FedConfig& config,
               const std::vector<synth::ClientDataset>& clients,
               int n_classes);

/// JSON-lines serialization of the per-round history.
std::string history_to_jsonl(const FedState& state);

}  // namespace sqfl::fed

#endif  // SQFL_FED_SIM_HPP
