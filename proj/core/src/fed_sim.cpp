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

#include "sqfl/fed_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "sqfl/risk.hpp"

namespace sqfl::fed {
namespace {

// Labels for deriving per-purpose RNG streams from (seed, round).
enum StreamLabel : std::uint64_t {
  kSampleStream = 1,
  kLocalStream = 2,
  kQuantileStream = 3,
  kServerNoiseStream = 4,
};

std::vector<int> sample_cohort(const FedState& state, int n, int m) {
  RngStream rng = RngStream(state.seed).split(state.round, kSampleStream);
  return rng.sample_without_replacement(n, m);
}

risk::LossVector cohort_losses(const std::vector<synth::ClientDataset>& clients,
                               const std::vector<int>& cohort,
                               const ModelParams& model, bool weighted) {
  risk::LossVector lv;
  lv.values.reserve(cohort.size());
  for (int id : cohort) {
    lv.values.push_back(client_loss(clients[id], model, 0.0));
  }
  if (weighted) {
    double total = 0.0;
    for (int id : cohort) total += clients[id].weight;
    lv.weights.reserve(cohort.size());
    for (int id : cohort) lv.weights.push_back(clients[id].weight / total);
  }
  return lv;
}

std::vector<ModelParams> run_local_updates(
    const FedState& state, const FedConfig& config,
    const std::vector<synth::ClientDataset>& clients,
    const std::vector<int>& cohort) {
  const LocalUpdateConfig lu{config.learning_rate_at(state.round),
                             config.lambda, config.local_steps,
                             config.batch_size};
  std::vector<ModelParams> updated;
  updated.reserve(cohort.size());
  for (int id : cohort) {
    RngStream rng = RngStream(state.seed)
                        .split(state.round, kLocalStream,
                               static_cast<std::uint64_t>(id));
    updated.push_back(local_update(clients[id], state.model, lu, rng));
  }
  return updated;
}

// Weighted average of the locally updated models; weights need not be
// normalized here. Summation runs in cohort (ascending client id) order
// so the result does not depend on execution order of the updates.
ModelParams aggregate(const std::vector<ModelParams>& models,
                      const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::logic_error("aggregate: zero total weight");
  ModelParams out = ModelParams::zeros(models.front().n_classes,
                                       models.front().dim);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double w = weights[i] / total;
    if (w == 0.0) continue;
    for (int k = 0; k < out.size(); ++k) {
      out.coef[k] += w * models[i].coef[k];
    }
  }
  return out;
}

// Number of tail clients kept by the exact rule: the ceil(theta m)
// largest losses (mass-based for the weighted objective).
std::vector<char> tail_mask(const risk::LossVector& losses, double theta,
                            bool weighted, double* threshold_out) {
  const int m = static_cast<int>(losses.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return losses.values[a] > losses.values[b];
  });
  double threshold;
  if (weighted) {
    double mass = 0.0;
    int cut = 0;
    while (cut < m && mass < theta - 1e-12) {
      mass += losses.weight(order[cut]);
      ++cut;
    }
    threshold = losses.values[order[std::max(0, cut - 1)]];
  } else {
    const int k = std::clamp(
        static_cast<int>(std::ceil(theta * m - 1e-12)), 1, m);
    threshold = losses.values[order[k - 1]];
  }
  std::vector<char> keep(m, 0);
  for (int i = 0; i < m; ++i) {
    keep[i] = losses.values[i] >= threshold ? 1 : 0;
  }
  *threshold_out = threshold;
  return keep;
}

void clip_to_norm(std::vector<double>& v, double bound) {
  if (!std::isfinite(bound)) return;
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > bound) {
    const double s = bound / norm;
    for (double& x : v) x *= s;
  }
}

struct BinEdgesWithRing {
  dp::BinEdges edges;
  dp::ModRing ring;
};

RoundRecord make_record(const FedState& state, const std::vector<int>& cohort,
                        const risk::LossVector& losses, double theta) {
  RoundRecord rec;
  rec.round = state.round;
  rec.selected_ids = cohort;
  rec.mean_train_loss = risk::superquantile(losses, risk::TailThreshold{1.0});
  rec.superquantile_train_loss =
      risk::superquantile(losses, risk::TailThreshold{theta});
  return rec;
}

}  // namespace

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "delta_fl") return Algorithm::kDeltaFl;
  if (name == "delta_fl_dual") return Algorithm::kDeltaFlDual;
  if (name == "delta_fl_smoothed") return Algorithm::kDeltaFlSmoothed;
  if (name == "delta_fl_dp") return Algorithm::kDeltaFlDp;
  if (name == "fedavg") return Algorithm::kFedAvg;
  if (name == "fedavg_sub") return Algorithm::kFedAvgSub;
  if (name == "tilted_erm") return Algorithm::kTiltedErm;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDeltaFl: return "delta_fl";
    case Algorithm::kDeltaFlDual: return "delta_fl_dual";
    case Algorithm::kDeltaFlSmoothed: return "delta_fl_smoothed";
    case Algorithm::kDeltaFlDp: return "delta_fl_dp";
    case Algorithm::kFedAvg: return "fedavg";
    case Algorithm::kFedAvgSub: return "fedavg_sub";
    case Algorithm::kTiltedErm: return "tilted_erm";
  }
  throw std::logic_error("unreachable");
}

void FedConfig::validate() const {
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("theta must lie in (0, 1]");
  }
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  if (clients_per_round < 1) {
    throw std::invalid_argument("clients_per_round must be >= 1");
  }
  if (local_steps < 1) throw std::invalid_argument("local_steps must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (!(lr_decay_factor > 0.0) || lr_decay_factor > 1.0) {
    throw std::invalid_argument("lr_decay_factor must lie in (0, 1]");
  }
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (algorithm == Algorithm::kDeltaFlSmoothed ||
      algorithm == Algorithm::kTiltedErm) {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
  }
  if (algorithm == Algorithm::kDeltaFlDp) {
    if (weighted) {
      throw std::invalid_argument(
          "DP mode counts clients, not mass: weighted not supported");
    }
    const double sq = quantile.sigma_q;
    if (sq != 0.0 && sq < 0.5) {
      throw std::invalid_argument(
          "quantile noise scale must be 0 (test mode) or >= 1/2");
    }
    if (noise_sigma_w > 0.0 && !std::isfinite(clip_norm)) {
      throw std::invalid_argument(
          "finite clip_norm required when noise_sigma_w > 0");
    }
    if (quantile.scale < 1) {
      throw std::invalid_argument("quantile scale must be >= 1");
    }
    if (!(quantile.loss_bound > 0.0)) {
      throw std::invalid_argument("loss_bound must be > 0");
    }
  }
}

double FedConfig::learning_rate_at(int round) const {
  if (lr_decay_period <= 0 || lr_decay_factor == 1.0) return learning_rate;
  const int k = round / lr_decay_period;
  return learning_rate * std::pow(lr_decay_factor, k);
}

FedState make_initial_state(const FedConfig& config, int n_classes, int dim) {
  config.validate();
  FedState state;
  state.model = ModelParams::zeros(n_classes, dim);
  state.seed = config.seed;
  return state;
}

void run_round_delta_fl(FedState& state, const FedConfig& config,
                        const std::vector<synth::ClientDataset>& clients,
                        RoundMode mode) {
  const int n = static_cast<int>(clients.size());
  const int m = config.clients_per_round;
  if (m > n) throw std::invalid_argument("cohort larger than client pool");

  const std::vector<int> cohort = sample_cohort(state, n, m);
  const risk::LossVector losses =
      cohort_losses(clients, cohort, state.model, config.weighted);
  RoundRecord rec = make_record(state, cohort, losses, config.theta);

  const std::vector<ModelParams> updated =
      run_local_updates(state, config, clients, cohort);

  if (mode == RoundMode::kDualWeights || mode == RoundMode::kSmoothed) {
    const risk::TailWeights pi =
        mode == RoundMode::kDualWeights
            ? risk::dual_weights(losses, risk::TailThreshold{config.theta})
            : risk::smoothed_weights(losses, risk::TailThreshold{config.theta},
                                     risk::SmoothingParam{config.nu});
    state.model = aggregate(updated, pi.pi);
    int support = 0;
    for (double p : pi.pi) support += p > 1e-12 ? 1 : 0;
    rec.cohort_after_filter = support;
    rec.quantile = risk::quantile(losses, risk::TailThreshold{config.theta});
  } else if (mode == RoundMode::kExactQuantile) {
    double threshold = 0.0;
    const std::vector<char> keep =
        tail_mask(losses, config.theta, config.weighted, &threshold);
    std::vector<double> agg_weights(m, 0.0);
    for (int i = 0; i < m; ++i) {
      if (keep[i]) {
        agg_weights[i] = config.weighted ? clients[cohort[i]].weight : 1.0;
      }
    }
    state.model = aggregate(updated, agg_weights);
    rec.quantile = threshold;
    rec.cohort_after_filter =
        static_cast<int>(std::count(keep.begin(), keep.end(), char{1}));
  } else {  // RoundMode::kDp
    const QuantileProtocolConfig& qp = config.quantile;
    const BinEdgesWithRing edges_ring = [&] {
      dp::BinEdges edges = dp::BinEdges::uniform(0.0, qp.loss_bound, qp.bins);
      std::uint64_t modulus = qp.modulus;
      if (modulus == 0) {
        const double need =
            dp::min_modulus(qp.sigma_q * qp.sigma_q, qp.scale, m, qp.bins,
                            qp.delta);
        modulus = 2;
        while (static_cast<double>(modulus) < need) modulus <<= 1;
      }
      return BinEdgesWithRing{std::move(edges), dp::ModRing{modulus}};
    }();

    std::vector<dp::HierHistogram> encoded;
    encoded.reserve(m);
    for (double f : losses.values) {
      encoded.push_back(dp::encode_client(f, edges_ring.edges));
    }
    RngStream qrng = RngStream(state.seed).split(state.round, kQuantileStream);
    dp::DpAggregateConfig agg_cfg{qp.sigma_q * qp.sigma_q, qp.scale,
                                  edges_ring.ring, qp.delta,
                                  /*allow_small_modulus=*/qp.modulus != 0};
    const dp::HierHistogram noisy = dp::dp_aggregate(encoded, agg_cfg, qrng);
    const dp::QuantileEstimate est =
        dp::quantile_from_histogram(noisy, config.theta);

    std::vector<double> agg_weights(m, 0.0);
    int kept = 0;
    for (int i = 0; i < m; ++i) {
      if (losses.values[i] >= est.value) {
        agg_weights[i] = 1.0;
        ++kept;
      }
    }
    if (kept == 0) {
      // DP quantile overshot every cohort loss; average the whole
      // cohort this round rather than stalling.
      std::fill(agg_weights.begin(), agg_weights.end(), 1.0);
      kept = m;
      rec.fallback_full_cohort = true;
    }

    std::vector<double> delta_sum(state.model.size(), 0.0);
    for (int i = 0; i < m; ++i) {
      if (agg_weights[i] == 0.0) continue;
      std::vector<double> delta(state.model.size());
      for (int k = 0; k < state.model.size(); ++k) {
        delta[k] = updated[i].coef[k] - state.model.coef[k];
      }
      clip_to_norm(delta, config.clip_norm);
      for (int k = 0; k < state.model.size(); ++k) delta_sum[k] += delta[k];
    }
    RngStream srng =
        RngStream(state.seed).split(state.round, kServerNoiseStream);
    for (int k = 0; k < state.model.size(); ++k) {
      const double noise =
          config.noise_sigma_w > 0.0
              ? config.noise_sigma_w * srng.next_gaussian()
              : 0.0;
      state.model.coef[k] += delta_sum[k] / kept + noise;
    }

    double rho_round = 0.0;
    if (qp.sigma_q > 0.0) {
      const double rho_q =
          dp::privacy_epsilon(qp.sigma_q * qp.sigma_q, qp.scale, m, qp.bins)
              .rho;
      state.ledger.add("quantile[" + std::to_string(state.round) + "]", rho_q);
      rho_round += rho_q;
    }
    if (config.noise_sigma_w > 0.0) {
      const double rho_w =
          dp::gaussian_update_rho(config.clip_norm, config.noise_sigma_w);
      state.ledger.add("update[" + std::to_string(state.round) + "]", rho_w);
      rho_round += rho_w;
    }
    rec.rho_spent = rho_round;
    rec.quantile = est.value;
    rec.cohort_after_filter = kept;
  }

  state.history.push_back(std::move(rec));
  ++state.round;
}

void run_round_fedavg(FedState& state, const FedConfig& config,
                      const std::vector<synth::ClientDataset>& clients,
                      double subsample_fraction) {
  const int n = static_cast<int>(clients.size());
  const int m = std::clamp(
      static_cast<int>(std::lround(config.clients_per_round *
                                   subsample_fraction)),
      1, n);
  const std::vector<int> cohort = sample_cohort(state, n, m);
  const risk::LossVector losses =
      cohort_losses(clients, cohort, state.model, config.weighted);
  RoundRecord rec = make_record(state, cohort, losses, config.theta);

  const std::vector<ModelParams> updated =
      run_local_updates(state, config, clients, cohort);
  std::vector<double> agg_weights(m);
  for (int i = 0; i < m; ++i) agg_weights[i] = clients[cohort[i]].weight;
  state.model = aggregate(updated, agg_weights);
  rec.cohort_after_filter = m;

  state.history.push_back(std::move(rec));
  ++state.round;
}

void run_round_tilted(FedState& state, const FedConfig& config,
                      const std::vector<synth::ClientDataset>& clients,
                      double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("tilt nu must be > 0");
  const int n = static_cast<int>(clients.size());
  const int m = config.clients_per_round;
  const std::vector<int> cohort = sample_cohort(state, n, std::min(m, n));
  const risk::LossVector losses =
      cohort_losses(clients, cohort, state.model, false);
  RoundRecord rec = make_record(state, cohort, losses, config.theta);

  const std::vector<ModelParams> updated =
      run_local_updates(state, config, clients, cohort);

  // softmax(nu * F_i) over the cohort, log-sum-exp stabilized.
  const double f_max =
      *std::max_element(losses.values.begin(), losses.values.end());
  std::vector<double> agg_weights(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    agg_weights[i] = std::exp(nu * (losses.values[i] - f_max));
  }
  state.model = aggregate(updated, agg_weights);
  rec.cohort_after_filter = static_cast<int>(cohort.size());

  state.history.push_back(std::move(rec));
  ++state.round;
}

FedState train(const FedConfig& config,
               const std::vector<synth::ClientDataset>& clients,
               int n_classes) {
  config.validate();
  if (clients.empty()) throw std::invalid_argument("no clients");
  FedState state = make_initial_state(config, n_classes, clients.front().dim);
  for (int t = 0; t < config.rounds; ++t) {
    switch (config.algorithm) {
      case Algorithm::kDeltaFl:
        run_round_delta_fl(state, config, clients, RoundMode::kExactQuantile);
        break;
      case Algorithm::kDeltaFlDual:
        run_round_delta_fl(state, config, clients, RoundMode::kDualWeights);
        break;
      case Algorithm::kDeltaFlSmoothed:
        run_round_delta_fl(state, config, clients, RoundMode::kSmoothed);
        break;
      case Algorithm::kDeltaFlDp:
        run_round_delta_fl(state, config, clients, RoundMode::kDp);
        break;
      case Algorithm::kFedAvg:
        run_round_fedavg(state, config, clients, 1.0);
        break;
      case Algorithm::kFedAvgSub:
        run_round_fedavg(state, config, clients, config.theta);
        break;
      case Algorithm::kTiltedErm:
        run_round_tilted(state, config, clients, config.nu);
        break;
    }
  }
  return state;
}

std::string history_to_jsonl(const FedState& state) {
  std::string out;
  for (const RoundRecord& rec : state.history) {
    nlohmann::json j{{"round", rec.round},
                     {"selected_ids", rec.selected_ids},
                     {"quantile", rec.quantile},
                     {"cohort_after_filter", rec.cohort_after_filter},
                     {"mean_train_loss", rec.mean_train_loss},
                     {"superquantile_train_loss", rec.superquantile_train_loss},
                     {"rho_spent", rec.rho_spent}};
    if (rec.fallback_full_cohort) j["fallback_full_cohort"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sqfl::fed
