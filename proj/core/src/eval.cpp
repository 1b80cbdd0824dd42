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

#include "sqfl/eval.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sqfl/risk.hpp"

namespace sqfl::eval {

ErrorDistribution evaluate(const fed::ModelParams& model,
                           const std::vector<synth::ClientDataset>& clients,
                           std::string split) {
  ErrorDistribution dist;
  dist.split = std::move(split);
  dist.per_client_error.reserve(clients.size());
  dist.client_ids.reserve(clients.size());
  for (const auto& client : clients) {
    if (client.n_samples == 0) throw std::invalid_argument("empty client");
    int correct = 0;
    for (int s = 0; s < client.n_samples; ++s) {
      const float* x =
          &client.features[static_cast<std::size_t>(s) * client.dim];
      if (fed::predict(model, x) == client.labels[s]) ++correct;
    }
    dist.per_client_error.push_back(
        100.0 * (1.0 - static_cast<double>(correct) / client.n_samples));
    dist.client_ids.push_back(client.client_id);
  }
  return dist;
}

SummaryStats summarize(const ErrorDistribution& dist) {
  if (dist.per_client_error.empty()) {
    throw std::invalid_argument("empty error distribution");
  }
  risk::LossVector lv;
  lv.values = dist.per_client_error;

  SummaryStats s;
  s.n_clients = static_cast<int>(lv.values.size());
  double mean = 0.0;
  for (double e : lv.values) mean += e;
  mean /= s.n_clients;
  double var = 0.0;
  for (double e : lv.values) var += (e - mean) * (e - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var / s.n_clients);
  // Percentile tau = atom-based quantile at tail threshold 1 - tau/100.
  s.p10 = risk::quantile(lv, risk::TailThreshold{0.90});
  s.p50 = risk::quantile(lv, risk::TailThreshold{0.50});
  s.p90 = risk::quantile(lv, risk::TailThreshold{0.10});
  s.p95 = risk::quantile(lv, risk::TailThreshold{0.05});
  s.superquantile90 = risk::superquantile(lv, risk::TailThreshold{0.10});
  s.superquantile95 = risk::superquantile(lv, risk::TailThreshold{0.05});
  return s;
}

std::string to_json(const SummaryStats& stats) {
  nlohmann::json j{{"n_clients", stats.n_clients},
                   {"mean", stats.mean},
                   {"stddev", stats.stddev},
                   {"p10", stats.p10},
                   {"p50", stats.p50},
                   {"p90", stats.p90},
                   {"p95", stats.p95},
                   {"superquantile90", stats.superquantile90},
                   {"superquantile95", stats.superquantile95}};
  return j.dump(2);
}

std::string to_csv(const ErrorDistribution& dist) {
  std::ostringstream out;
  out << "client_id,split,error_percent\n";
  for (std::size_t i = 0; i < dist.per_client_error.size(); ++i) {
    out << dist.client_ids[i] << ',' << dist.split << ','
        << dist.per_client_error[i] << '\n';
  }
  return out.str();
}

}  // namespace sqfl::eval
