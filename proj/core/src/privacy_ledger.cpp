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

#include "sqfl/privacy_ledger.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sqfl::dp {

void PrivacyLedger::add(std::string label, double rho) {
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("privacy ledger: rho must be >= 0");
  }
  entries_.push_back(Entry{std::move(label), rho});
  rho_total_ += rho;
}

double PrivacyLedger::epsilon(double delta) const {
  return epsilon_from_rho(rho_total_, delta);
}

double gaussian_update_rho(double clip_norm, double noise_sigma) {
  if (!(clip_norm > 0.0) || !(noise_sigma > 0.0)) {
    throw std::invalid_argument(
        "gaussian_update_rho: clip norm and noise scale must be > 0");
  }
  return clip_norm * clip_norm / (2.0 * noise_sigma * noise_sigma);
}

double epsilon_from_rho(double rho, double delta) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

double rho_for_epsilon_delta(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const double l = std::log(1.0 / delta);
  const double root = std::sqrt(l + epsilon) - std::sqrt(l);
  return root * root;
}

}  // namespace sqfl::dp
