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

#ifndef SQFL_PRIVACY_LEDGER_HPP
#define SQFL_PRIVACY_LEDGER_HPP

#include <string>
#include <vector>

namespace sqfl::dp {

/// Additive zCDP accountant. Each charge is a (label, rho) record;
/// composition across charges is plain addition of the rho parameters.
class PrivacyLedger {
 public:
  struct Entry {
    std::string label;
    double rho;
  };

  void add(std::string label, double rho);
  double rho_total() const { return rho_total_; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Standard zCDP -> (epsilon, delta)-DP conversion:
  /// epsilon = rho + 2 sqrt(rho log(1/delta)).
  double epsilon(double delta) const;

 private:
  std::vector<Entry> entries_;
  double rho_total_ = 0.0;
};

/// zCDP of one Gaussian-mechanism release with L2 sensitivity
/// `clip_norm` and noise scale `noise_sigma`: C^2 / (2 sigma_w^2).
double gaussian_update_rho(double clip_norm, double noise_sigma);

/// epsilon = rho + 2 sqrt(rho log(1/delta)) for a standalone rho.
double epsilon_from_rho(double rho, double delta);

/// Inverse of epsilon_from_rho: the largest rho whose conversion stays
/// within the (epsilon, delta) target. Closed form
/// rho = (sqrt(L + eps) - sqrt(L))^2 with L = log(1/delta).
double rho_for_epsilon_delta(double epsilon, double delta);

}  // namespace sqfl::dp

#endif  // SQFL_PRIVACY_LEDGER_HPP
