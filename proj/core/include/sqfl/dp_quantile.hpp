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

#ifndef SQFL_DP_QUANTILE_HPP
#define SQFL_DP_QUANTILE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "sqfl/rng.hpp"
#include "sqfl/secure_sum.hpp"

namespace sqfl::dp {

/// Bin edges l_0 < l_1 < ... < l_b with b a power of two. Bin j
/// (1-based) covers the half-open interval [l_{j-1}, l_j); values at or
/// above l_b are clipped into the last bin.
struct BinEdges {
  std::vector<double> edges;

  int bins() const { return static_cast<int>(edges.size()) - 1; }
  int levels() const;  // log2(bins)
  double lower() const { return edges.front(); }
  double upper() const { return edges.back(); }
  void validate() const;

  static BinEdges uniform(double lo, double hi, int bins);

  /// 1-based bin index of a loss value, with clipping at both ends.
  int bin_index(double loss) const;
};

/// Binary tree of bin-range counts: level r in [0, log2(b) - 1] holds
/// b / 2^r nodes and node (r, j), j 1-based, covers bins
/// (j-1) * 2^r + 1 ... j * 2^r. The root (count = number of
/// contributors, publicly known) is omitted, so there are 2b - 2 nodes.
/// Exact trees have nonnegative integer counts with parent = sum of
/// children; noisy trees may violate both.
class HierHistogram {
 public:
  explicit HierHistogram(BinEdges edges);

  double node(int level, int j) const { return nodes_[flat_index(level, j)]; }
  void set_node(int level, int j, double v) { nodes_[flat_index(level, j)] = v; }
  void add_to_node(int level, int j, double v) {
    nodes_[flat_index(level, j)] += v;
  }

  const BinEdges& bin_edges() const { return edges_; }
  int bins() const { return edges_.bins(); }
  int levels() const { return edges_.levels(); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int nodes_at_level(int level) const { return bins() >> level; }

  int n_contributors() const { return n_contributors_; }
  void set_n_contributors(int n) { n_contributors_ = n; }

  const std::vector<double>& flat() const { return nodes_; }

 private:
  int flat_index(int level, int j) const;

  BinEdges edges_;
  std::vector<double> nodes_;  // level-major, 2b - 2 entries
  int n_contributors_ = 0;
};

/// One client's contribution: a histogram with exactly one count of 1
/// per level (log2 b nonzeros, squared L2 norm log2 b). The loss is
/// clipped into [l_0, l_b).
HierHistogram encode_client(double loss, const BinEdges& edges);

/// Exact (noiseless) aggregate of many losses; test and diagnostics
/// helper for the simulation.
HierHistogram exact_histogram(const std::vector<double>& losses,
                              const BinEdges& edges);

/// Maximal dyadic partition of the bin range [1, j]: at most log2(b)
/// (level, index) nodes whose covered ranges tile [1, j], built greedily
/// largest block first.
std::vector<std::pair<int, int>> dyadic_partition(int j, int b);

/// Cumulative count H(j) = sum of the partition nodes' counts. Equals
/// the prefix sum of leaf counts on exact trees.
double cumulative(const HierHistogram& hist, int j);

struct QuantileEstimate {
  double value;         // the bin edge l_{index}
  int index;            // j* in [1, b]
  double achieved_mass; // H(j*)
};

/// Index j* minimizing |H(j) - (1 - theta) m| over j in [1, b], ties
/// broken toward smaller j; returns the bin edge l_{j*}.
QuantileEstimate quantile_from_histogram(const HierHistogram& hist,
                                         double theta);

struct DpAggregateConfig {
  double sigma2;        // per-node discrete Gaussian variance proxy
  std::uint64_t scale;  // integer scaling factor c >= 1
  ModRing ring;
  double delta = 1e-5;  // failure probability used by the modulus check
  // Benchmarks probing wraparound set this; the default rejects
  // configurations where the modulus bound of the privacy theorem
  // fails.
  bool allow_small_modulus = false;
};

/// Smallest modulus for which the no-wraparound bound holds:
/// 2 + 2 c n + 2 n sqrt(2 sigma^2 log(16 n b / delta)).
double min_modulus(double sigma2, std::uint64_t scale, int n_clients, int bins,
                   double delta);

/// Distributed-DP aggregation: each client adds fresh discrete Gaussian
/// noise to its scaled one-hot tree, reduces mod M, the secure sum is
/// taken over clients, and the result is decoded to the centered
/// representative and divided by c. Entries of the output may be
/// negative or fractional. sigma2 == 0 is a test-only noiseless mode.
HierHistogram dp_aggregate(const std::vector<HierHistogram>& clients,
                           const DpAggregateConfig& config, RngStream& rng);

struct PrivacyBound {
  double epsilon;  // Gaussian-mechanism epsilon; the protocol is
                   // (1/2) epsilon^2-zCDP
  double rho;      // epsilon^2 / 2, ready for the ledger
};

/// Concentrated-DP parameter of the aggregation protocol:
/// epsilon = min{ sqrt(c^2 log2(b)^2 / (n sigma^2) + psi b),
///                c log2(b) / (sqrt(n) sigma) + psi sqrt(2 b) },
/// psi = 10 sum_{i=1}^{n-1} exp(-2 pi^2 sigma^2 i / (i + 1)).
/// Requires sigma >= 1/2.
PrivacyBound privacy_epsilon(double sigma2, std::uint64_t scale, int n_clients,
                             int bins);

/// Additive quantile-error term of the utility bound:
/// sqrt((4 sigma^2 / (c^2 n)) log2(b) log(4 b / delta)).
double utility_bound(double sigma2, std::uint64_t scale, int n_clients,
                     int bins, double delta);

/// R_theta(H, j) = |H(j)/n - (1 - theta)| against an exact histogram;
/// simulation-only diagnostic.
double quantile_error(int estimated_index, const HierHistogram& exact,
                      double theta);

/// min_j R_theta(H, j): the best error any index could achieve.
double best_quantile_error(const HierHistogram& exact, double theta);

/// Integer scale c = max(1, round(eps sqrt(n) sigma / log2 b)), from
/// matching the dominant privacy term c log2(b) / (sqrt(n) sigma) to a
/// target Gaussian-mechanism epsilon.
std::uint64_t scale_for_target(double zcdp_epsilon, int n_clients, int bins,
                               double sigma);

}  // namespace sqfl::dp

#endif  // SQFL_DP_QUANTILE_HPP
