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

#include "sqfl/dp_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sqfl/discrete_gaussian.hpp"

namespace sqfl::dp {

int BinEdges::levels() const {
  int b = bins();
  int l = 0;
  while (b > 1) {
    b >>= 1;
    ++l;
  }
  return l;
}

void BinEdges::validate() const {
  const int b = bins();
  if (b < 2 || (b & (b - 1)) != 0) {
    throw std::invalid_argument("bin count must be a power of two >= 2");
  }
  for (int i = 0; i < static_cast<int>(edges.size()) - 1; ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw std::invalid_argument("bin edges must be strictly increasing");
    }
  }
}

BinEdges BinEdges::uniform(double lo, double hi, int bins) {
  if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
  BinEdges e;
  e.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    e.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  e.edges[bins] = hi;
  e.validate();
  return e;
}

int BinEdges::bin_index(double loss) const {
  const int b = bins();
  if (loss < edges.front()) return 1;
  if (loss >= edges.back()) return b;
  // First edge strictly greater than the loss; bin j covers
  // [l_{j-1}, l_j).
  const auto it = std::upper_bound(edges.begin(), edges.end(), loss);
  int j = static_cast<int>(it - edges.begin());
  return std::clamp(j, 1, b);
}

HierHistogram::HierHistogram(BinEdges edges) : edges_(std::move(edges)) {
  edges_.validate();
  nodes_.assign(2 * static_cast<std::size_t>(bins()) - 2, 0.0);
}

int HierHistogram::flat_index(int level, int j) const {
  if (level < 0 || level >= levels()) {
    throw std::out_of_range("histogram level out of range");
  }
  if (j < 1 || j > nodes_at_level(level)) {
    throw std::out_of_range("histogram node index out of range");
  }
  // Level-major layout: level 0 occupies [0, b), level 1 [b, b + b/2), ...
  int offset = 0;
  for (int r = 0; r < level; ++r) offset += nodes_at_level(r);
  return offset + j - 1;
}

HierHistogram encode_client(double loss, const BinEdges& edges) {
  HierHistogram h(edges);
  const int leaf = edges.bin_index(loss);
  for (int r = 0; r < h.levels(); ++r) {
    const int j = ((leaf - 1) >> r) + 1;  // node covering the leaf at level r
    h.set_node(r, j, 1.0);
  }
  h.set_n_contributors(1);
  return h;
}

HierHistogram exact_histogram(const std::vector<double>& losses,
                              const BinEdges& edges) {
  HierHistogram h(edges);
  for (double loss : losses) {
    const int leaf = edges.bin_index(loss);
    for (int r = 0; r < h.levels(); ++r) {
      h.add_to_node(r, ((leaf - 1) >> r) + 1, 1.0);
    }
  }
  h.set_n_contributors(static_cast<int>(losses.size()));
  return h;
}

std::vector<std::pair<int, int>> dyadic_partition(int j, int b) {
  if (b < 2 || (b & (b - 1)) != 0) {
    throw std::invalid_argument("bin count must be a power of two >= 2");
  }
  if (j < 1 || j > b) {
    throw std::out_of_range("dyadic_partition: j out of [1, b]");
  }
  // Greedy largest-block-first tiling of [1, j]. Block sizes are capped
  // at b/2 because the root node is not part of the histogram.
  std::vector<std::pair<int, int>> nodes;
  int start = 1;
  while (start <= j) {
    int r = 0;
    while (r + 1 < 31 && (1 << (r + 1)) <= b / 2 &&
           (start - 1) % (1 << (r + 1)) == 0 && start + (1 << (r + 1)) - 1 <= j) {
      ++r;
    }
    nodes.emplace_back(r, (start - 1) / (1 << r) + 1);
    start += 1 << r;
  }
  return nodes;
}

double cumulative(const HierHistogram& hist, int j) {
  double total = 0.0;
  for (const auto& [r, o] : dyadic_partition(j, hist.bins())) {
    total += hist.node(r, o);
  }
  return total;
}

QuantileEstimate quantile_from_histogram(const HierHistogram& hist,
                                         double theta) {
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("tail threshold must lie in (0, 1]");
  }
  const double target = (1.0 - theta) * hist.n_contributors();
  int best_j = 1;
  double best_mass = cumulative(hist, 1);
  double best_gap = std::abs(best_mass - target);
  for (int j = 2; j <= hist.bins(); ++j) {
    const double mass = cumulative(hist, j);
    const double gap = std::abs(mass - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_j = j;
      best_mass = mass;
    }
  }
  return QuantileEstimate{hist.bin_edges().edges[best_j], best_j, best_mass};
}

double min_modulus(double sigma2, std::uint64_t scale, int n_clients, int bins,
                   double delta) {
  const double n = n_clients;
  return 2.0 + 2.0 * static_cast<double>(scale) * n +
         2.0 * n * std::sqrt(2.0 * sigma2 * std::log(16.0 * n * bins / delta));
}

HierHistogram dp_aggregate(const std::vector<HierHistogram>& clients,
                           const DpAggregateConfig& config, RngStream& rng) {
  if (clients.empty()) throw std::invalid_argument("dp_aggregate: no clients");
  if (config.scale < 1) throw std::invalid_argument("scale must be >= 1");
  if (config.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be >= 0");
  config.ring.validate();

  const BinEdges& edges = clients.front().bin_edges();
  const int node_count = clients.front().node_count();
  for (const auto& c : clients) {
    if (c.node_count() != node_count ||
        c.bin_edges().edges != edges.edges) {
      throw std::invalid_argument("dp_aggregate: mismatched histograms");
    }
  }
  const int n = static_cast<int>(clients.size());
  if (!config.allow_small_modulus &&
      static_cast<double>(config.ring.modulus) <
          min_modulus(config.sigma2, config.scale, n, edges.bins(),
                      config.delta)) {
    throw std::invalid_argument("modulus underspecified");
  }

  const DiscreteGaussianParams noise{config.sigma2};
  const auto c = static_cast<std::int64_t>(config.scale);

  std::vector<std::vector<std::uint64_t>> contributions;
  contributions.reserve(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    RngStream client_rng = rng.split(i);
    std::vector<std::uint64_t> enc(node_count);
    const std::vector<double>& raw = clients[i].flat();
    for (int k = 0; k < node_count; ++k) {
      const auto x = static_cast<std::int64_t>(std::llround(raw[k]));
      const std::int64_t xi =
          config.sigma2 > 0.0 ? sample_discrete_gaussian(noise, client_rng)
                              : 0;
      enc[k] = config.ring.reduce_signed(c * x + xi);
    }
    contributions.push_back(std::move(enc));
  }

  const std::vector<std::uint64_t> sum =
      secure_sum(std::move(contributions), config.ring);

  HierHistogram out(edges);
  int total = 0;
  for (const auto& cl : clients) total += cl.n_contributors();
  out.set_n_contributors(total);
  int k = 0;
  for (int r = 0; r < out.levels(); ++r) {
    for (int j = 1; j <= out.nodes_at_level(r); ++j, ++k) {
      out.set_node(r, j,
                   static_cast<double>(config.ring.centered(sum[k])) /
                       static_cast<double>(c));
    }
  }
  return out;
}

PrivacyBound privacy_epsilon(double sigma2, std::uint64_t scale, int n_clients,
                             int bins) {
  if (!(sigma2 >= 0.25)) {
    throw std::invalid_argument("theorem precondition violated: sigma < 1/2");
  }
  if (n_clients < 1 || scale < 1) {
    throw std::invalid_argument("privacy_epsilon: need n >= 1 and scale >= 1");
  }
  BinEdges::uniform(0.0, 1.0, bins);  // validates that bins is a power of two
  const double sigma = std::sqrt(sigma2);
  const double c = static_cast<double>(scale);
  const double n = n_clients;
  const double log2b = std::log2(static_cast<double>(bins));

  double psi = 0.0;
  for (int i = 1; i <= n_clients - 1; ++i) {
    psi += std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma2 * i /
                    (i + 1.0));
  }
  psi *= 10.0;

  const double first =
      std::sqrt(c * c * log2b * log2b / (n * sigma2) + psi * bins);
  const double second =
      c * log2b / (std::sqrt(n) * sigma) + psi * std::sqrt(2.0 * bins);
  const double eps = std::min(first, second);
  return PrivacyBound{eps, eps * eps / 2.0};
}

double utility_bound(double sigma2, std::uint64_t scale, int n_clients,
                     int bins, double delta) {
  const double c = static_cast<double>(scale);
  const double log2b = std::log2(static_cast<double>(bins));
  return std::sqrt(4.0 * sigma2 / (c * c * n_clients) * log2b *
                   std::log(4.0 * bins / delta));
}

double quantile_error(int estimated_index, const HierHistogram& exact,
                      double theta) {
  const double n = exact.n_contributors();
  return std::abs(cumulative(exact, estimated_index) / n - (1.0 - theta));
}

double best_quantile_error(const HierHistogram& exact, double theta) {
  double best = quantile_error(1, exact, theta);
  for (int j = 2; j <= exact.bins(); ++j) {
    best = std::min(best, quantile_error(j, exact, theta));
  }
  return best;
}

std::uint64_t scale_for_target(double zcdp_epsilon, int n_clients, int bins,
                               double sigma) {
  if (!(zcdp_epsilon > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("scale_for_target: need positive inputs");
  }
  const double log2b = std::log2(static_cast<double>(bins));
  const double c =
      std::round(zcdp_epsilon * std::sqrt(static_cast<double>(n_clients)) *
                 sigma / log2b);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

}  // namespace sqfl::dp
