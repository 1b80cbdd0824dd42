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

#ifndef SQFL_RNG_HPP
#define SQFL_RNG_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace sqfl {

/// Counter-based pseudo-random stream (SplitMix-style mixing of a
/// 64-bit key and a running counter).
///
/// Streams are cheap to copy and to derive: `split(label)` yields a
/// stream statistically independent of the parent, so every client,
/// round, and noise source of a simulation can own its own stream and
/// produce the same values regardless of execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Derives an independent child stream. Distinct labels give distinct
  /// streams; the parent is not advanced.
  RngStream split(std::uint64_t label) const;
  RngStream split(std::uint64_t a, std::uint64_t b) const;
  RngStream split(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  /// Standard normal via the Marsaglia polar method.
  double next_gaussian();

  /// Uniform integer in [0, bound); unbiased (rejection). bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  bool next_bool() { return (next_u64() >> 63) != 0; }

  /// Samples k distinct indices from [0, n) uniformly without
  /// replacement, returned in ascending order.
  std::vector<int> sample_without_replacement(int n, int k);

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

}  // namespace sqfl

#endif  // SQFL_RNG_HPP
