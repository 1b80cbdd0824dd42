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

#include "sqfl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqfl {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitDomain = 0xD1B54A32D192ED03ULL;

// Stafford mix13 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed ^ kGolden)) {}

RngStream RngStream::split(std::uint64_t label) const {
  RngStream child(0);
  child.key_ = mix64(key_ ^ mix64(label * kGolden + kSplitDomain));
  child.counter_ = 0;
  child.has_spare_gaussian_ = false;
  return child;
}

RngStream RngStream::split(std::uint64_t a, std::uint64_t b) const {
  return split(a).split(b);
}

RngStream RngStream::split(std::uint64_t a, std::uint64_t b,
                           std::uint64_t c) const {
  return split(a).split(b).split(c);
}

std::uint64_t RngStream::next_u64() {
  return mix64(key_ + (++counter_) * kGolden);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_spare_gaussian_) {
    has_spare_gaussian_ = false;
    return spare_gaussian_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_gaussian_ = v * scale;
  has_spare_gaussian_ = true;
  return u * scale;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

std::vector<int> RngStream::sample_without_replacement(int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
  }
  // Partial Fisher-Yates over an index table.
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sqfl
