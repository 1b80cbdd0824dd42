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

#include "sqfl/secure_sum.hpp"

#include <stdexcept>

namespace sqfl::dp {

void ModRing::validate() const {
  if (modulus < 2) throw std::invalid_argument("ring modulus must be >= 2");
  if (modulus > (std::uint64_t{1} << 63)) {
    throw std::invalid_argument("ring modulus must be <= 2^63");
  }
}

std::uint64_t ModRing::add(std::uint64_t a, std::uint64_t b) const {
  const std::uint64_t s = a + b;  // a, b < M <= 2^63: no overflow
  return s >= modulus ? s - modulus : s;
}

std::uint64_t ModRing::reduce_signed(std::int64_t v) const {
  const auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = v % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

std::int64_t ModRing::centered(std::uint64_t v) const {
  if (v <= modulus / 2) return static_cast<std::int64_t>(v);
  return static_cast<std::int64_t>(v) - static_cast<std::int64_t>(modulus);
}

std::vector<std::uint64_t> secure_sum(
    std::vector<std::vector<std::uint64_t>> contributions, ModRing ring) {
  ring.validate();
  if (contributions.empty()) {
    throw std::invalid_argument("secure_sum: no contributions");
  }
  const std::size_t dim = contributions.front().size();
  std::vector<std::uint64_t> total(dim, 0);
  for (auto& v : contributions) {
    if (v.size() != dim) {
      throw std::invalid_argument("secure_sum: contribution length mismatch");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (v[i] >= ring.modulus) {
        throw std::invalid_argument("secure_sum: entry not reduced mod M");
      }
      total[i] = ring.add(total[i], v[i]);
    }
    v.clear();
    v.shrink_to_fit();
  }
  return total;
}

}  // namespace sqfl::dp
