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

#ifndef SQFL_SECURE_SUM_HPP
#define SQFL_SECURE_SUM_HPP

#include <cstdint>
#include <vector>

namespace sqfl::dp {

/// Ring of integers modulo M. The modulus is capped at 2^63 so that
/// two reduced residues can be added in 64 bits without overflow.
struct ModRing {
  std::uint64_t modulus;
  void validate() const;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t reduce_signed(std::int64_t v) const;

  /// Maps a residue in [0, M) to its centered representative in
  /// (-M/2, M/2].
  std::int64_t centered(std::uint64_t v) const;
};

/// Simulation of the secure-summation oracle: returns the componentwise
/// sum mod M and nothing else. The contributions are passed by value
/// and destroyed here, mirroring the functionality contract that no
/// individual vector outlives the call.
std::vector<std::uint64_t> secure_sum(
    std::vector<std::vector<std::uint64_t>> contributions, ModRing ring);

}  // namespace sqfl::dp

#endif  // SQFL_SECURE_SUM_HPP
