// SPDX-License-Identifier: Apache-2.0
//
// qdsim - link-level simulator for quasi-Doppler two-direction phase modulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include "qdsim/types.hpp"

namespace qdsim {

namespace detail {

// Philox4x32-10 keyed counter permutation (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace detail

/// Counter-based random stream.  The draw sequence is a pure function of
/// (seed, stream, counter), so any trial of a simulation can be regenerated
/// in isolation and results do not depend on thread scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t counter)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        base_{0, static_cast<std::uint32_t>(counter),
              static_cast<std::uint32_t>(counter >> 32), stream} {}

  std::uint32_t next_u32() {
    if (lane_ == 4) refill();
    return buffer_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform draw in (0, 1] with 53-bit resolution; never zero, so it is
  /// safe under a logarithm.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Two independent standard normal draws (Box-Muller).
  std::pair<double, double> gaussian_pair() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = two_pi_v<double> * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  void refill() {
    buffer_ = detail::philox4x32(base_, key_);
    ++base_[0];  // block index within this (seed, stream, counter) cell
    lane_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;
  std::array<std::uint32_t, 4> buffer_{};
  int lane_ = 4;
};

}  // namespace qdsim
