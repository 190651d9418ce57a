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

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qdsim {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Column vector of complex baseband samples.
template <typename Scalar>
using SampleVector = Eigen::Array<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Bit pattern of one modulated symbol, LSB-first, length log2(M).
using BitWord = std::uint32_t;

template <typename Scalar>
inline constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

template <typename Scalar>
inline constexpr Scalar two_pi_v = Scalar(2) * std::numbers::pi_v<Scalar>;

template <typename Scalar>
inline constexpr Scalar half_pi_v = std::numbers::pi_v<Scalar> / Scalar(2);

/// Receiver axis relative to the antenna array: the parallel branch looks
/// along the array axis (sees the antenna phase), the perpendicular branch
/// looks along the orthogonal axis (does not).
enum class Branch { parallel, perpendicular };

inline const char* to_string(Branch b) {
  return b == Branch::parallel ? "parallel" : "perpendicular";
}

inline Branch parse_branch(const std::string& s) {
  if (s == "parallel") return Branch::parallel;
  if (s == "perpendicular") return Branch::perpendicular;
  throw std::invalid_argument("unknown branch '" + s +
                              "' (expected 'parallel' or 'perpendicular')");
}

/// Mismatch between configured pieces (constellation vs. array, bad config
/// file, ...) as opposed to a bad argument to a single call.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reduce an angle to [0, 2*pi).
template <typename Scalar>
Scalar wrap_two_pi(Scalar angle) {
  Scalar r = std::fmod(angle, two_pi_v<Scalar>);
  if (r < Scalar(0)) r += two_pi_v<Scalar>;
  if (r >= two_pi_v<Scalar>) r = Scalar(0);
  return r;
}

/// Reduce an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_pm_pi(Scalar angle) {
  Scalar r = std::fmod(angle, two_pi_v<Scalar>);
  if (r > pi_v<Scalar>) r -= two_pi_v<Scalar>;
  if (r <= -pi_v<Scalar>) r += two_pi_v<Scalar>;
  return r;
}

template <typename Scalar>
Scalar db_to_linear(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
Scalar linear_to_db(Scalar lin) {
  return Scalar(10) * std::log10(lin);
}

}  // namespace qdsim
