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

#include <cmath>
#include <utility>

#include "qdsim/modem.hpp"
#include "qdsim/random.hpp"
#include "qdsim/types.hpp"

namespace qdsim {

/// Geometric AWGN channel toward one of the two receivers.  `deviation` is
/// the small angle between the receiver's line of sight and its ideal axis;
/// `snr` is Es/N0 as a linear ratio.
template <typename Scalar>
struct ChannelConfig {
  Branch branch = Branch::parallel;
  Complex<Scalar> gain{1, 0};
  Scalar initial_phase{0};
  Scalar deviation{0};
  Scalar snr{1};

  Scalar noise_density(Scalar symbol_energy = Scalar(1)) const {
    return symbol_energy / snr;
  }

  /// Genie receiver-side estimate h e^{j phi0}.  The pilot is defined to be
  /// sent from the antenna at x = 0, whose deviation offset vanishes, so the
  /// estimate is unbiased even under a deviated geometry.
  Complex<Scalar> pilot_estimate() const {
    return gain * std::polar(Scalar(1), initial_phase);
  }
};

template <typename Scalar>
void ensure_valid(const ChannelConfig<Scalar>& cfg) {
  if (cfg.gain == Complex<Scalar>{})
    throw std::invalid_argument("channel gain must be nonzero");
  if (!(cfg.deviation >= Scalar(0) && cfg.deviation <= pi_v<Scalar> / Scalar(4)))
    throw std::invalid_argument("deviation angle must lie in [0, pi/4]");
  if (!(cfg.snr > Scalar(0)))
    throw std::invalid_argument("snr must be positive");
}

namespace detail {

template <typename Scalar>
void check_offset_domain(Scalar x_q, Scalar theta, Scalar wavelength) {
  if (!(wavelength > Scalar(0)))
    throw std::invalid_argument("wavelength must be positive");
  if (!(x_q >= Scalar(0) && x_q < wavelength))
    throw std::invalid_argument("antenna position must lie in [0, wavelength)");
  if (!(theta >= Scalar(0) && theta <= pi_v<Scalar> / Scalar(4)))
    throw std::invalid_argument("deviation angle must lie in [0, pi/4]");
}

}  // namespace detail

/// Phase offset on the parallel branch when its line of sight deviates by
/// theta_x: 2pi x_q (cos(theta_x) - 1) / lambda.  Nonpositive everywhere.
template <typename Scalar>
Scalar parallel_offset(Scalar x_q, Scalar theta_x, Scalar wavelength) {
  detail::check_offset_domain(x_q, theta_x, wavelength);
  return two_pi_v<Scalar> * x_q * (std::cos(theta_x) - Scalar(1)) / wavelength;
}

/// Phase offset on the perpendicular branch under deviation theta_y:
/// 2pi x_q sin(theta_y) / lambda.
template <typename Scalar>
Scalar perpendicular_offset(Scalar x_q, Scalar theta_y, Scalar wavelength) {
  detail::check_offset_domain(x_q, theta_y, wavelength);
  return two_pi_v<Scalar> * x_q * std::sin(theta_y) / wavelength;
}

/// Small-angle bounds on the two offsets for x_q <= lambda/2:
/// |dphi_x| <= pi theta^2 / 2 and |dphi_y| <= pi theta.
template <typename Scalar>
std::pair<Scalar, Scalar> offset_bounds(Scalar theta) {
  if (!(theta >= Scalar(0) && theta <= pi_v<Scalar> / Scalar(4)))
    throw std::invalid_argument("deviation angle must lie in [0, pi/4]");
  return {pi_v<Scalar> * theta * theta / Scalar(2), pi_v<Scalar> * theta};
}

/// Offsets and their bounds for one antenna under both deviations.
template <typename Scalar>
struct DeviationOffsets {
  Scalar delta_phi_x{};
  Scalar delta_phi_y{};
  Scalar bound_x{};
  Scalar bound_y{};
};

template <typename Scalar>
DeviationOffsets<Scalar> deviation_offsets(Scalar x_q, Scalar theta_x, Scalar theta_y,
                                           Scalar wavelength) {
  return {parallel_offset(x_q, theta_x, wavelength),
          perpendicular_offset(x_q, theta_y, wavelength),
          offset_bounds(theta_x).first, offset_bounds(theta_y).second};
}

/// Received value on the parallel axis: h sqrt(E) e^{j(phi_x + dphi_x + phi0)} + n.
/// With deviation zero this is exactly the ideal h sqrt(E) e^{j phi_x} + n.
template <typename Scalar>
Complex<Scalar> transmit_parallel(const JointSymbol<Scalar>& symbol,
                                  const ChannelConfig<Scalar>& cfg,
                                  Complex<Scalar> noise_draw) {
  ensure_valid(cfg);
  if (cfg.branch != Branch::parallel)
    throw std::invalid_argument("channel config is not for the parallel branch");
  // Offsets depend only on x_q / lambda, so evaluate at unit wavelength.
  const Scalar x_norm = antenna_position(symbol.phi_q, Scalar(1));
  const Scalar offset = parallel_offset(x_norm, cfg.deviation, Scalar(1));
  return cfg.gain * std::polar(std::sqrt(symbol.energy),
                               symbol.phi_x + offset + cfg.initial_phase) +
         noise_draw;
}

/// Received value on the perpendicular axis:
/// h sqrt(E) e^{j(phi_y + dphi_y + phi0)} + n.  With deviation zero the
/// antenna choice leaves no trace here at all.
template <typename Scalar>
Complex<Scalar> transmit_perpendicular(const JointSymbol<Scalar>& symbol,
                                       const ChannelConfig<Scalar>& cfg,
                                       Complex<Scalar> noise_draw) {
  ensure_valid(cfg);
  if (cfg.branch != Branch::perpendicular)
    throw std::invalid_argument("channel config is not for the perpendicular branch");
  const Scalar x_norm = antenna_position(symbol.phi_q, Scalar(1));
  const Scalar offset = perpendicular_offset(x_norm, cfg.deviation, Scalar(1));
  return cfg.gain * std::polar(std::sqrt(symbol.energy),
                               symbol.phi_y + offset + cfg.initial_phase) +
         noise_draw;
}

/// Circularly symmetric complex Gaussian draw with variance N0/2 per
/// component.  N0 = 0 degenerates to exactly zero.
template <typename Scalar>
Complex<Scalar> awgn_sample(Scalar noise_density, CounterRng& rng) {
  if (!(noise_density >= Scalar(0)))
    throw std::invalid_argument("noise density must be nonnegative");
  if (noise_density == Scalar(0)) return {};
  const auto [g_re, g_im] = rng.gaussian_pair();
  const Scalar sigma = std::sqrt(noise_density / Scalar(2));
  return {sigma * Scalar(g_re), sigma * Scalar(g_im)};
}

}  // namespace qdsim
