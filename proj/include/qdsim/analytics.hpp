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
#include <string>

#include "qdsim/channel.hpp"
#include "qdsim/modem.hpp"
#include "qdsim/types.hpp"

namespace qdsim {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
template <typename Scalar>
Scalar q_function(Scalar x) {
  return std::erfc(x / std::numbers::sqrt2_v<Scalar>) / Scalar(2);
}

/// Coherent BPSK over AWGN: Q(sqrt(2 gamma)) with gamma = Es/N0.
template <typename Scalar>
Scalar bpsk_ber_ideal(Scalar gamma) {
  if (!(gamma > Scalar(0)))
    throw std::invalid_argument("snr must be positive");
  return q_function(std::sqrt(Scalar(2) * gamma));
}

/// BPSK with a residual phase rotation the detector cannot compensate: the
/// decision statistic's mean shrinks by cos(dphi), so the BER is
/// Q(sqrt(2 gamma) cos(dphi)).  Valid while the rotation stays inside the
/// decision region, |dphi| < pi/2.
template <typename Scalar>
Scalar bpsk_ber_offset(Scalar gamma, Scalar delta_phi) {
  if (!(gamma > Scalar(0)))
    throw std::invalid_argument("snr must be positive");
  if (!(std::abs(delta_phi) < pi_v<Scalar> / Scalar(2)))
    throw std::invalid_argument(
        "phase offset must satisfy |dphi| < pi/2 (decision region flips)");
  return q_function(std::sqrt(Scalar(2) * gamma) * std::cos(delta_phi));
}

/// How the per-symbol antenna choice enters the analytic deviated BER.
enum class Averaging { worst_case_antenna, uniform_antenna };

inline const char* to_string(Averaging a) {
  return a == Averaging::worst_case_antenna ? "worst_case" : "uniform";
}

inline Averaging parse_averaging(const std::string& s) {
  if (s == "worst_case" || s == "worst_case_antenna") return Averaging::worst_case_antenna;
  if (s == "uniform" || s == "uniform_antenna") return Averaging::uniform_antenna;
  throw std::invalid_argument("unknown averaging mode '" + s +
                              "' (expected 'worst_case' or 'uniform')");
}

/// Closed-form BPSK BER under a deviated geometry.  worst_case pins every
/// symbol to the most rotated antenna; uniform averages over the antennas,
/// which uniform random bit pairs use equiprobably.
template <typename Scalar>
Scalar ber_deviated(Scalar gamma, Scalar theta, Branch branch,
                    const PskConstellation<Scalar>& constellation,
                    const ArrayGeometry<Scalar>& array, Averaging averaging) {
  if (constellation.order() != 2)
    throw ConfigError("analytic deviated BER is available for BPSK only");
  const Scalar lambda = array.wavelength();
  auto offset_at = [&](int q) {
    const Scalar x = array.position(q);
    return branch == Branch::parallel ? parallel_offset(x, theta, lambda)
                                      : perpendicular_offset(x, theta, lambda);
  };
  if (averaging == Averaging::worst_case_antenna) {
    Scalar worst = 0;
    for (int q = 0; q < array.size(); ++q)
      worst = std::max(worst, std::abs(offset_at(q)));
    return bpsk_ber_offset(gamma, worst);
  }
  Scalar acc = 0;
  for (int q = 0; q < array.size(); ++q)
    acc += bpsk_ber_offset(gamma, offset_at(q));
  return acc / Scalar(array.size());
}

/// One SNR-loss evaluation: how much extra SNR the deviated channel needs to
/// reach `target_ber` compared with the ideal one.
template <typename Scalar>
struct LossQuery {
  Scalar target_ber{};
  Branch branch = Branch::parallel;
  Scalar theta{};
  Averaging averaging = Averaging::worst_case_antenna;
};

namespace detail {

// Bisect a monotone-decreasing BER curve for the SNR (in dB) hitting
// `target`, over the fixed bracket [-10, 40] dB, to 1e-4 dB.
template <typename Scalar, typename BerFn>
Scalar solve_snr_db(BerFn&& ber_of_gamma, Scalar target) {
  Scalar lo = Scalar(-10), hi = Scalar(40);
  if (!(ber_of_gamma(db_to_linear(lo)) > target))
    throw std::runtime_error("target BER not bracketed: curve is already below "
                             "target at -10 dB");
  if (!(ber_of_gamma(db_to_linear(hi)) < target))
    throw std::runtime_error("target BER not bracketed: curve stays above "
                             "target up to +40 dB");
  while (hi - lo > Scalar(1e-4)) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (ber_of_gamma(db_to_linear(mid)) > target)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / Scalar(2);
}

}  // namespace detail

/// SNR loss in dB at the queried BER, from the closed forms, for the
/// canonical BPSK pair over the two-antenna array {0, lambda/2}.
template <typename Scalar>
Scalar snr_loss_at_ber(const LossQuery<Scalar>& query) {
  if (!(query.target_ber > Scalar(0) && query.target_ber < Scalar(0.5)))
    throw std::invalid_argument("target BER must lie in (0, 0.5)");
  if (!(query.theta >= Scalar(0) && query.theta <= pi_v<Scalar> / Scalar(4)))
    throw std::invalid_argument("deviation angle must lie in [0, pi/4]");
  const PskConstellation<Scalar> bpsk(2);
  const auto array = ArrayGeometry<Scalar>::uniform(2, Scalar(1));
  const Scalar ideal_db = detail::solve_snr_db<Scalar>(
      [](Scalar g) { return bpsk_ber_ideal(g); }, query.target_ber);
  const Scalar deviated_db = detail::solve_snr_db<Scalar>(
      [&](Scalar g) {
        return ber_deviated(g, query.theta, query.branch, bpsk, array,
                            query.averaging);
      },
      query.target_ber);
  return deviated_db - ideal_db;
}

}  // namespace qdsim
