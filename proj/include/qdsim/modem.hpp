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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "qdsim/types.hpp"

namespace qdsim {

/// Antenna phase selected to steer the symbol phase seen on the parallel
/// axis: the amount the source phase must be advanced so that phi_y plus
/// the antenna contribution comes out as phi_x.  Inputs are reduced to
/// [0, 2*pi) first; the result lies in [0, 2*pi).
template <typename Scalar>
Scalar qd_phase(Scalar phi_x, Scalar phi_y) {
  phi_x = wrap_two_pi(phi_x);
  phi_y = wrap_two_pi(phi_y);
  const Scalar q = phi_x >= phi_y ? phi_x - phi_y : phi_x + two_pi_v<Scalar> - phi_y;
  return wrap_two_pi(q);
}

/// Antenna position carrying a given steering phase: x = phi * lambda / 2pi.
/// The phase is reduced to [0, 2*pi) first, so the result lies in [0, lambda).
template <typename Scalar>
Scalar antenna_position(Scalar phi_q, Scalar wavelength) {
  if (!(wavelength > Scalar(0)))
    throw std::invalid_argument("wavelength must be positive");
  Scalar x = wrap_two_pi(phi_q) * wavelength / two_pi_v<Scalar>;
  if (x >= wavelength) x = std::nextafter(wavelength, Scalar(0));
  return x;
}

/// Steering phase of an antenna at position x in [0, lambda): phi = 2pi x / lambda.
template <typename Scalar>
Scalar qd_phase_of_position(Scalar x, Scalar wavelength) {
  if (!(wavelength > Scalar(0)))
    throw std::invalid_argument("wavelength must be positive");
  if (!(x >= Scalar(0) && x < wavelength))
    throw std::invalid_argument("antenna position must lie in [0, wavelength)");
  return two_pi_v<Scalar> * x / wavelength;
}

/// M-ary PSK phase alphabet with Gray bit labels.  Phases are 2pi m / M,
/// label 0 sits at phase 0, adjacent phases differ in exactly one bit.
template <typename Scalar>
class PskConstellation {
 public:
  explicit PskConstellation(int order) : order_(order) {
    if (order < 2 || order > (1 << 20) || !std::has_single_bit(unsigned(order)))
      throw std::invalid_argument("PSK order must be a power of two >= 2");
    phases_.resize(order);
    labels_.resize(order);
    index_of_label_.resize(order);
    for (int m = 0; m < order; ++m) {
      phases_(m) = two_pi_v<Scalar> * Scalar(m) / Scalar(order);
      const BitWord gray = BitWord(m) ^ (BitWord(m) >> 1);
      labels_[m] = gray;
      index_of_label_[gray] = m;
    }
  }

  static PskConstellation bpsk() { return PskConstellation(2); }

  int order() const { return order_; }
  int bits_per_symbol() const { return std::countr_zero(unsigned(order_)); }

  const RealVector<Scalar>& phases() const { return phases_; }
  Scalar phase_at(int index) const { return phases_(index); }
  BitWord label_at(int index) const { return labels_[index]; }

  Scalar phase_of_label(BitWord label) const {
    if (label >= BitWord(order_))
      throw std::invalid_argument("bit label out of range for this constellation");
    return phases_(index_of_label_[label]);
  }

  /// Constellation point sqrt(E) * e^{j phi(label)}.
  Complex<Scalar> point_of_label(BitWord label, Scalar energy = Scalar(1)) const {
    return std::polar(std::sqrt(energy), phase_of_label(label));
  }

 private:
  int order_;
  RealVector<Scalar> phases_;
  std::vector<BitWord> labels_;
  std::vector<int> index_of_label_;
};

/// Transmit antenna positions inside one wavelength, sorted, first at the
/// origin.  Positions realize the steering-phase alphabet: x_q = phi_q * lambda / 2pi.
template <typename Scalar>
class ArrayGeometry {
 public:
  static ArrayGeometry from_positions(Scalar wavelength, std::vector<Scalar> positions) {
    if (!(wavelength > Scalar(0)))
      throw std::invalid_argument("wavelength must be positive");
    if (positions.empty())
      throw std::invalid_argument("antenna array must contain at least one element");
    if (std::abs(positions.front()) > position_tol(wavelength))
      throw std::invalid_argument("first antenna must sit at x = 0");
    positions.front() = Scalar(0);
    for (std::size_t i = 1; i < positions.size(); ++i) {
      if (!(positions[i] > positions[i - 1]))
        throw std::invalid_argument("antenna positions must be strictly increasing");
    }
    if (!(positions.back() < wavelength))
      throw std::invalid_argument("antenna positions must lie in [0, wavelength)");
    return ArrayGeometry(wavelength, std::move(positions));
  }

  /// Q equally spaced antennas with spacing d = lambda / Q (so Q d = lambda).
  static ArrayGeometry uniform(int count, Scalar wavelength) {
    if (count < 1) throw std::invalid_argument("antenna count must be positive");
    std::vector<Scalar> xs(count);
    for (int q = 0; q < count; ++q)
      xs[q] = Scalar(q) * wavelength / Scalar(count);
    return from_positions(wavelength, std::move(xs));
  }

  /// Positions for every steering phase a pair of constellations can demand,
  /// i.e. { qd_phase(a, b) : a in cx, b in cy }, deduplicated and sorted.
  static ArrayGeometry for_constellations(const PskConstellation<Scalar>& cx,
                                          const PskConstellation<Scalar>& cy,
                                          Scalar wavelength) {
    std::vector<Scalar> xs;
    xs.reserve(std::size_t(cx.order()) * std::size_t(cy.order()));
    for (int a = 0; a < cx.order(); ++a)
      for (int b = 0; b < cy.order(); ++b)
        xs.push_back(antenna_position(qd_phase(cx.phase_at(a), cy.phase_at(b)), wavelength));
    std::sort(xs.begin(), xs.end());
    const Scalar tol = position_tol(wavelength);
    std::vector<Scalar> unique;
    for (Scalar x : xs)
      if (unique.empty() || x - unique.back() > tol) unique.push_back(x);
    return from_positions(wavelength, std::move(unique));
  }

  /// Two positions closer than this count as the same antenna.  Scales with
  /// the scalar's precision so float instantiations dedup correctly.
  static Scalar position_tolerance(Scalar wavelength) {
    return Scalar(256) * std::numeric_limits<Scalar>::epsilon() * wavelength;
  }

  Scalar wavelength() const { return wavelength_; }
  int size() const { return static_cast<int>(positions_.size()); }
  Scalar position(int q) const { return positions_.at(std::size_t(q)); }
  const std::vector<Scalar>& positions() const { return positions_; }

  Scalar qd_phase_at(int q) const {
    return qd_phase_of_position(position(q), wavelength_);
  }

  std::optional<int> index_of_position(Scalar x) const {
    const Scalar tol = position_tol(wavelength_);
    for (std::size_t q = 0; q < positions_.size(); ++q)
      if (std::abs(positions_[q] - x) <= tol) return int(q);
    return std::nullopt;
  }

  std::optional<int> index_of_qd_phase(Scalar phi_q) const {
    return index_of_position(antenna_position(phi_q, wavelength_));
  }

  /// Common spacing d if the array is uniform, otherwise nullopt.
  std::optional<Scalar> uniform_spacing() const {
    if (positions_.size() < 2) return std::nullopt;
    const Scalar d = positions_[1] - positions_[0];
    const Scalar tol = position_tol(wavelength_);
    for (std::size_t q = 1; q < positions_.size(); ++q)
      if (std::abs(positions_[q] - Scalar(q) * d) > tol) return std::nullopt;
    return d;
  }

 private:
  ArrayGeometry(Scalar wavelength, std::vector<Scalar> positions)
      : wavelength_(wavelength), positions_(std::move(positions)) {}

  static Scalar position_tol(Scalar wavelength) {
    return position_tolerance(wavelength);
  }

  Scalar wavelength_;
  std::vector<Scalar> positions_;
};

/// One jointly modulated transmission: source phase phi_y, steering phase
/// phi_q from antenna q, and the resulting parallel-axis phase phi_x with
/// (phi_y + phi_q) mod 2pi == phi_x.
template <typename Scalar>
struct JointSymbol {
  Scalar phi_x{};
  Scalar phi_y{};
  Scalar phi_q{};
  int antenna_index{};
  Scalar energy{1};

  /// Symbol produced at the signal source: sqrt(E) e^{j phi_y}.
  Complex<Scalar> source_symbol() const {
    return std::polar(std::sqrt(energy), phi_y);
  }

  /// Symbol as launched toward the parallel axis: sqrt(E) e^{j(phi_y + phi_q)}.
  Complex<Scalar> parallel_symbol() const {
    return std::polar(std::sqrt(energy), phi_y + phi_q);
  }
};

/// Map one bit word per stream onto a joint symbol: phi_y comes from the
/// perpendicular stream's constellation, the antenna is chosen so the
/// parallel axis sees phi_x.  The array must have been built for (or cover)
/// the steering alphabet of the constellation pair.
template <typename Scalar>
JointSymbol<Scalar> joint_modulate(BitWord bits_x, BitWord bits_y,
                                   const PskConstellation<Scalar>& cx,
                                   const PskConstellation<Scalar>& cy,
                                   const ArrayGeometry<Scalar>& array,
                                   Scalar energy = Scalar(1)) {
  const Scalar phi_x = cx.phase_of_label(bits_x);
  const Scalar phi_y = cy.phase_of_label(bits_y);
  const Scalar phi_q = qd_phase(phi_x, phi_y);
  const auto q = array.index_of_qd_phase(phi_q);
  if (!q) {
    std::ostringstream msg;
    msg << "array provides no antenna for steering phase " << phi_q
        << " rad (position " << antenna_position(phi_q, array.wavelength())
        << "); array and constellation pair are mismatched";
    throw ConfigError(msg.str());
  }
  return {phi_x, phi_y, phi_q, *q, energy};
}

/// Coherent hard decision: divide out the channel estimate and pick the
/// constellation phase at minimum angular distance.  Exact ties resolve to
/// the lower constellation index.
template <typename Scalar>
BitWord hard_demodulate(Complex<Scalar> observation,
                        const PskConstellation<Scalar>& c,
                        Complex<Scalar> channel_estimate) {
  if (channel_estimate == Complex<Scalar>{})
    throw std::invalid_argument("channel estimate must be nonzero");
  const Scalar angle = std::arg(observation / channel_estimate);
  int best = 0;
  Scalar best_dist = std::numeric_limits<Scalar>::infinity();
  for (int m = 0; m < c.order(); ++m) {
    const Scalar dist = std::abs(wrap_pm_pi(angle - c.phase_at(m)));
    if (dist < best_dist) {
      best = m;
      best_dist = dist;
    }
  }
  return c.label_at(best);
}

}  // namespace qdsim
