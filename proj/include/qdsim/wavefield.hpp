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

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

#include "qdsim/modem.hpp"
#include "qdsim/types.hpp"

namespace qdsim {

/// Harmonic plane-wave source moving along the x axis.
template <typename Scalar>
struct WaveModel {
  Scalar carrier_hz{0};
  Scalar wavelength{1};
  Scalar source_speed{0};
  Scalar amplitude{1};

  // Derived, never stored: k = 2*pi / lambda.
  Scalar wavenumber() const { return two_pi_v<Scalar> / wavelength; }
};

template <typename Scalar>
void ensure_valid(const WaveModel<Scalar>& m) {
  if (!(m.wavelength > Scalar(0)))
    throw std::invalid_argument("wave model: wavelength must be positive");
  if (!(m.amplitude > Scalar(0)))
    throw std::invalid_argument("wave model: amplitude must be positive");
  if (!(m.source_speed >= Scalar(0)))
    throw std::invalid_argument("wave model: source speed must be nonnegative");
  if (!(m.carrier_hz >= Scalar(0)))
    throw std::invalid_argument("wave model: carrier frequency must be nonnegative");
}

/// Frequency shift (v/lambda) cos(theta) seen at observation angle theta.
/// Computed as sin(pi/2 - theta) so the perpendicular axis gets exactly zero.
template <typename Scalar>
Scalar doppler_shift(const WaveModel<Scalar>& model, Scalar theta) {
  ensure_valid(model);
  return model.source_speed / model.wavelength * std::sin(half_pi_v<Scalar> - theta);
}

/// Carrier-level wave at a receiver on the x axis at x = receiver_x:
/// A e^{j(2pi f t - k x + k v t)}.
template <typename Scalar>
Complex<Scalar> plane_wave_rx(const WaveModel<Scalar>& model, Scalar t, Scalar receiver_x) {
  ensure_valid(model);
  const Scalar k = model.wavenumber();
  const Scalar phase = two_pi_v<Scalar> * model.carrier_hz * t - k * receiver_x +
                       k * model.source_speed * t;
  return std::polar(model.amplitude, phase);
}

/// Baseband value once the carrier is removed and the source sits at
/// position x: A e^{j(k x + phi0)}.
template <typename Scalar>
Complex<Scalar> baseband_rx(const WaveModel<Scalar>& model, Scalar source_x, Scalar phi0) {
  ensure_valid(model);
  return std::polar(model.amplitude, model.wavenumber() * source_x + phi0);
}

/// Switched-antenna emulation of a moving source: a uniform array swept one
/// antenna per dwell, emulating speed v = d / T.  Hops between antennas are
/// instantaneous in this model.
template <typename Scalar>
struct QdEmulationConfig {
  ArrayGeometry<Scalar> array;
  Scalar dwell_time{1};
  int samples_per_dwell{8};
  Scalar initial_phase{0};
};

/// Baseband samples of the stepped sweep over `duration` seconds: the dwell
/// with index n carries the constant phase k*d*n + phi0, i.e. the baseband
/// value of a source parked at x = n*d.  Requires a uniform array with
/// Q*d = lambda and a duration of at least one full sweep.
template <typename Scalar>
SampleVector<Scalar> qd_stepped_signal(const QdEmulationConfig<Scalar>& cfg,
                                       const WaveModel<Scalar>& model,
                                       Scalar duration) {
  ensure_valid(model);
  if (!(cfg.dwell_time > Scalar(0)))
    throw std::invalid_argument("dwell time must be positive");
  if (cfg.samples_per_dwell < 4)
    throw std::invalid_argument("samples_per_dwell must be at least 4");
  const auto spacing = cfg.array.uniform_spacing();
  if (!spacing)
    throw std::invalid_argument("stepped sweep requires a uniform antenna array");
  const int q_count = cfg.array.size();
  const Scalar lambda = cfg.array.wavelength();
  const Scalar tol = ArrayGeometry<Scalar>::position_tolerance(lambda);
  if (std::abs(Scalar(q_count) * *spacing - lambda) > Scalar(q_count) * tol)
    throw std::invalid_argument("array violates the Q d = lambda constraint");
  if (std::abs(lambda - model.wavelength) > tol)
    throw std::invalid_argument("array and wave model disagree on the wavelength");

  const auto n_dwells = static_cast<Eigen::Index>(
      std::floor(double(duration / cfg.dwell_time) + 1e-9));
  if (n_dwells < q_count)
    throw std::invalid_argument("duration must cover at least one full sweep (Q*T)");

  SampleVector<Scalar> out(n_dwells * cfg.samples_per_dwell);
  for (Eigen::Index n = 0; n < n_dwells; ++n) {
    const Complex<Scalar> value =
        baseband_rx(model, Scalar(n) * *spacing, cfg.initial_phase);
    out.segment(n * cfg.samples_per_dwell, cfg.samples_per_dwell) = value;
  }
  return out;
}

namespace detail {

template <typename Scalar>
std::vector<Complex<Scalar>> fft_forward(const SampleVector<Scalar>& samples) {
  Eigen::FFT<Scalar> fft;
  std::vector<Complex<Scalar>> in(samples.data(), samples.data() + samples.size());
  std::vector<Complex<Scalar>> out(in.size());
  fft.fwd(out, in);
  return out;
}

}  // namespace detail

/// Frequency of the strongest discrete-spectrum bin, sign included.  A
/// constant signal reports 0 (the DC bin wins; ties keep the lowest bin).
template <typename Derived>
auto estimate_shift(const Eigen::ArrayBase<Derived>& samples,
                    typename Eigen::NumTraits<typename Derived::Scalar>::Real sample_rate) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const SampleVector<Scalar> x = samples.derived();
  const Eigen::Index n = x.size();
  if (n < 2)
    throw std::invalid_argument("shift estimation needs at least two samples");
  if (!(sample_rate > Scalar(0)))
    throw std::invalid_argument("sample rate must be positive");
  const auto spectrum = detail::fft_forward(x);
  Eigen::Index best = 0;
  Scalar best_mag = Scalar(-1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar mag = std::norm(spectrum[std::size_t(k)]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  const Eigen::Index signed_bin = best <= n / 2 ? best : best - n;
  return Scalar(signed_bin) * sample_rate / Scalar(n);
}

/// One-sided description of the discrete spectrum, ordered from -fs/2 to
/// +fs/2: bin center frequencies and normalized magnitudes |X_k| / n.
template <typename Derived>
auto spectrum_bins(const Eigen::ArrayBase<Derived>& samples,
                   typename Eigen::NumTraits<typename Derived::Scalar>::Real sample_rate) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const SampleVector<Scalar> x = samples.derived();
  const Eigen::Index n = x.size();
  if (n < 2)
    throw std::invalid_argument("spectrum needs at least two samples");
  if (!(sample_rate > Scalar(0)))
    throw std::invalid_argument("sample rate must be positive");
  const auto spectrum = detail::fft_forward(x);
  RealVector<Scalar> freq(n), mag(n);
  Eigen::Index row = 0;
  for (Eigen::Index k = n / 2 + 1; k < n; ++k, ++row) {  // negative side first
    freq(row) = Scalar(k - n) * sample_rate / Scalar(n);
    mag(row) = std::abs(spectrum[std::size_t(k)]) / Scalar(n);
  }
  for (Eigen::Index k = 0; k <= n / 2; ++k, ++row) {
    freq(row) = Scalar(k) * sample_rate / Scalar(n);
    mag(row) = std::abs(spectrum[std::size_t(k)]) / Scalar(n);
  }
  return std::make_pair(std::move(freq), std::move(mag));
}

}  // namespace qdsim
