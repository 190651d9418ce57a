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
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qdsim/analytics.hpp"
#include "qdsim/channel.hpp"
#include "qdsim/modem.hpp"
#include "qdsim/montecarlo.hpp"
#include "qdsim/random.hpp"
#include "qdsim/types.hpp"
#include "qdsim/wavefield.hpp"

namespace qdsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 20250809;
  double theta_x = 30.0 * pi_v<double> / 180.0;
  double theta_y = 8.0 * pi_v<double> / 180.0;
};

using OffsetFn = std::function<double(double x_q, double theta, double wavelength)>;

/// Count violations of the small-angle offset bounds over `n` random
/// (wavelength, x_q <= lambda/2, theta <= pi/4) cases.  The offset functions
/// are injectable so alternative formulas can be put through the same gate.
inline int bound_violations(const OffsetFn& parallel_fn, const OffsetFn& perpendicular_fn,
                            std::uint64_t seed, int n) {
  CounterRng rng(seed, 0xB0D5u, 0);
  int violations = 0;
  for (int i = 0; i < n; ++i) {
    const double wavelength = 0.05 + 3.95 * rng.next_unit();
    const double theta = pi_v<double> / 4 * rng.next_unit();
    const double x = wavelength / 2 * rng.next_unit();
    const auto [bound_x, bound_y] = offset_bounds(theta);
    if (std::abs(parallel_fn(x, theta, wavelength)) > bound_x) ++violations;
    if (std::abs(perpendicular_fn(x, theta, wavelength)) > bound_y) ++violations;
  }
  return violations;
}

inline CheckResult check_anisotropy() {
  CheckResult r{"anisotropy", true, ""};
  CounterRng rng(7, 0, 0);
  for (int i = 0; i < 200 && r.pass; ++i) {
    const WaveModel<double> model{1e9 * rng.next_unit(), 0.01 + rng.next_unit(),
                                  400 * rng.next_unit(), 0.1 + rng.next_unit()};
    if (doppler_shift(model, half_pi_v<double>) != 0.0) {
      r.pass = false;
      r.detail = "doppler shift at pi/2 is not exactly zero";
    }
    if (doppler_shift(model, 0.0) != model.source_speed / model.wavelength) {
      r.pass = false;
      r.detail = "doppler shift at 0 is not exactly v/lambda";
    }
  }
  if (r.pass) r.detail = "shift(pi/2) == 0 and shift(0) == v/lambda over 200 random models";
  return r;
}

inline CheckResult check_stepped_signal() {
  CheckResult r{"stepped-signal", true, ""};
  for (int q_count : {2, 4, 8}) {
    const WaveModel<double> model{0, 1.0, 0, 1.0};
    const QdEmulationConfig<double> cfg{ArrayGeometry<double>::uniform(q_count, 1.0),
                                        1e-3, 8, 0.35};
    const auto samples = qd_stepped_signal(cfg, model, q_count * 1e-3);
    for (int q = 0; q < q_count && r.pass; ++q) {
      const auto expected = baseband_rx(model, q * 1.0 / q_count, 0.35);
      if (samples(q * 8) != expected) {
        r.pass = false;
        std::ostringstream os;
        os << "dwell " << q << " of Q=" << q_count
           << " does not equal the parked-source baseband value";
        r.detail = os.str();
      }
    }
  }
  if (r.pass) r.detail = "dwell values equal parked-source baseband values for Q in {2,4,8}";
  return r;
}

inline CheckResult check_spectrum_recovery() {
  CheckResult r{"qd-spectrum", true, ""};
  const double shift_hz = 100.0;
  for (int q_count : {2, 4, 8, 16}) {
    const double dwell = 1.0 / (q_count * shift_hz);
    const int spd = 8;
    const WaveModel<double> model{0, 1.0, 0, 1.0};
    const QdEmulationConfig<double> cfg{ArrayGeometry<double>::uniform(q_count, 1.0),
                                        dwell, spd, 0.0};
    const auto samples = qd_stepped_signal(cfg, model, 1.0);
    const double fs = spd / dwell;
    const double bin = fs / double(samples.size());
    const double est = estimate_shift(samples, fs);
    if (std::abs(est - shift_hz) > bin + 1e-9) {
      r.pass = false;
      std::ostringstream os;
      os << "Q=" << q_count << ": estimated " << est << " Hz, expected " << shift_hz
         << " +/- " << bin << " Hz";
      r.detail = os.str();
      break;
    }
  }
  if (r.pass) r.detail = "stepped-sweep shift recovered within one bin for Q in {2,4,8,16}";
  return r;
}

inline CheckResult check_joint_closure() {
  CheckResult r{"joint-closure", true, ""};
  for (int mx : {2, 4, 8}) {
    for (int my : {2, 4, 8}) {
      const PskConstellation<double> cx(mx), cy(my);
      const auto array = ArrayGeometry<double>::for_constellations(cx, cy, 1.0);
      for (BitWord bx = 0; bx < BitWord(mx); ++bx) {
        for (BitWord by = 0; by < BitWord(my); ++by) {
          const auto s = joint_modulate(bx, by, cx, cy, array);
          const double resumed = wrap_two_pi(s.phi_y + s.phi_q);
          const double err = std::abs(wrap_pm_pi(resumed - s.phi_x));
          const double pos_err =
              std::abs(array.position(s.antenna_index) - s.phi_q / two_pi_v<double>);
          if (err > 1e-12 || pos_err > 1e-12) {
            r.pass = false;
            std::ostringstream os;
            os << "closure broke at Mx=" << mx << " My=" << my << " bits (" << bx
               << "," << by << ")";
            r.detail = os.str();
            return r;
          }
        }
      }
    }
  }
  r.detail = "(phi_y + phi_q) mod 2pi == phi_x and x_q == phi_q lambda/2pi for all "
             "pairs, M in {2,4,8}^2";
  return r;
}

inline CheckResult check_loopback() {
  CheckResult r{"loopback", true, ""};
  for (int mx : {2, 4, 8}) {
    for (int my : {2, 4, 8}) {
      const PskConstellation<double> cx(mx), cy(my);
      const auto array = ArrayGeometry<double>::for_constellations(cx, cy, 1.0);
      const ChannelConfig<double> par{Branch::parallel, {0.8, 0.4}, 0.3, 0.0, 1e6};
      const ChannelConfig<double> perp{Branch::perpendicular, {0.8, 0.4}, 0.3, 0.0, 1e6};
      for (BitWord bx = 0; bx < BitWord(mx); ++bx) {
        for (BitWord by = 0; by < BitWord(my); ++by) {
          const auto s = joint_modulate(bx, by, cx, cy, array);
          const auto rx_x = hard_demodulate(transmit_parallel(s, par, {}), cx,
                                            par.pilot_estimate());
          const auto rx_y = hard_demodulate(transmit_perpendicular(s, perp, {}), cy,
                                            perp.pilot_estimate());
          if (rx_x != bx || rx_y != by) {
            r.pass = false;
            std::ostringstream os;
            os << "noiseless loopback failed at Mx=" << mx << " My=" << my
               << " bits (" << bx << "," << by << ")";
            r.detail = os.str();
            return r;
          }
        }
      }
    }
  }
  r.detail = "noiseless loopback recovers both streams for all pairs, M in {2,4,8}^2";
  return r;
}

inline CheckResult check_offset_bounds(std::uint64_t seed) {
  const int violations = bound_violations(
      [](double x, double th, double l) { return parallel_offset(x, th, l); },
      [](double x, double th, double l) { return perpendicular_offset(x, th, l); },
      seed, 1000);
  CheckResult r{"offset-bounds", violations == 0, ""};
  std::ostringstream os;
  os << violations << " violations in 1000 randomized cases";
  r.detail = os.str();
  return r;
}

inline CheckResult check_sensitivity_ordering() {
  CheckResult r{"sensitivity-ordering", true, ""};
  for (double deg : {2.0, 4.0, 8.0, 16.0}) {
    const double theta = deg * pi_v<double> / 180.0;
    for (double target : {1e-4, 1e-6, 1e-8}) {
      const double lp = snr_loss_at_ber<double>(
          {target, Branch::parallel, theta, Averaging::worst_case_antenna});
      const double lq = snr_loss_at_ber<double>(
          {target, Branch::perpendicular, theta, Averaging::worst_case_antenna});
      if (!(lq > lp)) {
        r.pass = false;
        std::ostringstream os;
        os << "perpendicular loss " << lq << " dB not above parallel " << lp
           << " dB at theta=" << deg << " deg, target " << target;
        r.detail = os.str();
        return r;
      }
    }
  }
  r.detail = "perpendicular loss exceeds parallel loss at 2/4/8/16 deg for "
             "targets 1e-4/1e-6/1e-8";
  return r;
}

inline CheckResult check_loss_calibration() {
  const double lx = snr_loss_at_ber<double>(
      {1e-8, Branch::parallel, 30.0 * pi_v<double> / 180.0, Averaging::worst_case_antenna});
  const double ly = snr_loss_at_ber<double>(
      {1e-8, Branch::perpendicular, 8.0 * pi_v<double> / 180.0, Averaging::worst_case_antenna});
  CheckResult r{"loss-calibration", true, ""};
  r.pass = lx >= 0.6 && lx <= 1.0 && ly >= 0.6 && ly <= 1.0;
  std::ostringstream os;
  os << "loss(parallel, 30 deg) = " << lx << " dB, loss(perpendicular, 8 deg) = " << ly
     << " dB; expected band [0.6, 1.0]";
  r.detail = os.str();
  return r;
}

// Monte-Carlo agreement checks run at 4 sigma so `validate` stays green for
// any seed; the acceptance suite applies the 3-sigma version at its pinned
// seed.
inline CheckResult check_mc_ideal_agreement(std::uint64_t seed) {
  CheckResult r{"mc-ideal-agreement", true, ""};
  SimConfig<double> cfg;
  cfg.seed = seed;
  cfg.snr_grid_db = {0.0, 4.0};
  for (Branch branch : {Branch::parallel, Branch::perpendicular}) {
    for (double snr : cfg.snr_grid_db) {
      const auto p = run_ber_point(cfg, snr, branch);
      const double expected = bpsk_ber_ideal(db_to_linear(snr));
      const double sigma = std::sqrt(expected * (1 - expected) / double(p.trials));
      if (std::abs(p.ber - expected) > 4 * sigma) {
        r.pass = false;
        std::ostringstream os;
        os << to_string(branch) << " at " << snr << " dB: ber " << p.ber
           << " vs analytic " << expected << " exceeds 4 sigma";
        r.detail = os.str();
        return r;
      }
    }
  }
  r.detail = "both branches match Q(sqrt(2 gamma)) within 4 sigma at 0 and 4 dB";
  return r;
}

inline CheckResult check_mc_deviated_agreement(const CheckOptions& opt) {
  CheckResult r{"mc-deviated-agreement", true, ""};
  SimConfig<double> cfg;
  cfg.seed = opt.seed + 1;
  cfg.theta_x = opt.theta_x;
  cfg.theta_y = opt.theta_y;
  cfg.snr_grid_db = {4.0};
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  for (Branch branch : {Branch::parallel, Branch::perpendicular}) {
    const double theta = branch == Branch::parallel ? opt.theta_x : opt.theta_y;
    const auto p = run_ber_point(cfg, 4.0, branch);
    const double expected = ber_deviated(db_to_linear(4.0), theta, branch, bpsk, array,
                                         Averaging::uniform_antenna);
    const double sigma = std::sqrt(expected * (1 - expected) / double(p.trials));
    if (std::abs(p.ber - expected) > 4 * sigma) {
      r.pass = false;
      std::ostringstream os;
      os << to_string(branch) << " at 4 dB: ber " << p.ber << " vs analytic "
         << expected << " exceeds 4 sigma";
      r.detail = os.str();
      return r;
    }
  }
  r.detail = "deviated-geometry BER matches the uniform-antenna closed form "
             "within 4 sigma at 4 dB";
  return r;
}

inline CheckResult check_determinism(std::uint64_t seed) {
  CheckResult r{"determinism", true, ""};
  SimConfig<double> cfg;
  cfg.seed = seed;
  cfg.snr_grid_db = {0.0, 2.0};
  const auto a = run_sweep(cfg, 1);
  const auto b = run_sweep(cfg, 3);
  if (a.size() != b.size()) {
    r.pass = false;
    r.detail = "sweeps of different worker counts differ in size";
    return r;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].branch != b[i].branch || a[i].point.trials != b[i].point.trials ||
        a[i].point.errors != b[i].point.errors || a[i].point.ber != b[i].point.ber) {
      r.pass = false;
      r.detail = "sweep rows differ between 1-worker and 3-worker runs";
      return r;
    }
  }
  r.detail = "1-worker and 3-worker sweeps are identical row for row";
  return r;
}

inline std::vector<CheckResult> run_all_checks(const CheckOptions& opt) {
  return {check_anisotropy(),
          check_stepped_signal(),
          check_spectrum_recovery(),
          check_joint_closure(),
          check_loopback(),
          check_offset_bounds(opt.seed),
          check_sensitivity_ordering(),
          check_loss_calibration(),
          check_mc_ideal_agreement(opt.seed),
          check_mc_deviated_agreement(opt),
          check_determinism(opt.seed)};
}

}  // namespace qdsim
