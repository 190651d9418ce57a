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

// End-to-end acceptance suite.  Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdsim/analytics.hpp"
#include "qdsim/channel.hpp"
#include "qdsim/checks.hpp"
#include "qdsim/modem.hpp"
#include "qdsim/montecarlo.hpp"
#include "qdsim/random.hpp"
#include "qdsim/wavefield.hpp"

using namespace qdsim;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20250809;
const double kTheta30 = 30.0 * pi_v<double> / 180.0;
const double kTheta8 = 8.0 * pi_v<double> / 180.0;

int g_failures = 0;

void report(int index, bool pass, const std::string& detail) {
  std::cout << "criterion " << index << ": " << (pass ? "PASS" : "FAIL") << " - "
            << detail << '\n';
  if (!pass) ++g_failures;
}

void run_criterion(int index, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(index, pass, detail);
  } catch (const std::exception& e) {
    report(index, false, std::string("exception: ") + e.what());
  }
}

// --- criterion 1: ideal-geometry Monte Carlo vs Q(sqrt(2 gamma)) ------------

std::pair<bool, std::string> criterion_ideal_ber() {
  const auto start = std::chrono::steady_clock::now();
  SimConfig<double> cfg;
  cfg.seed = kSeed;
  cfg.snr_grid_db = {0.0, 2.0, 4.0, 6.0, 8.0};
  bool ok = true;
  double worst_pull = 0.0;
  std::int64_t min_errors_seen = INT64_MAX;
  for (Branch branch : {Branch::parallel, Branch::perpendicular}) {
    for (double snr : cfg.snr_grid_db) {
      const auto p = run_ber_point(cfg, snr, branch);
      const double expected = bpsk_ber_ideal(db_to_linear(snr));
      const double sigma = std::sqrt(expected * (1.0 - expected) / double(p.trials));
      const double pull = std::abs(p.ber - expected) / sigma;
      worst_pull = std::max(worst_pull, pull);
      min_errors_seen = std::min(min_errors_seen, p.errors);
      ok = ok && pull <= 3.0 && p.errors >= 100;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && seconds < 120.0;
  std::ostringstream os;
  os << "ideal BER within 3 binomial sigma at {0,2,4,6,8} dB on both branches "
        "(worst pull "
     << worst_pull << " sigma, min errors " << min_errors_seen << ", runtime "
     << seconds << " s)";
  return {ok, os.str()};
}

// --- criterion 2: 0.8 dB calibration ----------------------------------------

std::pair<bool, std::string> criterion_loss_calibration() {
  const double loss_x = snr_loss_at_ber<double>(
      {1e-8, Branch::parallel, kTheta30, Averaging::worst_case_antenna});
  const double loss_y = snr_loss_at_ber<double>(
      {1e-8, Branch::perpendicular, kTheta8, Averaging::worst_case_antenna});
  // independent closed-form route: loss = -20 log10 cos(dphi) exactly
  const double ref_x = -20.0 * std::log10(std::cos(std::abs(parallel_offset(0.5, kTheta30, 1.0))));
  const double ref_y = -20.0 * std::log10(std::cos(perpendicular_offset(0.5, kTheta8, 1.0)));
  const bool ok = loss_x >= 0.6 && loss_x <= 1.0 && loss_y >= 0.6 && loss_y <= 1.0 &&
                  std::abs(loss_x - 0.8) <= 0.2 && std::abs(loss_y - 0.8) <= 0.2 &&
                  std::abs(loss_x - ref_x) < 1e-3 && std::abs(loss_y - ref_y) < 1e-3 &&
                  std::abs(loss_x - 0.79) < 0.01 && std::abs(loss_y - 0.86) < 0.01;
  std::ostringstream os;
  os << "SNR loss at BER 1e-8 (worst case): parallel/30deg = " << loss_x
     << " dB, perpendicular/8deg = " << loss_y
     << " dB; both in [0.6, 1.0] and within 0.2 dB of the quoted 0.8 dB";
  return {ok, os.str()};
}

// --- criterion 3: deviated Monte Carlo vs closed form -----------------------

std::pair<bool, std::string> criterion_deviated_agreement() {
  SimConfig<double> cfg;
  cfg.seed = kSeed + 1;
  cfg.theta_x = kTheta30;
  cfg.theta_y = kTheta8;
  cfg.snr_grid_db = {2.0, 4.0, 6.0};
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  bool ok = true;
  double worst_pull = 0.0;
  for (Branch branch : {Branch::parallel, Branch::perpendicular}) {
    const double theta = branch == Branch::parallel ? kTheta30 : kTheta8;
    for (double snr : cfg.snr_grid_db) {
      const auto p = run_ber_point(cfg, snr, branch);
      const double expected = ber_deviated(db_to_linear(snr), theta, branch, bpsk,
                                           array, Averaging::uniform_antenna);
      const double sigma = std::sqrt(expected * (1.0 - expected) / double(p.trials));
      const double pull = std::abs(p.ber - expected) / sigma;
      worst_pull = std::max(worst_pull, pull);
      ok = ok && pull <= 3.0;
    }
  }
  std::ostringstream os;
  os << "deviated BER (30deg parallel, 8deg perpendicular) matches the "
        "uniform-antenna closed form within 3 sigma at {2,4,6} dB (worst pull "
     << worst_pull << " sigma)";
  return {ok, os.str()};
}

// --- criterion 4: sensitivity ordering ---------------------------------------

std::pair<bool, std::string> criterion_sensitivity_ordering() {
  bool ok = true;
  std::ostringstream pairs;
  for (double deg : {2.0, 4.0, 8.0, 16.0}) {
    const double theta = deg * pi_v<double> / 180.0;
    const double lp = snr_loss_at_ber<double>(
        {1e-6, Branch::parallel, theta, Averaging::worst_case_antenna});
    const double lq = snr_loss_at_ber<double>(
        {1e-6, Branch::perpendicular, theta, Averaging::worst_case_antenna});
    ok = ok && lq > lp;
    pairs << " " << deg << "deg:" << lq << ">" << lp;
  }
  return {ok, "perpendicular loss exceeds parallel loss at BER 1e-6 for" + pairs.str()};
}

// --- criterion 5: offset bound suite -----------------------------------------

std::pair<bool, std::string> criterion_bounds() {
  CounterRng rng(kSeed, 0xACCEu, 0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lambda = 0.05 + 3.95 * rng.next_unit();
    const double theta = pi_v<double> / 4 * rng.next_unit();
    const double x = lambda / 2 * rng.next_unit();
    const auto [bound_x, bound_y] = offset_bounds(theta);
    if (std::abs(parallel_offset(x, theta, lambda)) > bound_x) ++violations;
    if (std::abs(perpendicular_offset(x, theta, lambda)) > bound_y) ++violations;
  }
  std::ostringstream os;
  os << "1000 randomized (theta <= pi/4, x_q <= lambda/2) cases: " << violations
     << " bound violations";
  return {violations == 0, os.str()};
}

// --- criterion 6: QD-effect spectrum ------------------------------------------

std::pair<bool, std::string> criterion_spectrum() {
  const double shift_hz = 100.0;
  bool ok = true;
  double worst_bins = 0.0;
  for (int q_count : {2, 4, 8, 16}) {
    const double dwell = 1.0 / (q_count * shift_hz);
    const int spd = 8;
    const WaveModel<double> model{0.0, 1.0, 0.0, 1.0};
    const QdEmulationConfig<double> cfg{ArrayGeometry<double>::uniform(q_count, 1.0),
                                        dwell, spd, 0.0};
    const auto samples = qd_stepped_signal(cfg, model, 1.0);
    const double fs = spd / dwell;
    const double bin = fs / double(samples.size());
    const double est = estimate_shift(samples, fs);
    worst_bins = std::max(worst_bins, std::abs(est - shift_hz) / bin);
    ok = ok && std::abs(est - shift_hz) <= bin + 1e-9;
  }
  std::ostringstream os;
  os << "stepped-sweep shift recovered within one spectral bin for Q in "
        "{2,4,8,16} (worst error "
     << worst_bins << " bins)";
  return {ok, os.str()};
}

// --- criterion 7: joint-modulation closure and loopback ----------------------

std::pair<bool, std::string> criterion_closure() {
  bool ok = true;
  int cases = 0;
  for (int mx : {2, 4, 8}) {
    for (int my : {2, 4, 8}) {
      const PskConstellation<double> cx(mx), cy(my);
      const auto array = ArrayGeometry<double>::for_constellations(cx, cy, 1.0);
      const ChannelConfig<double> par{Branch::parallel, {1.0, 0.0}, 0.0, 0.0, 1.0};
      const ChannelConfig<double> perp{Branch::perpendicular, {1.0, 0.0}, 0.0, 0.0, 1.0};
      for (BitWord bx = 0; bx < BitWord(mx); ++bx) {
        for (BitWord by = 0; by < BitWord(my); ++by) {
          const auto s = joint_modulate(bx, by, cx, cy, array);
          ++cases;
          const double closure = std::abs(wrap_pm_pi(s.phi_y + s.phi_q - s.phi_x));
          const double pos_err = std::abs(array.position(s.antenna_index) -
                                          s.phi_q / two_pi_v<double>);
          const BitWord rx = hard_demodulate(transmit_parallel(s, par, {}), cx, {1.0, 0.0});
          const BitWord ry =
              hard_demodulate(transmit_perpendicular(s, perp, {}), cy, {1.0, 0.0});
          ok = ok && closure <= 1e-12 && pos_err <= 1e-12 && rx == bx && ry == by;
        }
      }
    }
  }
  std::ostringstream os;
  os << "joint-modulation closure, antenna-position identity, and noiseless "
        "loopback hold for all "
     << cases << " bit pairs over (Mx, My) in {2,4,8}^2";
  return {ok, os.str()};
}

// --- criterion 8: CLI determinism across thread counts -----------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::pair<bool, std::string> criterion_cli_determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("qdsim_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  const fs::path conf = dir / "sweep.conf";
  {
    std::ofstream f(conf);
    f << "seed = " << kSeed << "\n"
      << "snr_grid_db = 0, 2, 4\n"
      << "theta_x_deg = 30\n"
      << "theta_y_deg = 8\n";
  }
  const fs::path out1 = dir / "t1.csv";
  const fs::path out2 = dir / "t2.csv";
  const std::string base = std::string(QDSIM_CLI_PATH) + " ber-sweep --config " +
                           conf.string();
  const int rc1 = std::system(
      ("QD_SIM_THREADS=1 " + base + " --out " + out1.string() + " >/dev/null 2>&1").c_str());
  const int rc2 = std::system(
      ("QD_SIM_THREADS=7 " + base + " --out " + out2.string() + " >/dev/null 2>&1").c_str());
  const bool ran = WIFEXITED(rc1) && WEXITSTATUS(rc1) == 0 && WIFEXITED(rc2) &&
                   WEXITSTATUS(rc2) == 0;
  const std::string csv1 = slurp(out1);
  const bool ok = ran && !csv1.empty() && csv1 == slurp(out2);
  std::error_code ec;
  fs::remove_all(dir, ec);
  return {ok, std::string("two ber-sweep runs with QD_SIM_THREADS=1 and =7 produced ") +
                  (ok ? "byte-identical CSV" : "DIFFERENT output")};
}

}  // namespace

int main() {
  std::cout << "qdsim acceptance suite (seed " << kSeed << ")\n";
  run_criterion(1, criterion_ideal_ber);
  run_criterion(2, criterion_loss_calibration);
  run_criterion(3, criterion_deviated_agreement);
  run_criterion(4, criterion_sensitivity_ordering);
  run_criterion(5, criterion_bounds);
  run_criterion(6, criterion_spectrum);
  run_criterion(7, criterion_closure);
  run_criterion(8, criterion_cli_determinism);
  if (g_failures == 0) {
    std::cout << "all 8 criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria FAILED\n";
  return 1;
}
