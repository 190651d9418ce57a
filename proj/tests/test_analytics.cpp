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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qdsim/analytics.hpp"
#include "qdsim/random.hpp"

using namespace qdsim;

namespace {

const double kPi = pi_v<double>;
const double kTheta30 = 30.0 * kPi / 180.0;
const double kTheta8 = 8.0 * kPi / 180.0;

// frozen from the quadrature oracle
const double kDeltaPhi30 = 0.4208936072384665;   // |pi (cos 30deg - 1)|
const double kDeltaPhi8 = 0.4372251915534522;    // pi sin 8deg
const double kLoss30Db = 0.7932087064358398;     // -20 log10 cos(kDeltaPhi30)
const double kLoss8Db = 0.8581064098416784;      // -20 log10 cos(kDeltaPhi8)

LossQuery<double> make_query(double target, Branch branch, double theta,
                             Averaging mode = Averaging::worst_case_antenna) {
  return {target, branch, theta, mode};
}

}  // namespace

TEST_CASE("q_function fixed points") {
  CHECK(q_function(0.0) == 0.5);
  // Q(5.612) is within 5% of 1e-8 (quadrature value: 1.0000072e-8)
  CHECK(q_function(5.612) == doctest::Approx(1e-8).epsilon(0.05));
  CHECK(q_function(5.612) ==
        doctest::Approx(double(oracle::gaussian_tail(5.612L))).epsilon(1e-10));
}

TEST_CASE("q_function complement identity and monotonicity") {
  CounterRng rng(43, 0, 0);
  double prev = 1.0;
  for (double x = -4.0; x <= 4.0; x += 0.25) {
    CHECK(q_function(x) + q_function(-x) == doctest::Approx(1.0).epsilon(1e-14));
    const double qx = q_function(x);
    CHECK(qx < prev);
    prev = qx;
  }
  for (int i = 0; i < 100; ++i) {
    const double x = 8.0 * (rng.next_unit() - 0.5);
    CHECK(q_function(x) + q_function(-x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("q_function tracks the quadrature oracle to 1e-12 relative on [0, 8]") {
  for (double x = 0.0; x <= 8.0; x += 0.5) {
    const auto reference = double(oracle::gaussian_tail((long double)(x)));
    CHECK(std::abs(q_function(x) - reference) <= 1e-12 * reference);
  }
}

TEST_CASE("bpsk_ber_ideal on the standard waterfall") {
  CHECK(bpsk_ber_ideal(1.0) == doctest::Approx(0.0786).epsilon(1e-3));
  CHECK(bpsk_ber_ideal(1.0) ==
        doctest::Approx(double(oracle::gaussian_tail(std::sqrt(2.0L)))).epsilon(1e-12));
  // approx 1e-5 around 9.6 dB
  CHECK(bpsk_ber_ideal(db_to_linear(9.6)) == doctest::Approx(1e-5).epsilon(0.15));
  // vanishing at very high snr
  CHECK(bpsk_ber_ideal(1e6) == 0.0);
  CHECK_THROWS_AS(bpsk_ber_ideal(0.0), std::invalid_argument);
  CHECK_THROWS_AS(bpsk_ber_ideal(-3.0), std::invalid_argument);
}

TEST_CASE("bpsk_ber_offset reduces to the ideal curve at zero offset") {
  for (double gamma : {0.5, 1.0, 4.0, 10.0}) {
    CHECK(bpsk_ber_offset(gamma, 0.0) == bpsk_ber_ideal(gamma));
  }
}

TEST_CASE("bpsk_ber_offset effective SNR penalties match the paper calibration") {
  // the cos(dphi) scaling is an SNR penalty of -20 log10 cos(dphi) dB
  const double penalty30 = -20.0 * std::log10(std::cos(kDeltaPhi30));
  const double penalty8 = -20.0 * std::log10(std::cos(kDeltaPhi8));
  CHECK(penalty30 == doctest::Approx(kLoss30Db).epsilon(1e-12));
  CHECK(penalty8 == doctest::Approx(kLoss8Db).epsilon(1e-12));
  CHECK(penalty30 == doctest::Approx(0.794).epsilon(2e-3));
  CHECK(penalty8 == doctest::Approx(0.858).epsilon(2e-3));

  // the penalty is exactly what bpsk_ber_offset charges: shifting gamma by it
  // restores the ideal BER
  for (double gamma_db : {2.0, 6.0, 10.0}) {
    const double shifted = db_to_linear(gamma_db + penalty30);
    CHECK(bpsk_ber_offset(shifted, kDeltaPhi30) ==
          doctest::Approx(bpsk_ber_ideal(db_to_linear(gamma_db))).epsilon(1e-9));
  }
}

TEST_CASE("bpsk_ber_offset rejects rotations beyond the decision boundary") {
  CHECK_THROWS_AS(bpsk_ber_offset(1.0, kPi / 2), std::invalid_argument);
  CHECK_THROWS_AS(bpsk_ber_offset(1.0, -kPi / 2), std::invalid_argument);
  CHECK_NOTHROW(bpsk_ber_offset(1.0, kPi / 2 - 1e-6));
}

TEST_CASE("bpsk_ber_offset monotonicity in offset and snr") {
  double prev = bpsk_ber_offset(4.0, 0.0);
  for (double dphi = 0.1; dphi < kPi / 2; dphi += 0.1) {
    const double cur = bpsk_ber_offset(4.0, dphi);
    CHECK(cur > prev);
    prev = cur;
  }
  prev = 1.0;
  for (double gamma_db = -5.0; gamma_db <= 10.0; gamma_db += 1.0) {
    const double cur = bpsk_ber_offset(db_to_linear(gamma_db), 0.3);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("ber_deviated reduces to ideal at zero deviation in both modes") {
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  for (double gamma : {0.5, 2.0, 8.0}) {
    CHECK(ber_deviated(gamma, 0.0, Branch::parallel, bpsk, array,
                       Averaging::worst_case_antenna) == bpsk_ber_ideal(gamma));
    CHECK(ber_deviated(gamma, 0.0, Branch::perpendicular, bpsk, array,
                       Averaging::uniform_antenna) == bpsk_ber_ideal(gamma));
  }
}

TEST_CASE("ber_deviated worst case matches the direct closed form at 6 dB") {
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  const double gamma = db_to_linear(6.0);
  const double direct = q_function(std::sqrt(2.0 * gamma) * std::cos(kDeltaPhi30));
  CHECK(ber_deviated(gamma, kTheta30, Branch::parallel, bpsk, array,
                     Averaging::worst_case_antenna) ==
        doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::cos(kDeltaPhi30) == doctest::Approx(0.91272).epsilon(1e-5));
}

TEST_CASE("ber_deviated uniform mode is the two-antenna average") {
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  for (double gamma_db : {0.0, 4.0, 8.0}) {
    const double gamma = db_to_linear(gamma_db);
    const double expected =
        0.5 * bpsk_ber_ideal(gamma) + 0.5 * bpsk_ber_offset(gamma, kDeltaPhi8);
    CHECK(ber_deviated(gamma, kTheta8, Branch::perpendicular, bpsk, array,
                       Averaging::uniform_antenna) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("uniform averaging sits between half and all of the worst case") {
  const PskConstellation<double> bpsk(2);
  const auto array = ArrayGeometry<double>::uniform(2, 1.0);
  for (double gamma_db = 0.0; gamma_db <= 12.0; gamma_db += 1.0) {
    const double gamma = db_to_linear(gamma_db);
    const double worst = ber_deviated(gamma, kTheta30, Branch::parallel, bpsk, array,
                                      Averaging::worst_case_antenna);
    const double uniform = ber_deviated(gamma, kTheta30, Branch::parallel, bpsk, array,
                                        Averaging::uniform_antenna);
    CHECK(uniform >= 0.5 * worst);
    CHECK(uniform <= worst);
  }
}

TEST_CASE("ber_deviated rejects non-BPSK constellations") {
  const PskConstellation<double> qpsk(4);
  const auto array = ArrayGeometry<double>::uniform(4, 1.0);
  CHECK_THROWS_AS(ber_deviated(1.0, 0.1, Branch::parallel, qpsk, array,
                               Averaging::worst_case_antenna),
                  ConfigError);
}

TEST_CASE("snr_loss_at_ber is exactly zero without deviation") {
  for (double target : {1e-3, 1e-6, 1e-8}) {
    CHECK(snr_loss_at_ber(make_query(target, Branch::parallel, 0.0)) == 0.0);
    CHECK(snr_loss_at_ber(make_query(target, Branch::perpendicular, 0.0)) == 0.0);
  }
}

TEST_CASE("snr_loss_at_ber reproduces the paper's 0.8 dB calibration") {
  const double loss_x = snr_loss_at_ber(make_query(1e-8, Branch::parallel, kTheta30));
  const double loss_y = snr_loss_at_ber(make_query(1e-8, Branch::perpendicular, kTheta8));
  // bisection against the exact -20 log10 cos(dphi) closed form
  CHECK(loss_x == doctest::Approx(kLoss30Db).epsilon(5e-4));
  CHECK(loss_y == doctest::Approx(kLoss8Db).epsilon(5e-4));
  CHECK(loss_x == doctest::Approx(0.79).epsilon(1e-2));
  CHECK(loss_y == doctest::Approx(0.86).epsilon(1e-2));
  // both within 0.2 dB of the quoted 0.8 dB
  CHECK(std::abs(loss_x - 0.8) < 0.2);
  CHECK(std::abs(loss_y - 0.8) < 0.2);
}

TEST_CASE("worst-case loss does not depend on the target BER") {
  const double a = snr_loss_at_ber(make_query(1e-4, Branch::parallel, kTheta30));
  const double b = snr_loss_at_ber(make_query(1e-8, Branch::parallel, kTheta30));
  CHECK(a == doctest::Approx(b).epsilon(1e-3));
}

TEST_CASE("snr loss is monotone in theta and ranks the branches") {
  for (Branch branch : {Branch::parallel, Branch::perpendicular}) {
    double prev = 0.0;
    for (double deg = 2.0; deg <= 24.0; deg += 2.0) {
      const double theta = deg * kPi / 180.0;
      const double loss = snr_loss_at_ber(make_query(1e-6, branch, theta));
      CHECK(loss > prev);
      prev = loss;
    }
  }
  for (double deg : {2.0, 4.0, 8.0, 16.0, 24.0}) {
    const double theta = deg * kPi / 180.0;
    for (double target : {1e-4, 1e-6, 1e-8}) {
      CHECK(snr_loss_at_ber(make_query(target, Branch::perpendicular, theta)) >
            snr_loss_at_ber(make_query(target, Branch::parallel, theta)));
    }
  }
}

TEST_CASE("snr_loss_at_ber validates its query and bracket") {
  CHECK_THROWS_AS(snr_loss_at_ber(make_query(0.6, Branch::parallel, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(snr_loss_at_ber(make_query(0.0, Branch::parallel, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(snr_loss_at_ber(make_query(1e-6, Branch::parallel, kPi / 3)),
                  std::invalid_argument);
  // 0.45 is not reachable at -10 dB: bracket failure
  CHECK_THROWS_AS(snr_loss_at_ber(make_query(0.45, Branch::parallel, 0.1)),
                  std::runtime_error);
}
