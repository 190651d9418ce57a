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
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>
#include <vector>

#include "qdsim/analytics.hpp"
#include "qdsim/channel.hpp"
#include "qdsim/modem.hpp"
#include "qdsim/random.hpp"
#include "qdsim/types.hpp"

namespace qdsim {

/// One BER-vs-SNR experiment: both receivers, ideal or deviated geometry.
template <typename Scalar>
struct SimConfig {
  std::uint64_t seed{1};
  int order_x{2};
  int order_y{2};
  Scalar theta_x{0};
  Scalar theta_y{0};
  std::vector<Scalar> snr_grid_db;
  std::int64_t min_errors{100};
  std::int64_t max_trials_per_point{100'000'000};
  Complex<Scalar> gain{1, 0};
  Scalar initial_phase{0};
};

template <typename Scalar>
void ensure_valid(const SimConfig<Scalar>& cfg) {
  if (cfg.snr_grid_db.empty())
    throw std::invalid_argument("snr grid must not be empty");
  for (std::size_t i = 1; i < cfg.snr_grid_db.size(); ++i)
    if (!(cfg.snr_grid_db[i] > cfg.snr_grid_db[i - 1]))
      throw std::invalid_argument("snr grid must be strictly increasing");
  if (cfg.min_errors < 10)
    throw std::invalid_argument("min_errors must be at least 10");
  if (cfg.max_trials_per_point < 1)
    throw std::invalid_argument("max_trials must be positive");
  if (cfg.order_x < 2 || !std::has_single_bit(unsigned(cfg.order_x)) ||
      cfg.order_y < 2 || !std::has_single_bit(unsigned(cfg.order_y)))
    throw std::invalid_argument("constellation orders must be powers of two >= 2");
  if (cfg.gain == Complex<Scalar>{})
    throw std::invalid_argument("channel gain must be nonzero");
  for (Scalar theta : {cfg.theta_x, cfg.theta_y})
    if (!(theta >= Scalar(0) && theta <= pi_v<Scalar> / Scalar(4)))
      throw std::invalid_argument("deviation angles must lie in [0, pi/4]");
}

/// One measured point.  `trials` counts demodulated bits (for BPSK, one per
/// symbol), so ber == errors / trials at any order.  `ci95_halfwidth` is the
/// normal-approximation binomial interval; when no errors were seen before
/// the trial cap, ber is 0 and ci95 carries the rule-of-three upper bound.
template <typename Scalar>
struct BerPoint {
  Scalar snr_db{};
  std::int64_t trials{};
  std::int64_t errors{};
  Scalar ber{};
  Scalar ci95_halfwidth{};
};

template <typename Scalar>
struct SweepRow {
  Branch branch;
  BerPoint<Scalar> point;
};

/// Worker cap: QD_SIM_THREADS if set (>= 1), else hardware concurrency.
/// Never affects results, only wall-clock time.
inline int resolve_worker_count() {
  if (const char* env = std::getenv("QD_SIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

namespace detail {

// Everything one trial needs, precomputed once per point.
template <typename Scalar>
struct PointContext {
  PskConstellation<Scalar> cx;
  PskConstellation<Scalar> cy;
  ArrayGeometry<Scalar> array;
  ChannelConfig<Scalar> channel;
  Complex<Scalar> pilot;
  Scalar noise_density;
  std::uint64_t seed;
  std::uint32_t stream;
  Branch branch;
  BitWord mask_x;
  BitWord mask_y;

  std::int64_t run_trial(std::uint64_t trial) const {
    CounterRng rng(seed, stream, trial);
    const BitWord bits_x = rng.next_u32() & mask_x;
    const BitWord bits_y = rng.next_u32() & mask_y;
    const auto symbol = joint_modulate(bits_x, bits_y, cx, cy, array);
    const auto noise = awgn_sample(noise_density, rng);
    const Complex<Scalar> rx = branch == Branch::parallel
                                   ? transmit_parallel(symbol, channel, noise)
                                   : transmit_perpendicular(symbol, channel, noise);
    const auto& c_rx = branch == Branch::parallel ? cx : cy;
    const BitWord sent = branch == Branch::parallel ? bits_x : bits_y;
    const BitWord decided = hard_demodulate(rx, c_rx, pilot);
    return std::popcount(sent ^ decided);
  }
};

// Bit errors over [first, last), split statically across `workers` threads.
// Error counts are integers, so the total is scheduling-independent.
template <typename Scalar>
std::int64_t count_errors(const PointContext<Scalar>& ctx, std::uint64_t first,
                          std::uint64_t last, int workers) {
  const std::uint64_t total = last - first;
  const int used = static_cast<int>(
      std::min<std::uint64_t>(std::max(workers, 1), std::max<std::uint64_t>(total, 1)));
  if (used == 1) {
    std::int64_t errors = 0;
    for (std::uint64_t t = first; t < last; ++t) errors += ctx.run_trial(t);
    return errors;
  }
  std::vector<std::int64_t> partial(used, 0);
  std::vector<std::thread> pool;
  pool.reserve(used);
  const std::uint64_t chunk = total / used;
  const std::uint64_t rem = total % used;
  std::uint64_t start = first;
  for (int w = 0; w < used; ++w) {
    const std::uint64_t len = chunk + (std::uint64_t(w) < rem ? 1 : 0);
    const std::uint64_t lo = start, hi = start + len;
    start = hi;
    pool.emplace_back([&ctx, &partial, w, lo, hi] {
      std::int64_t errors = 0;
      for (std::uint64_t t = lo; t < hi; ++t) errors += ctx.run_trial(t);
      partial[std::size_t(w)] = errors;
    });
  }
  for (auto& th : pool) th.join();
  std::int64_t errors = 0;
  for (std::int64_t e : partial) errors += e;
  return errors;
}

}  // namespace detail

/// Estimate the BER of one branch at one grid point.  Trials accumulate in
/// fixed batches until min_errors bit errors are seen or the trial cap is
/// hit; each trial's randomness is derived from (seed, branch, snr index,
/// trial index), so the result is identical for any worker count.
template <typename Scalar>
BerPoint<Scalar> run_ber_point(const SimConfig<Scalar>& cfg, Scalar snr_db,
                               Branch branch, int workers = 0) {
  ensure_valid(cfg);
  int snr_index = -1;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
    if (std::abs(cfg.snr_grid_db[i] - snr_db) <= Scalar(1e-12)) snr_index = int(i);
  if (snr_index < 0)
    throw std::invalid_argument("snr_db is not a point of the configured grid");

  detail::PointContext<Scalar> ctx{
      PskConstellation<Scalar>(cfg.order_x),
      PskConstellation<Scalar>(cfg.order_y),
      ArrayGeometry<Scalar>::for_constellations(PskConstellation<Scalar>(cfg.order_x),
                                                PskConstellation<Scalar>(cfg.order_y),
                                                Scalar(1)),
      ChannelConfig<Scalar>{branch, cfg.gain, cfg.initial_phase,
                            branch == Branch::parallel ? cfg.theta_x : cfg.theta_y,
                            db_to_linear(snr_db)},
      {},
      {},
      cfg.seed,
      std::uint32_t(snr_index) * 2u + (branch == Branch::perpendicular ? 1u : 0u),
      branch,
      BitWord(cfg.order_x - 1),
      BitWord(cfg.order_y - 1)};
  ensure_valid(ctx.channel);
  ctx.pilot = ctx.channel.pilot_estimate();
  ctx.noise_density = ctx.channel.noise_density(Scalar(1));

  const int worker_count = workers > 0 ? workers : resolve_worker_count();
  constexpr std::int64_t kBatch = 1 << 16;  // stopping decisions at batch edges only
  std::int64_t symbols = 0;
  std::int64_t errors = 0;
  while (symbols < cfg.max_trials_per_point && errors < cfg.min_errors) {
    const std::int64_t batch = std::min(kBatch, cfg.max_trials_per_point - symbols);
    errors += detail::count_errors(ctx, std::uint64_t(symbols),
                                   std::uint64_t(symbols + batch), worker_count);
    symbols += batch;
  }

  const auto& c_rx = branch == Branch::parallel ? ctx.cx : ctx.cy;
  const std::int64_t bits = symbols * c_rx.bits_per_symbol();
  BerPoint<Scalar> point;
  point.snr_db = snr_db;
  point.trials = bits;
  point.errors = errors;
  point.ber = bits > 0 ? Scalar(errors) / Scalar(bits) : Scalar(0);
  if (errors > 0)
    point.ci95_halfwidth =
        Scalar(1.96) * std::sqrt(point.ber * (Scalar(1) - point.ber) / Scalar(bits));
  else
    point.ci95_halfwidth = bits > 0 ? Scalar(3) / Scalar(bits) : Scalar(0);
  return point;
}

/// Full sweep: both branches over the whole SNR grid, rows ordered
/// (branch, snr ascending).  Byte-for-byte reproducible for a fixed seed.
template <typename Scalar>
std::vector<SweepRow<Scalar>> run_sweep(const SimConfig<Scalar>& cfg, int workers = 0) {
  ensure_valid(cfg);
  std::vector<SweepRow<Scalar>> rows;
  rows.reserve(2 * cfg.snr_grid_db.size());
  for (Branch branch : {Branch::parallel, Branch::perpendicular})
    for (Scalar snr : cfg.snr_grid_db)
      rows.push_back({branch, run_ber_point(cfg, snr, branch, workers)});
  return rows;
}

namespace detail {

inline std::string format_real(double value, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

}  // namespace detail

/// CSV emission, one row per sweep entry.
template <typename Scalar>
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow<Scalar>>& rows) {
  os << "branch,snr_db,trials,errors,ber,ci95\n";
  for (const auto& row : rows) {
    const auto& p = row.point;
    os << to_string(row.branch) << ',' << detail::format_real(double(p.snr_db), "%g")
       << ',' << p.trials << ',' << p.errors << ','
       << detail::format_real(double(p.ber), "%.9e") << ','
       << detail::format_real(double(p.ci95_halfwidth), "%.9e") << '\n';
  }
}

}  // namespace qdsim
