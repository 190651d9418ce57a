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

#include "qdsim/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "qdsim/analytics.hpp"
#include "qdsim/checks.hpp"
#include "qdsim/config.hpp"
#include "qdsim/montecarlo.hpp"
#include "qdsim/version.hpp"
#include "qdsim/wavefield.hpp"

namespace qdsim::cli {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& subcommand, const std::string& out_path) {
  RunManifest m;
  m.subcommand = subcommand;
  m.output_path = out_path;
  m.tool_version = kVersion;
  m.timestamp = utc_timestamp();
  return m;
}

// Manifest goes next to the results when there is a results file, otherwise
// onto stdout as a commented block.
void emit_manifest(const RunManifest& m, std::ostream& out) {
  if (!m.output_path.empty()) {
    const std::string path = m.output_path + ".manifest";
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write manifest file '" + path + "'");
    m.write(f);
  } else {
    out << '\n';
    m.write(out, /*with_timestamp=*/false);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  return f;
}

SimConfig<double> read_sim_config(KeyValueConfig& kv,
                                  std::optional<std::uint64_t> seed_override,
                                  RunManifest& manifest) {
  kv.require("seed");
  kv.require("snr_grid_db");
  SimConfig<double> cfg;
  cfg.seed = kv.get_u64("seed");
  if (seed_override) cfg.seed = *seed_override;
  cfg.order_x = static_cast<int>(kv.get_int_or("mx", 2));
  cfg.order_y = static_cast<int>(kv.get_int_or("my", 2));
  cfg.theta_x = kv.get_angle_or("theta_x", 0.0);
  cfg.theta_y = kv.get_angle_or("theta_y", 0.0);
  cfg.snr_grid_db = kv.get_real_list("snr_grid_db");
  cfg.min_errors = kv.get_int_or("min_errors", 100);
  cfg.max_trials_per_point = kv.get_int_or("max_trials", 100'000'000);
  cfg.gain = {kv.get_real_or("h_re", 1.0), kv.get_real_or("h_im", 0.0)};
  cfg.initial_phase = kv.get_angle_or("phi0", 0.0);
  kv.ensure_all_consumed();
  ensure_valid(cfg);

  manifest.resolved = {{"seed", std::to_string(cfg.seed)},
                       {"mx", std::to_string(cfg.order_x)},
                       {"my", std::to_string(cfg.order_y)},
                       {"theta_x", fmt_real(cfg.theta_x)},
                       {"theta_y", fmt_real(cfg.theta_y)}};
  std::string grid;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
    grid += (i ? "," : "") + fmt_real(cfg.snr_grid_db[i]);
  manifest.resolved.emplace_back("snr_grid_db", grid);
  manifest.resolved.emplace_back("min_errors", std::to_string(cfg.min_errors));
  manifest.resolved.emplace_back("max_trials", std::to_string(cfg.max_trials_per_point));
  manifest.resolved.emplace_back("h_re", fmt_real(cfg.gain.real()));
  manifest.resolved.emplace_back("h_im", fmt_real(cfg.gain.imag()));
  manifest.resolved.emplace_back("phi0", fmt_real(cfg.initial_phase));
  return cfg;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

void RunManifest::write(std::ostream& os, bool with_timestamp) const {
  os << "# qdsim run manifest\n";
  os << "# subcommand: " << subcommand << '\n';
  os << "# tool_version: " << tool_version << '\n';
  if (with_timestamp) os << "# generated_at: " << timestamp << '\n';
  if (!output_path.empty()) os << "# output: " << output_path << '\n';
  for (const auto& [key, value] : resolved) os << key << " = " << value << '\n';
}

int cmd_ber_sweep(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto kv = KeyValueConfig::parse_file(args.config_path);
    auto manifest = make_manifest("ber-sweep", args.output_path);
    const auto cfg = read_sim_config(kv, args.seed_override, manifest);
    const auto rows = run_sweep(cfg);
    auto f = open_output(args.output_path);
    write_sweep_csv(f, rows);
    emit_manifest(manifest, out);
    out << "ber-sweep: " << rows.size() << " points -> " << args.output_path
        << " (seed " << cfg.seed << ")\n";
    return kExitOk;
  });
}

int cmd_snr_loss(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto kv = KeyValueConfig::parse_file(args.config_path);
    kv.require("target_ber");
    const double target = kv.get_real("target_ber");
    const double theta_x = kv.get_angle("theta_x");
    const double theta_y = kv.get_angle("theta_y");
    const Averaging averaging = parse_averaging(kv.get_string_or("averaging", "worst_case"));
    kv.ensure_all_consumed();

    const double loss_x =
        snr_loss_at_ber<double>({target, Branch::parallel, theta_x, averaging});
    const double loss_y =
        snr_loss_at_ber<double>({target, Branch::perpendicular, theta_y, averaging});

    char row[96];
    std::snprintf(row, sizeof(row), "%-15s%11s%10s\n", "branch", "theta_rad", "loss_db");
    out << row;
    std::snprintf(row, sizeof(row), "%-15s%11.6f%10.2f\n", "parallel", theta_x, loss_x);
    out << row;
    std::snprintf(row, sizeof(row), "%-15s%11.6f%10.2f\n", "perpendicular", theta_y,
                  loss_y);
    out << row;

    auto manifest = make_manifest("snr-loss", args.output_path);
    manifest.resolved = {{"target_ber", fmt_real(target)},
                         {"theta_x", fmt_real(theta_x)},
                         {"theta_y", fmt_real(theta_y)},
                         {"averaging", to_string(averaging)}};
    if (!args.output_path.empty()) {
      auto f = open_output(args.output_path);
      f << "branch,theta_rad,target_ber,averaging,loss_db\n";
      f << "parallel," << fmt_real(theta_x) << ',' << fmt_real(target) << ','
        << to_string(averaging) << ',' << fmt_real(loss_x) << '\n';
      f << "perpendicular," << fmt_real(theta_y) << ',' << fmt_real(target) << ','
        << to_string(averaging) << ',' << fmt_real(loss_y) << '\n';
    }
    emit_manifest(manifest, out);
    return kExitOk;
  });
}

int cmd_qd_spectrum(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto kv = KeyValueConfig::parse_file(args.config_path);
    kv.require("q_antennas");
    kv.require("dwell_time");
    kv.require("duration");
    const int q_count = static_cast<int>(kv.get_int("q_antennas"));
    const double wavelength = kv.get_real_or("wavelength", 1.0);
    if (q_count < 2) throw ConfigError("q_antennas must be at least 2");
    if (!(wavelength > 0)) throw ConfigError("wavelength must be positive");
    const double spacing = kv.get_real_or("spacing", wavelength / q_count);
    if (std::abs(q_count * spacing - wavelength) > 1e-9 * wavelength)
      throw ConfigError("antenna layout violates the Qd = lambda constraint: Q * "
                        "spacing must equal the wavelength");
    const double dwell = kv.get_real("dwell_time");
    const int spd = static_cast<int>(kv.get_int_or("samples_per_dwell", 8));
    if (spd < 4)
      throw ConfigError("samples_per_dwell below 4 undersamples the stepped sweep");
    const double duration = kv.get_real("duration");
    const double amplitude = kv.get_real_or("amplitude", 1.0);
    const double phi0 = kv.get_angle_or("phi0", 0.0);
    kv.ensure_all_consumed();

    const WaveModel<double> model{0.0, wavelength, 0.0, amplitude};
    const QdEmulationConfig<double> emu{ArrayGeometry<double>::uniform(q_count, wavelength),
                                        dwell, spd, phi0};
    const auto samples = qd_stepped_signal(emu, model, duration);
    const double sample_rate = spd / dwell;
    const double estimated = estimate_shift(samples, sample_rate);
    const double expected = spacing / dwell / wavelength;  // v_x / lambda
    const double bin = sample_rate / double(samples.size());

    auto f = open_output(args.output_path);
    const auto [freq, mag] = spectrum_bins(samples, sample_rate);
    f << "bin_hz,magnitude\n";
    for (Eigen::Index i = 0; i < freq.size(); ++i)
      f << fmt_real(freq(i)) << ',' << fmt_real(mag(i)) << '\n';

    char line[160];
    std::snprintf(line, sizeof(line),
                  "estimated shift: %.6g Hz (expected v_x/lambda = %.6g Hz, bin width "
                  "%.6g Hz)\n",
                  estimated, expected, bin);
    out << line;

    auto manifest = make_manifest("qd-spectrum", args.output_path);
    manifest.resolved = {{"q_antennas", std::to_string(q_count)},
                         {"wavelength", fmt_real(wavelength)},
                         {"spacing", fmt_real(spacing)},
                         {"dwell_time", fmt_real(dwell)},
                         {"samples_per_dwell", std::to_string(spd)},
                         {"duration", fmt_real(duration)},
                         {"amplitude", fmt_real(amplitude)},
                         {"phi0", fmt_real(phi0)}};
    emit_manifest(manifest, out);
    return kExitOk;
  });
}

int cmd_validate(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CheckOptions opt;
    if (!args.config_path.empty()) {
      auto kv = KeyValueConfig::parse_file(args.config_path);
      opt.seed = kv.has("seed") ? kv.get_u64("seed") : opt.seed;
      opt.theta_x = kv.get_angle_or("theta_x", opt.theta_x);
      opt.theta_y = kv.get_angle_or("theta_y", opt.theta_y);
      kv.ensure_all_consumed();
    }
    if (args.seed_override) opt.seed = *args.seed_override;

    const auto results = run_all_checks(opt);
    int failures = 0;
    for (const auto& r : results) {
      out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
      if (!r.pass) ++failures;
    }
    out << results.size() - failures << '/' << results.size() << " checks passed\n";

    auto manifest = make_manifest("validate", "");
    manifest.resolved = {{"seed", std::to_string(opt.seed)},
                         {"theta_x", fmt_real(opt.theta_x)},
                         {"theta_y", fmt_real(opt.theta_y)}};
    emit_manifest(manifest, out);
    return failures == 0 ? kExitOk : kExitFailure;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"link-level simulator for quasi-Doppler two-direction phase modulation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs sweep_args, loss_args, spectrum_args, validate_args;

  auto* sweep = app.add_subcommand("ber-sweep", "Monte-Carlo BER sweep over both branches");
  sweep->add_option("--config", sweep_args.config_path, "configuration file")->required();
  sweep->add_option("--out", sweep_args.output_path, "output CSV path")->required();
  sweep->add_option("--seed", sweep_args.seed_override, "override the config seed");

  auto* loss = app.add_subcommand("snr-loss", "analytic SNR loss of the deviated geometry");
  loss->add_option("--config", loss_args.config_path, "configuration file")->required();
  loss->add_option("--out", loss_args.output_path, "optional output CSV path");
  loss->add_option("--seed", loss_args.seed_override,
                   "accepted for interface uniformity; this subcommand draws no randomness");

  auto* spectrum = app.add_subcommand("qd-spectrum",
                                      "spectrum of the switched-antenna stepped signal");
  spectrum->add_option("--config", spectrum_args.config_path, "configuration file")->required();
  spectrum->add_option("--out", spectrum_args.output_path, "output CSV path")->required();
  spectrum->add_option("--seed", spectrum_args.seed_override,
                       "accepted for interface uniformity; this subcommand draws no randomness");

  auto* validate = app.add_subcommand("validate", "run the built-in cross-check suite");
  validate->add_option("--config", validate_args.config_path, "optional configuration file");
  validate->add_option("--seed", validate_args.seed_override, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (sweep->parsed()) return cmd_ber_sweep(sweep_args, std::cout, std::cerr);
  if (loss->parsed()) return cmd_snr_loss(loss_args, std::cout, std::cerr);
  if (spectrum->parsed()) return cmd_qd_spectrum(spectrum_args, std::cout, std::cerr);
  if (validate->parsed()) return cmd_validate(validate_args, std::cout, std::cerr);
  return kExitConfig;
}

}  // namespace qdsim::cli
