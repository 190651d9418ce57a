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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qdsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;   // checks failed, solver did not converge
inline constexpr int kExitConfig = 2;    // bad usage, bad config file

/// Record of one invocation: the resolved key = value pairs are themselves a
/// loadable config that reproduces the run.  The timestamp is omitted when a
/// manifest goes to stdout so that identical runs print identical bytes.
struct RunManifest {
  std::string subcommand;
  std::string output_path;
  std::string tool_version;
  std::string timestamp;
  std::vector<std::pair<std::string, std::string>> resolved;

  void write(std::ostream& os, bool with_timestamp = true) const;
};

struct CommonArgs {
  std::string config_path;
  std::string output_path;
  std::optional<std::uint64_t> seed_override;
};

int cmd_ber_sweep(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_snr_loss(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_qd_spectrum(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const CommonArgs& args, std::ostream& out, std::ostream& err);

/// Full argv entry point used by the qdsim binary.
int run(int argc, char** argv);

}  // namespace qdsim::cli
