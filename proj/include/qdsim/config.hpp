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

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qdsim/types.hpp"

namespace qdsim {

/// Flat `key = value` configuration with `#` comments.  Angle-valued keys
/// accept a `_deg` suffix for degrees; the bare key means radians.  Typed
/// getters mark keys as consumed so a command can reject strays afterwards.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_stream(in, path);
  }

  static KeyValueConfig parse_stream(std::istream& in, const std::string& name) {
    KeyValueConfig cfg;
    cfg.source_ = name;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(name + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
      if (cfg.entries_.count(key))
        throw ConfigError(name + ":" + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
      cfg.entries_[key] = Entry{value, line_no, false};
    }
    return cfg;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& source() const { return source_; }

  std::string get_string(const std::string& key) {
    return entry(key).value;
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
  }

  double get_real(const std::string& key) {
    const Entry& e = entry(key);
    return to_real(e.value, key, e.line);
  }

  double get_real_or(const std::string& key, double fallback) {
    return has(key) ? get_real(key) : fallback;
  }

  std::int64_t get_int(const std::string& key) {
    const Entry& e = entry(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0')
      throw ConfigError(where(e.line) + ": key '" + key +
                        "' is not an integer: '" + e.value + "'");
    return v;
  }

  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) {
    return has(key) ? get_int(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) {
    const Entry& e = entry(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0' ||
        e.value.find('-') != std::string::npos)
      throw ConfigError(where(e.line) + ": key '" + key +
                        "' is not an unsigned integer: '" + e.value + "'");
    return v;
  }

  /// Comma-separated list of reals.
  std::vector<double> get_real_list(const std::string& key) {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty())
        throw ConfigError(where(e.line) + ": key '" + key + "' has an empty element");
      out.push_back(to_real(t, key, e.line));
    }
    if (out.empty())
      throw ConfigError(where(e.line) + ": key '" + key + "' is an empty list");
    return out;
  }

  /// Angle in radians from either `<key>` (radians) or `<key>_deg` (degrees).
  double get_angle_or(const std::string& key, double fallback_rad) {
    const std::string deg_key = key + "_deg";
    if (has(key) && has(deg_key))
      throw ConfigError(source_ + ": keys '" + key + "' and '" + deg_key +
                        "' are mutually exclusive");
    if (has(deg_key)) return get_real(deg_key) * pi_v<double> / 180.0;
    if (has(key)) return get_real(key);
    return fallback_rad;
  }

  double get_angle(const std::string& key) {
    if (!has(key) && !has(key + "_deg"))
      throw ConfigError(source_ + ": missing required key '" + key + "' (or '" +
                        key + "_deg')");
    return get_angle_or(key, 0.0);
  }

  void require(const std::string& key) const {
    if (!has(key))
      throw ConfigError(source_ + ": missing required key '" + key + "'");
  }

  /// Reject any key no getter has touched; names the first offender.
  void ensure_all_consumed() const {
    for (const auto& [key, e] : entries_)
      if (!e.consumed)
        throw ConfigError(where(e.line) + ": unknown key '" + key + "'");
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
  };

  Entry& entry(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError(source_ + ": missing required key '" + key + "'");
    it->second.consumed = true;
    return it->second;
  }

  double to_real(const std::string& text, const std::string& key, int line) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end == text.c_str() || *end != '\0')
      throw ConfigError(where(line) + ": key '" + key + "' is not a number: '" +
                        text + "'");
    return v;
  }

  std::string where(int line) const {
    return source_ + ":" + std::to_string(line);
  }

  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
  }

  std::map<std::string, Entry> entries_;
  std::string source_ = "<config>";
};

}  // namespace qdsim
