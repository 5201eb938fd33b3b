// Copyright 2026 The sable-he Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Flat key=value configuration. '#' starts a comment; blank lines are ignored.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sable/error.hpp"

namespace sable {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>") {
    KeyValueConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      detail::require(eq != std::string::npos,
                      source + ":" + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
      std::string key = trim(line.substr(0, eq));
      detail::require(!key.empty(), source + ":" + std::to_string(lineno) + ": empty key");
      detail::require(!cfg.values_.count(key), source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  static KeyValueConfig from_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static KeyValueConfig from_file(const std::string& path) {
    std::ifstream in(path);
    detail::require(static_cast<bool>(in), "config: cannot open " + path);
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    detail::require(it != values_.end(), "missing config key: " + key);
    return it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  double real(const std::string& key) const { return to_real(key, str(key)); }
  double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::int64_t integer(const std::string& key) const { return to_int(key, str(key)); }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError("config key " + key + ": expected a boolean, got '" + v + "'");
  }
  bool boolean(const std::string& key, bool fallback) const { return has(key) ? boolean(key) : fallback; }

  /// Throws on the first key not in `known`.
  void reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_) {
      detail::require(known.count(k) != 0, "unknown config key: " + k);
    }
  }

  static double to_real(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config key " + key + ": expected a number, got '" + v + "'");
  }

  static std::int64_t to_int(const std::string& key, const std::string& v) {
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    detail::require(ec == std::errc{} && ptr == v.data() + v.size(),
                    "config key " + key + ": expected an integer, got '" + v + "'");
    return x;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

/// Splits "a,b,c" into trimmed pieces.
inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace sable
