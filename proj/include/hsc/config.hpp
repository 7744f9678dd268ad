// hsc/config.hpp

// Copyright 2026  The hsc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/error.hpp"

namespace hsc {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One entry per line: a name followed by whitespace-separated key=value
// pairs. '#' starts a comment. Entry order is preserved.
struct KeyValueEntry {
  std::string name;
  std::map<std::string, std::string> values;
  int line = 0;

  bool has(const std::string& key) const { return values.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) fail(ErrorKind::InvalidConfig, name + " (line " + std::to_string(line) + "): missing key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  double number(const std::string& key) const {
    const auto v = parse_double(get(key));
    if (!v) fail(ErrorKind::InvalidConfig, name + ": key '" + key + "' is not a number");
    return *v;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    const std::string& raw = get(key);
    if (trim(raw).empty() || raw == "none") return out;
    for (const auto& part : split(raw, ',')) {
      const auto v = parse_double(part);
      if (!v) fail(ErrorKind::InvalidConfig, name + ": key '" + key + "' has a non-numeric element");
      out.push_back(*v);
    }
    return out;
  }
};

inline std::vector<KeyValueEntry> parse_key_value_table(std::string_view text) {
  std::vector<KeyValueEntry> entries;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;
    KeyValueEntry entry;
    entry.name = token;
    entry.line = line_no;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        fail(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected key=value, got '" + token + "'");
      }
      entry.values[token.substr(0, eq)] = token.substr(eq + 1);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace hsc
