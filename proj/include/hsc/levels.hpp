// hsc/levels.hpp

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

#include <algorithm>
#include <compare>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/error.hpp"

namespace hsc {

/// Challenge level identifier, rendered as "TXLY".
struct LevelId {
  int task = 1;
  int level = 1;

  std::string str() const { return "T" + std::to_string(task) + "L" + std::to_string(level); }

  friend auto operator<=>(const LevelId&, const LevelId&) = default;
};

// Strict "T<digit>L<digits>" with a non-zero level. Whether the level exists
// is a registry question, not a parsing one.
inline LevelId parse_level_id(std::string_view text) {
  auto malformed = [&] { fail(ErrorKind::MalformedId, "'" + std::string(text) + "' is not of the form TXLY"); };
  if (text.size() < 4 || text[0] != 'T' || text[2] != 'L') malformed();
  if (text[1] < '1' || text[1] > '9') malformed();
  const auto digits = text.substr(3);
  if (digits.empty() || digits.size() > 6 ||
      !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    malformed();
  }
  LevelId id;
  id.task = text[1] - '0';
  id.level = static_cast<int>(*parse_long(digits));
  if (id.level < 1) malformed();
  return id;
}

struct LevelSpec {
  LevelId id;
  std::string material;
  std::optional<double> distance_m;
  double gain_pct = 0.0;
  double volume_pct = 0.0;
  double total_length_s = 0.0;
  double clean_mean_cer = 0.0;
  double recorded_mean_cer = 0.0;
  std::optional<LevelId> clean_data_alias;

  // Zenodo folder name, e.g. "Task_1_Level_3".
  std::string folder() const { return "Task_" + std::to_string(id.task) + "_Level_" + std::to_string(id.level); }
};

// Shipped registry. Columns are tab-separated:
//   id material distance_m gain_pct volume_pct total_length_s clean_mean_cer recorded_mean_cer clean_data_alias
// "-" marks an empty cell. data/levels.tsv carries the same table.
inline constexpr std::string_view kDefaultLevelTable =
    "# id\tmaterial\tdistance_m\tgain_pct\tvolume_pct\ttotal_length_s\tclean_mean_cer\trecorded_mean_cer\tclean_data_alias\n"
    "T1L1\t-\t-\t5\t75\t2876\t0.00760\t0.0419\t-\n"
    "T1L2\t1 layer foam\t-\t5\t75\t2960\t0.00695\t0.0772\t-\n"
    "T1L3\tT1L2 + 1 layer foam\t-\t20\t60\t2922\t0.00581\t0.343\t-\n"
    "T1L4\tT1L3 + paper towels + 1 layer foam\t-\t20\t60\t2974\t0.00737\t0.730\t-\n"
    "T1L5\tT1L4 + cardboard\t-\t30\t60\t3118\t0.00739\t0.910\t-\n"
    "T1L6\tT1L5 + matches\t-\t40\t60\t2945\t0.00727\t0.973\t-\n"
    "T1L7\tT1L6\t-\t50\t50\t2975\t0.00742\t0.972\t-\n"
    "T2L1\t-\t1\t50\t80\t3000\t0.00817\t0.126\t-\n"
    "T2L2\t-\t5\t55\t80\t2643\t0.00899\t0.474\t-\n"
    "T2L3\t-\t10\t60\t80\t2762\t0.00962\t0.557\t-\n"
    "T3L1\tT1L2\t5\t55\t80\t2643\t0.00899\t0.918\tT2L2\n"
    "T3L2\tT1L4\t10\t60\t80\t2762\t0.00962\t1.00\tT2L3\n";

/// Immutable after construction; safe to share across threads.
class LevelRegistry {
 public:
  LevelRegistry() = default;
  explicit LevelRegistry(std::vector<LevelSpec> levels) : levels_(std::move(levels)) {
    std::sort(levels_.begin(), levels_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  }

  static LevelRegistry parse(std::string_view text) {
    std::vector<LevelSpec> levels;
    std::istringstream in{std::string(text)};
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty() || trim(line).front() == '#') continue;
      const auto cells = split(line, '\t');
      auto bad = [&](const std::string& why) {
        fail(ErrorKind::InvalidConfig, "level table line " + std::to_string(line_no) + ": " + why);
      };
      if (cells.size() != 9) bad("expected 9 tab-separated columns");
      auto num = [&](const std::string& cell) {
        const auto v = parse_double(cell);
        if (!v) bad("'" + cell + "' is not a number");
        return *v;
      };
      LevelSpec spec;
      spec.id = parse_level_id(trim(cells[0]));
      spec.material = std::string(trim(cells[1]));
      if (trim(cells[2]) != "-") spec.distance_m = num(cells[2]);
      spec.gain_pct = num(cells[3]);
      spec.volume_pct = num(cells[4]);
      spec.total_length_s = num(cells[5]);
      spec.clean_mean_cer = num(cells[6]);
      spec.recorded_mean_cer = num(cells[7]);
      if (trim(cells[8]) != "-") spec.clean_data_alias = parse_level_id(trim(cells[8]));
      levels.push_back(std::move(spec));
    }
    return LevelRegistry(std::move(levels));
  }

  static LevelRegistry load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

  static const LevelRegistry& builtin() {
    static const LevelRegistry registry = parse(kDefaultLevelTable);
    return registry;
  }

  const std::vector<LevelSpec>& levels() const noexcept { return levels_; }

  bool contains(const LevelId& id) const noexcept { return lookup(id) != nullptr; }

  const LevelSpec& at(const LevelId& id) const {
    const LevelSpec* spec = lookup(id);
    if (!spec) fail(ErrorKind::UnknownLevel, id.str() + " is not in the level registry");
    return *spec;
  }

  // Level whose clean folder holds this level's clean data.
  LevelId clean_source(const LevelId& id) const {
    const auto& spec = at(id);
    return spec.clean_data_alias.value_or(spec.id);
  }

 private:
  const LevelSpec* lookup(const LevelId& id) const noexcept {
    for (const auto& spec : levels_) {
      if (spec.id == id) return &spec;
    }
    return nullptr;
  }

  std::vector<LevelSpec> levels_;
};

}  // namespace hsc
