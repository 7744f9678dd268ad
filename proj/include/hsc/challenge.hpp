// hsc/challenge.hpp

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
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/error.hpp"
#include "hsc/levels.hpp"

namespace hsc {

inline constexpr double kPassThreshold = 0.3;
inline constexpr double kMaxMeanRtf = 3.0;
inline constexpr int kMaxSubmissions = 3;

/// Strictly below the threshold, or strictly below the noisy CER when the
/// noisy data already beats the threshold.
inline bool level_passes(double submission_mean_cer, double noisy_mean_cer, double threshold = kPassThreshold) {
  if (noisy_mean_cer < threshold) return submission_mean_cer < noisy_mean_cer;
  return submission_mean_cer < threshold;
}

inline double compute_rtf(double processing_seconds, double audio_seconds) {
  if (!(audio_seconds > 0.0)) fail(ErrorKind::ZeroLengthAudio, "RTF needs audio length > 0");
  if (!(processing_seconds >= 0.0)) fail(ErrorKind::InvalidSpec, "processing time must be >= 0");
  return processing_seconds / audio_seconds;
}

inline double mean_rtf(std::span<const double> per_file) {
  if (per_file.empty()) fail(ErrorKind::EmptyBatch, "mean RTF of no files");
  return std::accumulate(per_file.begin(), per_file.end(), 0.0) / static_cast<double>(per_file.size());
}

struct LevelResult {
  LevelId id;
  double mean_cer = 0.0;
  bool sanity_check = false;  // judged manually, never computed
  std::optional<double> mean_rtf;
};

struct LevelOutcome {
  LevelId id;
  double mean_cer = 0.0;
  double noisy_mean_cer = 0.0;
  bool passed = false;
  bool sanity_check = false;
  bool credited = false;
};

struct ScoreCard {
  std::string team;
  std::vector<LevelOutcome> levels;  // ordered by level id
  int points = 0;
  std::optional<double> tie_break;   // mean CER over credited levels
  std::optional<double> mean_rtf;
  int submission_number = 1;
  std::vector<std::string> notes;
};

/// One point per passed level with the sanity flag set. Levels are scored
/// independently; a credited level above an uncredited one in the same task
/// is reported as a progression gap rather than penalized.
inline ScoreCard score_submission(std::span<const LevelResult> results, const LevelRegistry& registry,
                                  std::string team = {}, int submission_number = 1) {
  ScoreCard card;
  card.team = std::move(team);
  card.submission_number = submission_number;
  std::vector<LevelResult> sorted(results.begin(), results.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) fail(ErrorKind::InvalidSpec, "level " + sorted[i].id.str() + " reported twice");
  }

  double credited_cer = 0.0;
  std::vector<double> rtfs;
  for (const auto& r : sorted) {
    const auto& spec = registry.at(r.id);
    if (!(r.mean_cer >= 0.0)) fail(ErrorKind::InvalidSpec, r.id.str() + ": mean CER must be >= 0");
    LevelOutcome o;
    o.id = r.id;
    o.mean_cer = r.mean_cer;
    o.noisy_mean_cer = spec.recorded_mean_cer;
    o.passed = level_passes(r.mean_cer, spec.recorded_mean_cer);
    o.sanity_check = r.sanity_check;
    o.credited = o.passed && o.sanity_check;
    if (o.credited) {
      ++card.points;
      credited_cer += r.mean_cer;
    }
    if (o.passed && !o.sanity_check) card.notes.push_back(r.id.str() + " passed but has no sanity check; no point");
    if (r.mean_rtf) rtfs.push_back(*r.mean_rtf);
    card.levels.push_back(o);
  }
  if (card.points > 0) card.tie_break = credited_cer / card.points;
  if (!rtfs.empty()) {
    card.mean_rtf = mean_rtf(rtfs);
    if (*card.mean_rtf > kMaxMeanRtf) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "mean RTF %.3f exceeds the limit of %.0f", *card.mean_rtf, kMaxMeanRtf);
      card.notes.emplace_back(buf);
    }
  }

  // Progression gaps: credited levels above a lower level of the same task
  // that was failed or not submitted.
  std::map<int, int> highest;
  for (const auto& o : card.levels) {
    if (o.credited) highest[o.id.task] = std::max(highest[o.id.task], o.id.level);
  }
  for (const auto& [task, top] : highest) {
    for (int level = 1; level < top; ++level) {
      const LevelId id{task, level};
      if (!registry.contains(id)) continue;
      const auto it = std::find_if(card.levels.begin(), card.levels.end(), [&](const auto& o) { return o.id == id; });
      if (it == card.levels.end()) {
        card.notes.push_back("progression gap: " + id.str() + " not submitted below credited " + LevelId{task, top}.str());
      } else if (!it->credited) {
        card.notes.push_back("progression gap: " + id.str() + " not credited below credited " + LevelId{task, top}.str());
      }
    }
  }
  if (submission_number > kMaxSubmissions) {
    card.notes.push_back("submission " + std::to_string(submission_number) + " exceeds the maximum of " +
                         std::to_string(kMaxSubmissions));
  }
  return card;
}

/// Indices of `cards` ordered by points (descending), then tie_break
/// (ascending). Stable for exact ties.
inline std::vector<std::size_t> rank_teams(std::span<const ScoreCard> cards) {
  std::vector<std::size_t> order(cards.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = cards[a];
    const auto& y = cards[b];
    if (x.points != y.points) return x.points > y.points;
    if (x.tie_break && y.tie_break) return *x.tie_break < *y.tie_break;
    return false;
  });
  return order;
}

// Results file: one line per level, e.g. "T1L3 mean_cer=0.21 sanity=1 rtf=0.4".
inline std::vector<LevelResult> parse_level_results(std::string_view text) {
  std::vector<LevelResult> out;
  for (const auto& entry : parse_key_value_table(text)) {
    LevelResult r;
    r.id = parse_level_id(entry.name);
    r.mean_cer = entry.number("mean_cer");
    const std::string sanity = entry.get_or("sanity", "0");
    if (sanity == "1" || sanity == "yes" || sanity == "true") {
      r.sanity_check = true;
    } else if (sanity != "0" && sanity != "no" && sanity != "false") {
      fail(ErrorKind::InvalidConfig, entry.name + ": sanity must be 0/1, yes/no or true/false");
    }
    if (entry.has("rtf")) r.mean_rtf = entry.number("rtf");
    out.push_back(r);
  }
  return out;
}

inline std::string format_number(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string render_scorecard_csv(const ScoreCard& card) {
  std::string out = "level,mean_cer,noisy_mean_cer,passed,sanity_check,credited\n";
  for (const auto& o : card.levels) {
    out += o.id.str() + "," + format_number(o.mean_cer) + "," + format_number(o.noisy_mean_cer) + "," +
           (o.passed ? "1" : "0") + "," + (o.sanity_check ? "1" : "0") + "," + (o.credited ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string render_report(const ScoreCard& card) {
  std::string out;
  if (!card.team.empty()) out += "team: " + card.team + "\n";
  out += "submission: " + std::to_string(card.submission_number) + "\n";
  for (const auto& o : card.levels) {
    out += "  " + o.id.str() + "  cer " + format_number(o.mean_cer, "%.4f") + "  bar " +
           format_number(std::min(o.noisy_mean_cer, kPassThreshold), "%.4f") + "  " +
           (o.credited ? "point" : o.passed ? "pass, no sanity check" : "fail") + "\n";
  }
  out += "points: " + std::to_string(card.points) + "\n";
  out += "tie-break: " + (card.tie_break ? format_number(*card.tie_break, "%.4f") : std::string("n/a")) + "\n";
  if (card.mean_rtf) out += "mean RTF: " + format_number(*card.mean_rtf, "%.3f") + "\n";
  for (const auto& n : card.notes) out += "note: " + n + "\n";
  return out;
}

}  // namespace hsc
