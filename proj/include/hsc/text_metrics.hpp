// hsc/text_metrics.hpp

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
#include <filesystem>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/error.hpp"

namespace hsc {

using VariantMap = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline constexpr std::string_view kVariantPairs = R"(# british american
colour color
favour favor
honour honor
labour labor
neighbour neighbor
behaviour behavior
harbour harbor
humour humor
flavour flavor
rumour rumor
vapour vapor
armour armor
grey gray
centre center
theatre theater
metre meter
litre liter
fibre fiber
calibre caliber
sombre somber
defence defense
offence offense
licence license
catalogue catalog
dialogue dialog
analogue analog
travelled traveled
travelling traveling
cancelled canceled
cancelling canceling
jewellery jewelry
plough plow
aluminium aluminum
analyse analyze
analysed analyzed
analysing analyzing
paralyse paralyze
centred centered
)";

// Stems taking the -ise/-ize alternation. Expanded into explicit word pairs
// so the map never rewrites unrelated words ending in "ise" (wise, noise).
inline constexpr std::string_view kIseStems[] = {
    "real",   "organ",     "recogn",   "apolog", "critic",   "emphas",  "memor",    "summar",  "priorit",
    "author", "character", "civil",    "special", "sympath", "util",    "visual",   "minim",   "maxim",
    "optim",  "global",    "normal",   "final",   "author",  "categor", "standard", "modern",  "symbol",
    "agon",   "familiar",  "fantas",   "harmon",  "human",   "idol",    "ideal",    "legal",   "material",
    "mobil",  "neutral",   "patron",  "polar",   "popular", "scrutin",  "stabil",  "steril",
    "subsid", "terror",    "theor",    "tranquil", "vandal", "vapor",   "central",  "capital", "colon",
};

inline constexpr std::string_view kIseSuffixes[][2] = {
    {"isations", "izations"}, {"isation", "ization"}, {"ising", "izing"}, {"ised", "ized"},
    {"ises", "izes"},         {"iser", "izer"},       {"isers", "izers"}, {"ise", "ize"},
};

inline bool is_lower_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace detail

inline void validate_variant_map(const VariantMap& map) {
  for (const auto& [from, to] : map) {
    if (!detail::is_lower_word(from) || !detail::is_lower_word(to)) {
      fail(ErrorKind::InvalidVariantMap, "variant pair '" + from + "' -> '" + to + "' must be non-empty lowercase letters");
    }
  }
}

/// Two whitespace-separated columns per line (british american); '#' comments.
inline VariantMap parse_variant_map(std::string_view text) {
  VariantMap map;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string from, to, extra;
    if (!(tokens >> from)) continue;
    if (!(tokens >> to) || (tokens >> extra)) {
      fail(ErrorKind::InvalidVariantMap, "variant map line " + std::to_string(line_no) + ": expected two columns");
    }
    map.emplace_back(std::move(from), std::move(to));
  }
  validate_variant_map(map);
  return map;
}

inline VariantMap load_variant_map(const std::filesystem::path& path) { return parse_variant_map(read_text_file(path)); }

/// Shipped starter list. Non-normative: the organizers' list is unpublished.
inline const VariantMap& default_variant_map() {
  static const VariantMap map = [] {
    VariantMap m = parse_variant_map(detail::kVariantPairs);
    for (auto stem : detail::kIseStems) {
      for (const auto& sfx : detail::kIseSuffixes) {
        std::pair<std::string, std::string> p{std::string(stem) + std::string(sfx[0]), std::string(stem) + std::string(sfx[1])};
        if (std::find(m.begin(), m.end(), p) == m.end()) m.push_back(std::move(p));
      }
    }
    return m;
  }();
  return map;
}

/// Renders a variant map in the two-column file format.
inline std::string render_variant_map(const VariantMap& map) {
  std::string out = "# british american\n";
  for (const auto& [from, to] : map) out += from + " " + to + "\n";
  return out;
}

struct NormalizationConfig {
  bool lowercase = true;
  bool strip_non_letters = true;
  VariantMap variant_map = default_variant_map();
};

namespace detail {

// One left-to-right pass, longest key first at each position.
inline std::string substitute_once(std::string_view text, const VariantMap& by_length) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const std::pair<std::string, std::string>* hit = nullptr;
    for (const auto& entry : by_length) {
      if (text.compare(i, entry.first.size(), entry.first) == 0) {
        hit = &entry;
        break;
      }
    }
    if (hit) {
      out += hit->second;
      i += hit->first.size();
    } else {
      out += text[i++];
    }
  }
  return out;
}

inline std::string substitute(std::string text, const VariantMap& by_length) {
  // Bounded fixpoint; a well-formed map converges in one or two passes.
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = substitute_once(text, by_length);
    if (next == text) break;
    text = std::move(next);
  }
  return text;
}

}  // namespace detail

/// Lowercase, substitute spelling variants, strip everything but letters.
/// Substitution is repeated after stripping so the result is idempotent.
inline std::string normalize_text(std::string_view raw, const NormalizationConfig& config = {}) {
  std::string text(raw);
  if (config.lowercase) {
    for (char& c : text) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  VariantMap by_length = config.variant_map;
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  if (!by_length.empty()) text = detail::substitute(std::move(text), by_length);
  if (config.strip_non_letters) {
    std::erase_if(text, [](char c) { return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')); });
    if (!by_length.empty()) text = detail::substitute(std::move(text), by_length);
  }
  return text;
}

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t total() const noexcept { return substitutions + deletions + insertions; }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

/// Unit-cost Levenshtein. Among minimal scripts the backtrace takes
/// substitution, then deletion, then insertion.
inline EditCounts edit_counts(std::string_view reference, std::string_view hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts c;
  c.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++c.substitutions;
        --i, --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

struct CerResult {
  double cer = 0.0;
  EditCounts counts;
  bool empty_hypothesis_rule_applied = false;
};

/// (S + D + I) / N over normalized text; an empty normalized hypothesis
/// scores exactly 1. Not clamped.
inline CerResult cer(std::string_view reference, std::string_view hypothesis, const NormalizationConfig& config = {}) {
  const std::string ref = normalize_text(reference, config);
  const std::string hyp = normalize_text(hypothesis, config);
  if (ref.empty()) fail(ErrorKind::EmptyReference, "reference is empty after normalization");
  CerResult r;
  r.counts = edit_counts(ref, hyp);
  if (hyp.empty()) {
    r.cer = 1.0;
    r.empty_hypothesis_rule_applied = true;
  } else {
    r.cer = static_cast<double>(r.counts.total()) / static_cast<double>(r.counts.reference_length);
  }
  return r;
}

inline double mean_cer(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyBatch, "mean CER of an empty batch");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

inline double mean_cer(std::span<const CerResult> records) {
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(r.cer);
  return mean_cer(values);
}

}  // namespace hsc
