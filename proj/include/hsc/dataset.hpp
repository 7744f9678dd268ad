// hsc/dataset.hpp

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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/dsp.hpp"
#include "hsc/error.hpp"
#include "hsc/levels.hpp"
#include "hsc/signal.hpp"
#include "hsc/text_metrics.hpp"

namespace hsc {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Transcript tables

enum class TranscriptSeparator { Tab, Whitespace };

inline const char* to_string(TranscriptSeparator s) { return s == TranscriptSeparator::Tab ? "tab" : "whitespace"; }

struct TranscriptEntry {
  std::string filename;
  std::string text;
  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct TranscriptTable {
  std::vector<TranscriptEntry> entries;
  TranscriptSeparator separator = TranscriptSeparator::Tab;

  const TranscriptEntry* find(std::string_view filename) const {
    for (const auto& e : entries) {
      if (e.filename == filename) return &e;
    }
    return nullptr;
  }
};

/// One "filename<sep>text" entry per line. If any line has a tab, tab is the
/// separator for the whole file; otherwise the first whitespace run is.
inline TranscriptTable parse_transcripts_text(std::string_view content) {
  std::vector<std::pair<int, std::string>> lines;
  {
    std::istringstream in{std::string(content)};
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      lines.emplace_back(line_no, std::move(line));
    }
  }
  TranscriptTable table;
  const bool tabbed = std::any_of(lines.begin(), lines.end(), [](const auto& l) { return l.second.find('\t') != std::string::npos; });
  table.separator = tabbed ? TranscriptSeparator::Tab : TranscriptSeparator::Whitespace;
  std::set<std::string> seen;
  for (const auto& [line_no, line] : lines) {
    const auto body = trim(line);
    const auto cut = tabbed ? body.find('\t') : body.find_first_of(" \t");
    auto unparseable = [&, no = line_no] {
      fail(ErrorKind::UnparseableLine, "transcript line " + std::to_string(no) + ": expected '<filename>" +
                                           (tabbed ? "<tab>" : " ") + "<text>'");
    };
    if (cut == std::string_view::npos) unparseable();
    TranscriptEntry e{std::string(trim(body.substr(0, cut))), std::string(trim(body.substr(cut + 1)))};
    if (e.filename.empty() || e.text.empty()) unparseable();
    if (!seen.insert(e.filename).second) {
      fail(ErrorKind::DuplicateFilename, "transcript line " + std::to_string(line_no) + ": duplicate filename " + e.filename);
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

inline TranscriptTable parse_transcripts(const fs::path& path) { return parse_transcripts_text(read_text_file(path)); }

inline std::string render_transcripts(const TranscriptTable& table) {
  std::string out;
  const char sep = table.separator == TranscriptSeparator::Tab ? '\t' : ' ';
  for (const auto& e : table.entries) out += e.filename + sep + e.text + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// RFC 4180 records; quoted fields may hold commas, quotes and newlines.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) fail(ErrorKind::UnparseableLine, "csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Reads the recognizer output contract: header "filename,transcription".
inline std::map<std::string, std::string> parse_transcription_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].size() < 2 || trim(rows[0][0]) != "filename" || trim(rows[0][1]) != "transcription") {
    fail(ErrorKind::UnparseableLine, "transcription csv: expected header 'filename,transcription'");
  }
  std::map<std::string, std::string> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2) fail(ErrorKind::UnparseableLine, "transcription csv row " + std::to_string(r + 1) + ": two columns expected");
    if (!out.emplace(rows[r][0], rows[r][1]).second) {
      fail(ErrorKind::DuplicateFilename, "transcription csv: duplicate filename " + rows[r][0]);
    }
  }
  return out;
}

inline std::map<std::string, std::string> load_transcription_csv(const fs::path& path) {
  return parse_transcription_csv(read_text_file(path));
}

inline std::string render_transcription_csv(const std::map<std::string, std::string>& transcripts) {
  std::string out = "filename,transcription\n";
  for (const auto& [file, text] : transcripts) out += csv_field(file) + "," + csv_field(text) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Directory evaluation

enum class RowStatus { Ok, MissingAudio, MissingTranscript };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::MissingAudio: return "missing_audio";
    case RowStatus::MissingTranscript: return "missing_transcript";
  }
  return "?";
}

struct EvaluationRow {
  std::string filename;
  std::string reference;
  std::string hypothesis;
  CerResult result;
  RowStatus status = RowStatus::Ok;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;  // ordered by filename
  double mean_cer = 0.0;
};

/// Scores every table entry. A missing hypothesis counts as empty (CER 1);
/// audio absent from audio_dir is flagged on the row but still scored.
inline EvaluationReport evaluate_directory(const fs::path& audio_dir, const TranscriptTable& table,
                                           const std::map<std::string, std::string>& transcripts,
                                           const NormalizationConfig& config = {}) {
  if (table.entries.empty()) fail(ErrorKind::EmptyBatch, "transcript table is empty");
  EvaluationReport report;
  for (const auto& e : table.entries) {
    EvaluationRow row;
    row.filename = e.filename;
    row.reference = e.text;
    const auto it = transcripts.find(e.filename);
    if (it != transcripts.end()) {
      row.hypothesis = it->second;
    } else {
      row.status = RowStatus::MissingTranscript;
    }
    if (!fs::is_regular_file(audio_dir / e.filename)) row.status = RowStatus::MissingAudio;
    row.result = cer(row.reference, row.hypothesis, config);
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) { return a.filename < b.filename; });
  std::vector<CerResult> results;
  for (const auto& r : report.rows) results.push_back(r.result);
  report.mean_cer = mean_cer(std::span<const CerResult>(results));
  return report;
}

inline std::string format_cer(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Extended report (filename,reference,transcription,cer,status plus a MEAN
/// row) or, in strict mode, the transcription-only contract.
inline std::string render_evaluation_csv(const EvaluationReport& report, bool strict = false) {
  std::string out = strict ? "filename,transcription\n" : "filename,reference,transcription,cer,status\n";
  for (const auto& r : report.rows) {
    if (strict) {
      out += csv_field(r.filename) + "," + csv_field(r.hypothesis) + "\n";
    } else {
      out += csv_field(r.filename) + "," + csv_field(r.reference) + "," + csv_field(r.hypothesis) + "," +
             format_cer(r.result.cer) + "," + to_string(r.status) + "\n";
    }
  }
  if (!strict) out += "MEAN,,," + format_cer(report.mean_cer) + ",\n";
  return out;
}

// ---------------------------------------------------------------------------
// Data preparation

struct CerRecord {
  std::string filename;
  double cer = 0.0;
};

/// Drops the ceil(fraction * n) worst records. Among equal CERs the
/// lexicographically later filename goes first. Kept names stay in input order.
inline std::vector<std::string> clean_outliers(std::span<const CerRecord> records, double fraction = 0.05) {
  if (!(fraction >= 0.0 && fraction < 1.0)) fail(ErrorKind::InvalidSpec, "outlier fraction must lie in [0, 1)");
  const std::size_t n = records.size();
  const auto drop = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].cer != records[b].cer) return records[a].cer > records[b].cer;
    return records[a].filename > records[b].filename;
  });
  std::vector<bool> dropped(n, false);
  for (std::size_t i = 0; i < std::min(drop, n); ++i) dropped[order[i]] = true;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (!dropped[i]) kept.push_back(records[i].filename);
  }
  return kept;
}

inline constexpr double kPrepLeadSeconds = 0.5;
inline constexpr double kPrepTrailSeconds = 0.5;
inline constexpr double kPrepConvolutionTrailSeconds = 5.0;

struct PrepOptions {
  double target_peak_dbfs = -1.0;
};

/// Resample to 16 kHz, peak-normalize, pad 0.5 s lead and 0.5 s trail
/// (5 s when the clip is meant for convolution with a long response).
inline AudioClip prepare_clean_clip(const AudioClip& raw, bool for_convolution, const PrepOptions& opt = {}) {
  AudioClip clip = raw.sample_rate_hz() == kChallengeRate ? raw : resample(raw, kChallengeRate);
  clip = normalize_peak(clip, opt.target_peak_dbfs);
  return pad(clip, kPrepLeadSeconds, for_convolution ? kPrepConvolutionTrailSeconds : kPrepTrailSeconds);
}

// ---------------------------------------------------------------------------
// Layout

enum class FileRole { Clean, Recorded, Transcript, Measurement, Unknown };

inline const char* to_string(FileRole r) {
  switch (r) {
    case FileRole::Clean: return "clean";
    case FileRole::Recorded: return "recorded";
    case FileRole::Transcript: return "transcript";
    case FileRole::Measurement: return "measurement";
    case FileRole::Unknown: return "unknown";
  }
  return "?";
}

struct LayoutOptions {
  std::string clean_folder = "Clean";
  std::string recorded_folder = "Recorded";
  // Case-insensitive substrings marking measurement recordings and IRs.
  std::vector<std::string> measurement_patterns = {"sweep", "noise", "burst", "impulse", "_ir"};
  bool strict = false;
};

struct LevelLayout {
  LevelId id;
  fs::path dir;
  fs::path clean_dir;  // resolved through the registry's clean-data alias
  fs::path recorded_dir;
  std::optional<fs::path> text_file;
  std::vector<std::pair<fs::path, FileRole>> files;  // relative to dir, sorted

  std::size_t count(FileRole role) const {
    return static_cast<std::size_t>(std::count_if(files.begin(), files.end(), [&](const auto& f) { return f.second == role; }));
  }
};

struct DatasetLayout {
  fs::path root;
  std::vector<LevelLayout> levels;

  const LevelLayout* find(const LevelId& id) const {
    for (const auto& l : levels) {
      if (l.id == id) return &l;
    }
    return nullptr;
  }
};

inline std::string level_folder_name(const LevelId& id) {
  return "Task_" + std::to_string(id.task) + "_Level_" + std::to_string(id.level);
}

inline std::string text_file_name(const LevelId& id) { return level_folder_name(id) + "_text_samples.txt"; }

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline FileRole classify(const fs::path& rel, const LayoutOptions& opt) {
  const std::string first = lower(rel.begin()->string());
  const std::string name = lower(rel.filename().string());
  const std::string ext = lower(rel.extension().string());
  const bool nested = std::distance(rel.begin(), rel.end()) > 1;
  for (const auto& p : opt.measurement_patterns) {
    if (name.find(lower(p)) != std::string::npos) return FileRole::Measurement;
  }
  if (nested && ext == ".wav" && first == lower(opt.clean_folder)) return FileRole::Clean;
  if (nested && ext == ".wav" && first == lower(opt.recorded_folder)) return FileRole::Recorded;
  if (!nested && ext == ".txt") return FileRole::Transcript;
  return FileRole::Unknown;
}

}  // namespace detail

/// Finds Task_X_Level_Y folders under root. Strict mode requires every
/// registry level with its clean and recorded folders, text file, and no
/// unclassified files.
inline DatasetLayout discover_layout(const fs::path& root, const LevelRegistry& registry, const LayoutOptions& opt = {}) {
  if (!fs::is_directory(root)) fail(ErrorKind::IoFailure, "dataset root " + root.string() + " is not a directory");
  DatasetLayout layout;
  layout.root = root;
  for (const auto& spec : registry.levels()) {
    const fs::path dir = root / level_folder_name(spec.id);
    if (!fs::is_directory(dir)) {
      if (opt.strict) fail(ErrorKind::MissingAudioFile, "missing level folder " + dir.string());
      continue;
    }
    LevelLayout level;
    level.id = spec.id;
    level.dir = dir;
    level.clean_dir = root / level_folder_name(registry.clean_source(spec.id)) / opt.clean_folder;
    level.recorded_dir = dir / opt.recorded_folder;
    if (fs::is_regular_file(dir / text_file_name(spec.id))) level.text_file = dir / text_file_name(spec.id);
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), dir);
      const auto role = detail::classify(rel, opt);
      if (role == FileRole::Transcript && !level.text_file) level.text_file = entry.path();
      level.files.emplace_back(rel, role);
    }
    std::sort(level.files.begin(), level.files.end());
    if (opt.strict) {
      auto need = [&](bool ok, const std::string& what) {
        if (!ok) fail(ErrorKind::MissingAudioFile, spec.id.str() + ": " + what);
      };
      need(fs::is_directory(level.recorded_dir), "no recorded folder");
      need(fs::is_directory(level.clean_dir), "no clean folder at " + level.clean_dir.string());
      need(level.text_file.has_value(), "no transcript file");
      need(level.count(FileRole::Unknown) == 0, "unclassified files present");
    }
    layout.levels.push_back(std::move(level));
  }
  return layout;
}

/// Transcript filenames without a same-named audio file in `audio_dir`.
inline std::vector<std::string> missing_audio(const TranscriptTable& table, const fs::path& audio_dir) {
  std::vector<std::string> out;
  for (const auto& e : table.entries) {
    if (!fs::is_regular_file(audio_dir / e.filename)) out.push_back(e.filename);
  }
  return out;
}

/// Sorted .wav files directly inside `dir`.
inline std::vector<fs::path> list_wav_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && detail::lower(entry.path().extension().string()) == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hsc
