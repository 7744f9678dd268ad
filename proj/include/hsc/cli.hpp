// hsc/cli.hpp

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

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hsc/audio_io.hpp"
#include "hsc/challenge.hpp"
#include "hsc/config.hpp"
#include "hsc/corruption.hpp"
#include "hsc/dataset.hpp"
#include "hsc/deconv.hpp"
#include "hsc/dsp.hpp"
#include "hsc/error.hpp"
#include "hsc/fetch.hpp"
#include "hsc/levels.hpp"
#include "hsc/system_id.hpp"
#include "hsc/text_metrics.hpp"

namespace hsc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum Exit : int { kOk = 0, kUsage = 1, kDataError = 2, kPartialFailure = 3 };

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::Usage || e.kind() == ErrorKind::MalformedId ? kUsage : kDataError;
}

struct Io {
  std::ostream& out;
  std::ostream& err;
};

[[noreturn]] inline void usage(const std::string& what) { fail(ErrorKind::Usage, what); }

// Runs f(i) for i in [0, n) on up to `jobs` threads. f must not throw.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

// FNV-1a, used to derive per-file seeds independent of processing order.
inline std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline void require_dir(const fs::path& p, const std::string& what) {
  if (!fs::is_directory(p)) usage(what + " " + p.string() + " is not a directory");
}

inline void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) usage(what + " " + p.string() + " does not exist");
}

inline AudioClip to_challenge_rate(AudioClip clip) {
  if (clip.sample_rate_hz() == kChallengeRate) return clip;
  return resample(clip, kChallengeRate);
}

// ------------------------------------------------------------ IR files

inline fs::path sidecar_path(const fs::path& ir_wav) { return fs::path(ir_wav.string() + ".json"); }

/// Writes the taps peak-normalized as 16-bit PCM and the scale factor, plus
/// `meta`, to a JSON sidecar next to it.
inline void save_ir_file(const ImpulseResponse& ir, const fs::path& path, json meta = json::object()) {
  double peak = 0.0;
  for (double t : ir.taps()) peak = std::max(peak, std::abs(t));
  if (peak == 0.0) fail(ErrorKind::DegenerateKernel, "impulse response is all zeros");
  std::vector<double> norm(ir.taps().begin(), ir.taps().end());
  for (double& t : norm) t /= peak;
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  write_wav(AudioClip(std::move(norm), ir.sample_rate_hz()), path, WavSpec{16, 1, ir.sample_rate_hz()});
  meta["scale"] = peak;
  meta["sample_rate_hz"] = ir.sample_rate_hz();
  meta["ir_length"] = ir.size();
  std::ofstream(sidecar_path(path)) << meta.dump(2) << "\n";
}

inline ImpulseResponse load_ir_file(const fs::path& path) {
  const auto clip = read_wav(path);
  double scale = 1.0;
  if (fs::is_regular_file(sidecar_path(path))) {
    try {
      scale = json::parse(read_text_file(sidecar_path(path))).value("scale", 1.0);
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidConfig, sidecar_path(path).string() + ": " + e.what());
    }
  }
  std::vector<double> taps(clip.samples().begin(), clip.samples().end());
  for (double& t : taps) t *= scale;
  return ImpulseResponse(std::move(taps), clip.sample_rate_hz());
}

// ------------------------------------------------------ enhance config

// One line per level: an IR source (ir=<wav, relative to this file> or
// preset=<level> for the synthetic corruption preset), the Wiener noise
// power and an optional frame size for framed deconvolution.
inline constexpr std::string_view kDefaultEnhanceConfig = R"(# level  ir=FILE | preset=LEVEL [seed=N]  lambda=NOISE_POWER  [frame=SAMPLES]
T1L1 preset=T1L1 lambda=1e-3
T1L2 preset=T1L2 lambda=1e-3
T1L3 preset=T1L3 lambda=3e-3
T1L4 preset=T1L4 lambda=3e-3
T1L5 preset=T1L5 lambda=1e-2
T1L6 preset=T1L6 lambda=1e-2
T1L7 preset=T1L7 lambda=1e-2
T2L1 preset=T2L1 lambda=1e-2
T2L2 preset=T2L2 lambda=3e-2
T2L3 preset=T2L3 lambda=3e-2
T3L1 preset=T3L1 lambda=3e-2
T3L2 preset=T3L2 lambda=3e-2
)";

struct EnhanceSetting {
  LevelId level;
  std::optional<fs::path> ir_file;
  std::optional<LevelId> preset;
  std::uint64_t preset_seed = 0;
  double lambda = 1e-3;
  std::optional<int> frame_size;
};

class EnhanceConfig {
 public:
  static EnhanceConfig parse(std::string_view text, const fs::path& base_dir = {}) {
    EnhanceConfig cfg;
    for (const auto& e : parse_key_value_table(text)) {
      EnhanceSetting s;
      s.level = parse_level_id(e.name);
      if (e.has("ir") == e.has("preset")) {
        fail(ErrorKind::InvalidConfig, e.name + " (line " + std::to_string(e.line) + "): give exactly one of ir= or preset=");
      }
      if (e.has("ir")) {
        const fs::path p = e.get("ir");
        s.ir_file = p.is_absolute() ? p : base_dir / p;
      } else {
        s.preset = parse_level_id(e.get("preset"));
        s.preset_seed = static_cast<std::uint64_t>(e.number_or("seed", 0));
      }
      s.lambda = e.number_or("lambda", s.lambda);
      if (!(s.lambda >= 0.0)) fail(ErrorKind::InvalidConfig, e.name + ": lambda must be >= 0");
      if (e.has("frame")) s.frame_size = static_cast<int>(e.number("frame"));
      for (const auto& prev : cfg.settings_) {
        if (prev.level == s.level) fail(ErrorKind::InvalidConfig, e.name + " configured twice");
      }
      cfg.settings_.push_back(std::move(s));
    }
    return cfg;
  }

  static EnhanceConfig load(const fs::path& path) { return parse(read_text_file(path), path.parent_path()); }

  static const EnhanceConfig& builtin() {
    static const EnhanceConfig cfg = parse(kDefaultEnhanceConfig);
    return cfg;
  }

  const EnhanceSetting& at(const LevelId& id) const {
    for (const auto& s : settings_) {
      if (s.level == id) return s;
    }
    fail(ErrorKind::UnknownLevel, "no enhancement settings for " + id.str());
  }

  const std::vector<EnhanceSetting>& settings() const noexcept { return settings_; }

 private:
  std::vector<EnhanceSetting> settings_;
};

inline ImpulseResponse resolve_ir(const EnhanceSetting& s, const PresetTable& presets = PresetTable()) {
  if (s.ir_file) return load_ir_file(*s.ir_file);
  return detail::preset_ir(*s.preset, presets, s.preset_seed);
}

/// Deconvolves `recorded` with the level IR and peak-normalizes to -1 dBFS.
/// The recording is zero-extended by len(ir) - 1 so the output keeps the
/// input length.
inline AudioClip enhance_clip(const AudioClip& recorded, const ImpulseResponse& ir, const EnhanceSetting& s) {
  auto x = to_challenge_rate(recorded);
  std::vector<double> padded(x.samples().begin(), x.samples().end());
  const std::size_t n = padded.size();
  padded.resize(n + ir.size() - 1, 0.0);
  auto y = wiener_deconvolve(AudioClip(std::move(padded), kChallengeRate), ir, WienerParams{s.lambda, s.frame_size});
  if (peak_abs(y.samples()) == 0.0) return y;
  return normalize_peak(y, -1.0);
}

// ------------------------------------------------------------- enhance

struct EnhanceArgs {
  fs::path input_dir;
  fs::path output_dir;
  std::string task_id;
  std::optional<fs::path> config;
  int jobs = 1;
};

struct FileOutcome {
  std::string name;
  bool ok = false;
  std::string error;
  double rtf = 0.0;
};

inline bool same_directory(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  return fs::exists(a) && fs::exists(b) && fs::equivalent(a, b, ec);
}

inline int run_enhance(const EnhanceArgs& args, Io io) {
  require_dir(args.input_dir, "input folder");
  const LevelId level = parse_level_id(args.task_id);
  if (same_directory(args.input_dir, args.output_dir)) usage("output folder must differ from the input folder");
  const EnhanceConfig cfg = args.config ? EnhanceConfig::load(*args.config) : EnhanceConfig::builtin();
  const auto& setting = cfg.at(level);
  const ImpulseResponse ir = resolve_ir(setting);

  const auto files = list_wav_files(args.input_dir);
  fs::create_directories(args.output_dir);
  if (files.empty()) {
    io.err << "warning: no .wav files in " << args.input_dir.string() << "\n";
    return kOk;
  }
  std::vector<FileOutcome> outcomes(files.size());
  parallel_for(files.size(), args.jobs, [&](std::size_t i) {
    auto& o = outcomes[i];
    o.name = files[i].filename().string();
    try {
      const auto clip = read_wav(files[i]);
      if (clip.empty()) fail(ErrorKind::ZeroLengthAudio, "empty recording");
      const auto t0 = std::chrono::steady_clock::now();
      const auto out = enhance_clip(clip, ir, setting);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_wav(out, args.output_dir / o.name);
      o.rtf = compute_rtf(secs, clip.duration_seconds());
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });

  std::vector<double> rtfs;
  std::size_t failed = 0;
  for (const auto& o : outcomes) {
    if (o.ok) {
      rtfs.push_back(o.rtf);
      io.err << o.name << "  rtf " << fmt("%.4f", o.rtf) << "\n";
    } else {
      ++failed;
      io.err << o.name << "  FAILED: " << o.error << "\n";
    }
  }
  io.out << level.str() << ": enhanced " << rtfs.size() << " of " << files.size() << " files\n";
  if (!rtfs.empty()) {
    const double mean = mean_rtf(rtfs);
    io.err << "mean rtf " << fmt("%.4f", mean) << (mean > kMaxMeanRtf ? " (above the limit of 3)" : "") << "\n";
  }
  return failed ? kPartialFailure : kOk;
}

// ------------------------------------------------------------ evaluate

struct EvaluateArgs {
  fs::path audio_dir;
  fs::path text_file;
  fs::path output_csv;
  std::optional<fs::path> transcripts;
  std::optional<std::string> asr_command;
  std::optional<fs::path> variant_map;
  bool strict = false;
  int verbose = 0;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

inline int run_evaluate(const EvaluateArgs& args, Io io) {
  require_file(args.text_file, "text file");
  require_dir(args.audio_dir, "audio folder");
  const auto table = parse_transcripts(args.text_file);
  std::map<std::string, std::string> hyps;
  if (args.transcripts) {
    require_file(*args.transcripts, "transcription CSV");
    hyps = load_transcription_csv(*args.transcripts);
  } else if (args.asr_command) {
    // Adapter contract: COMMAND AUDIO_DIR OUTPUT_CSV writes filename,transcription.
    const fs::path tmp = fs::temp_directory_path() / ("hsc-asr-" + std::to_string(name_hash(args.output_csv.string())) +
                                                      "-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) + ".csv");
    const std::string cmd = *args.asr_command + " " + shell_quote(args.audio_dir.string()) + " " + shell_quote(tmp.string());
    const int rc = std::system(cmd.c_str());
    if (rc != 0 || !fs::is_regular_file(tmp)) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorKind::IoFailure, "transcription command failed: " + cmd);
    }
    hyps = load_transcription_csv(tmp);
    fs::remove(tmp);
  } else {
    usage("evaluate needs --transcripts or --asr_command");
  }

  NormalizationConfig norm;
  if (args.variant_map) norm.variant_map = load_variant_map(*args.variant_map);
  const auto report = evaluate_directory(args.audio_dir, table, hyps, norm);
  if (!args.output_csv.parent_path().empty()) fs::create_directories(args.output_csv.parent_path());
  std::ofstream(args.output_csv, std::ios::binary | std::ios::trunc) << render_evaluation_csv(report, args.strict);

  io.out << "separator: " << to_string(table.separator) << "\n";
  if (args.verbose > 0) {
    for (const auto& r : report.rows) {
      io.out << r.filename << "  cer " << format_cer(r.result.cer) << "  " << to_string(r.status) << "\n";
    }
  }
  std::size_t flagged = 0;
  for (const auto& r : report.rows) flagged += r.status != RowStatus::Ok;
  if (flagged) io.err << "warning: " << flagged << " rows have missing audio or transcripts\n";
  io.out << "mean CER: " << format_cer(report.mean_cer) << " over " << report.rows.size() << " files\n";
  return kOk;
}

// ------------------------------------------------------------- corrupt

struct CorruptArgs {
  fs::path input;
  fs::path output;
  std::string task_id;
  std::uint64_t seed = 0;
  std::optional<fs::path> presets;
  std::optional<fs::path> registry;
  std::optional<fs::path> write_ir;
  bool prepare = false;
  int jobs = 1;
};

inline AudioClip corrupt_clip(const AudioClip& clean, const CorruptionModel& model, const LevelId& level,
                              std::uint64_t seed, const std::string& name, bool prepare) {
  AudioClip x = prepare ? prepare_clean_clip(clean, false) : to_challenge_rate(clean);
  return apply_corruption(x, model, detail::mix_seed(seed, level, name_hash(name)));
}

inline int run_corrupt(const CorruptArgs& args, Io io) {
  const LevelId level = parse_level_id(args.task_id);
  const auto registry = args.registry ? LevelRegistry::load(*args.registry) : LevelRegistry::builtin();
  const auto presets = args.presets ? PresetTable::load(*args.presets) : PresetTable();
  const auto model = make_level_model(level, registry, args.seed, presets);
  if (args.write_ir) save_ir_file(model.ir, *args.write_ir, json{{"level", level.str()}, {"seed", args.seed}});

  if (fs::is_regular_file(args.input)) {
    if (!args.output.parent_path().empty()) fs::create_directories(args.output.parent_path());
    const auto name = args.input.filename().string();
    write_wav(corrupt_clip(read_wav(args.input), model, level, args.seed, name, args.prepare), args.output);
    io.out << level.str() << ": corrupted 1 file (delay " << fmt("%.4f", model.delay_seconds) << " s)\n";
    return kOk;
  }
  require_dir(args.input, "input");
  if (same_directory(args.input, args.output)) usage("output folder must differ from the input folder");
  const auto files = list_wav_files(args.input);
  fs::create_directories(args.output);
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), args.jobs, [&](std::size_t i) {
    const auto name = files[i].filename().string();
    try {
      write_wav(corrupt_clip(read_wav(files[i]), model, level, args.seed, name, args.prepare), args.output / name);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "error";
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (errors[i].empty()) continue;
    ++failed;
    io.err << files[i].filename().string() << "  FAILED: " << errors[i] << "\n";
  }
  if (files.empty()) io.err << "warning: no .wav files in " << args.input.string() << "\n";
  io.out << level.str() << ": corrupted " << files.size() - failed << " of " << files.size() << " files (delay "
         << fmt("%.4f", model.delay_seconds) << " s)\n";
  return failed ? kPartialFailure : kOk;
}

// --------------------------------------------------------- estimate-ir

struct EstimateIrArgs {
  std::optional<std::string> emit;  // sweep, noise or burst
  std::optional<fs::path> recording;
  std::optional<fs::path> reference;
  fs::path out;
  std::string method = "sweep";
  std::size_t length = 4096;
  std::uint64_t seed = 0;
  double noise_seconds = 10.0;
  std::optional<double> regularization;
  SweepSpec sweep;
};

inline json sweep_json(const SweepSpec& s) {
  return json{{"f_min_hz", s.f_min_hz},         {"f_max_hz", s.f_max_hz},
              {"duration_seconds", s.duration_seconds}, {"sample_rate_hz", s.sample_rate_hz},
              {"pad_lead_seconds", s.pad_lead_seconds}, {"pad_trail_seconds", s.pad_trail_seconds}};
}

inline int run_estimate_ir(const EstimateIrArgs& args, Io io) {
  if (!args.out.parent_path().empty()) fs::create_directories(args.out.parent_path());
  if (args.emit) {
    AudioClip probe;
    if (*args.emit == "sweep") {
      probe = synth_sweep(args.sweep);
    } else if (*args.emit == "noise") {
      probe = synth_noise_probe(args.noise_seconds, args.seed);
    } else if (*args.emit == "burst") {
      probe = synth_burst_probe(args.seed);
    } else {
      usage("--emit must be sweep, noise or burst");
    }
    // Headroom so the probe survives playback chains without clipping.
    write_wav(scale(probe, db_to_amplitude(-1.0)), args.out);
    io.out << "wrote " << *args.emit << " probe " << args.out.string() << " (" << fmt("%.2f", probe.duration_seconds())
           << " s)\n";
    return kOk;
  }
  if (!args.recording) usage("estimate-ir needs --emit or --recording");
  require_file(*args.recording, "recording");
  const auto recorded = to_challenge_rate(read_wav(*args.recording));
  IrEstimate est;
  json meta{{"method", args.method}};
  if (args.method == "sweep") {
    est = estimate_ir_sweep_detailed(recorded, args.sweep, args.length);
    meta["sweep"] = sweep_json(args.sweep);
    meta["detection_ratio"] = est.detection_ratio;
  } else if (args.method == "noise") {
    if (!args.reference) usage("--method noise needs --reference");
    require_file(*args.reference, "reference");
    // The probe was written with -1 dB headroom; scale cancels in the IR up to that gain.
    const auto reference = to_challenge_rate(read_wav(*args.reference));
    est = estimate_ir_noise_detailed(recorded, reference, args.length, args.regularization);
    meta["reference"] = args.reference->filename().string();
    if (args.regularization) meta["regularization"] = *args.regularization;
  } else {
    usage("--method must be sweep or noise");
  }
  meta["onset"] = est.onset;
  meta["residual_db"] = est.residual_db;
  save_ir_file(est.ir, args.out, meta);
  io.out << "wrote " << args.out.string() << " (" << est.ir.size() << " taps, onset " << est.onset << ", residual "
         << fmt("%.2f", est.residual_db) << " dB)\n";
  return kOk;
}

// --------------------------------------------------------------- score

struct ScoreArgs {
  std::vector<fs::path> results;
  std::optional<fs::path> registry;
  std::optional<fs::path> csv_dir;
  int submission = 1;
};

inline int run_score(const ScoreArgs& args, Io io) {
  if (args.results.empty()) usage("score needs at least one results file");
  const auto registry = args.registry ? LevelRegistry::load(*args.registry) : LevelRegistry::builtin();
  std::vector<ScoreCard> cards;
  for (const auto& path : args.results) {
    require_file(path, "results file");
    cards.push_back(score_submission(parse_level_results(read_text_file(path)), registry, path.stem().string(),
                                     args.submission));
  }
  for (const auto& card : cards) {
    io.out << render_report(card) << "\n";
    if (args.csv_dir) {
      fs::create_directories(*args.csv_dir);
      std::ofstream(*args.csv_dir / (card.team + ".csv"), std::ios::binary) << render_scorecard_csv(card);
    }
  }
  io.out << "ranking:\n";
  int place = 0;
  for (const auto i : rank_teams(cards)) {
    const auto& c = cards[i];
    io.out << "  " << ++place << ". " << c.team << "  points " << c.points << "  tie-break "
           << (c.tie_break ? fmt("%.4f", *c.tie_break) : std::string("n/a")) << "\n";
  }
  return kOk;
}

// --------------------------------------------------------- spectrogram

struct SpectrogramArgs {
  fs::path input;
  fs::path output;
  int window = 512;
  int hop = 128;
  std::string format = "csv";
};

inline int run_spectrogram(const SpectrogramArgs& args, Io io) {
  require_file(args.input, "input");
  const auto s = spectrogram_db(read_wav(args.input), args.window, args.hop);
  if (args.format == "csv") {
    write_spectrogram_csv(s, args.output);
  } else if (args.format == "binary") {
    write_spectrogram_binary(s, args.output);
  } else {
    usage("--format must be csv or binary");
  }
  io.out << "wrote " << s.bins << " x " << s.frames << " spectrogram to " << args.output.string() << "\n";
  return kOk;
}

// --------------------------------------------------------------- fetch

struct FetchArgs {
  fs::path manifest;
  fs::path dest;
  std::optional<fs::path> cache;
  bool offline = false;
  bool strict = false;
  int jobs = 1;
};

inline int run_fetch(const FetchArgs& args, Io io) {
  require_file(args.manifest, "manifest");
  FetchOptions opt;
  opt.cache_dir = args.cache;
  opt.offline = args.offline;
  opt.jobs = args.jobs;
  opt.layout.strict = args.strict;
  opt.log = [&](const std::string& s) { io.err << s << "\n"; };
  const auto layout = fetch_dataset(load_manifest(args.manifest), args.dest, LevelRegistry::builtin(), opt);
  io.out << "dataset root: " << layout.root.string() << "\n";
  for (const auto& level : layout.levels) {
    io.out << "  " << level.id.str() << "  recorded " << level.count(FileRole::Recorded) << "  clean "
           << level.count(FileRole::Clean) << "  transcript " << (level.text_file ? "yes" : "no") << "  unknown "
           << level.count(FileRole::Unknown) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- main

inline int main(int argc, const char* const* argv, Io io = {std::cout, std::cerr}) {
  CLI::App app{"hsc: hardware speech challenge toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hsc 1.0.0");

  FetchArgs fetch;
  auto* c_fetch = app.add_subcommand("fetch", "Download, verify and unpack the dataset");
  c_fetch->add_option("--manifest", fetch.manifest, "Checksum manifest")->required();
  c_fetch->add_option("--dest", fetch.dest, "Destination folder")->required();
  c_fetch->add_option("--cache", fetch.cache, "Archive cache (default $HSC_CACHE_DIR or DEST/.cache)");
  c_fetch->add_flag("--offline", fetch.offline, "Use cached archives only");
  c_fetch->add_flag("--strict", fetch.strict, "Require every level folder");
  c_fetch->add_option("--jobs", fetch.jobs, "Concurrent downloads")->check(CLI::PositiveNumber);

  CorruptArgs corrupt;
  auto* c_corrupt = app.add_subcommand("corrupt", "Simulate a level's hardware corruption");
  c_corrupt->add_option("input", corrupt.input, "Clean WAV file or folder")->required();
  c_corrupt->add_option("output", corrupt.output, "Output WAV file or folder")->required();
  c_corrupt->add_option("task_id", corrupt.task_id, "Level, e.g. T1L3")->required();
  c_corrupt->add_option("--seed", corrupt.seed, "Random seed");
  c_corrupt->add_option("--presets", corrupt.presets, "Corruption preset table");
  c_corrupt->add_option("--registry", corrupt.registry, "Level registry table");
  c_corrupt->add_option("--write_ir", corrupt.write_ir, "Also write the level IR as WAV + sidecar");
  c_corrupt->add_flag("--prepare", corrupt.prepare, "Resample, normalize and pad the clean clips first");
  c_corrupt->add_option("--jobs", corrupt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EstimateIrArgs est;
  auto* c_est = app.add_subcommand("estimate-ir", "Emit a probe or estimate an IR from its recording");
  c_est->add_option("--emit", est.emit, "Write a probe: sweep, noise or burst");
  c_est->add_option("--recording", est.recording, "Recorded probe");
  c_est->add_option("--reference", est.reference, "Played noise or burst probe");
  c_est->add_option("--method", est.method, "sweep or noise");
  c_est->add_option("--out", est.out, "Output WAV")->required();
  c_est->add_option("--length", est.length, "IR length in samples")->check(CLI::PositiveNumber);
  c_est->add_option("--seed", est.seed, "Noise probe seed");
  c_est->add_option("--noise_seconds", est.noise_seconds, "Noise probe duration");
  c_est->add_option("--regularization", est.regularization, "Noise method lambda");
  c_est->add_option("--f_min", est.sweep.f_min_hz, "Sweep start frequency");
  c_est->add_option("--f_max", est.sweep.f_max_hz, "Sweep end frequency");
  c_est->add_option("--duration", est.sweep.duration_seconds, "Sweep duration in seconds");

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "Enhance every recording of a level");
  c_enh->add_option("input_dir", enh.input_dir, "Folder where the input audio files are located")->required();
  c_enh->add_option("output_dir", enh.output_dir, "Folder for the enhanced files")->required();
  c_enh->add_option("task_id", enh.task_id, "Level, e.g. T1L3")->required();
  c_enh->add_option("--config", enh.config, "Level to IR and lambda bindings");
  c_enh->add_option("--jobs", enh.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score transcriptions of a folder against its text file");
  c_ev->add_option("--audio_dir", ev.audio_dir, "Audio folder")->required();
  c_ev->add_option("--text_file", ev.text_file, "Reference transcripts")->required();
  c_ev->add_option("--output_csv", ev.output_csv, "Report CSV")->required();
  c_ev->add_option("--transcripts", ev.transcripts, "filename,transcription CSV from the recognizer");
  c_ev->add_option("--asr_command", ev.asr_command, "Recognizer command run as CMD AUDIO_DIR OUT_CSV");
  c_ev->add_option("--variants", ev.variant_map, "Spelling variant map");
  c_ev->add_flag("--strict", ev.strict, "Write only filename,transcription");
  c_ev->add_option("--verbose", ev.verbose, "1 prints one line per file");

  ScoreArgs sc;
  auto* c_sc = app.add_subcommand("score", "Score and rank team results files");
  c_sc->add_option("results", sc.results, "One results file per team")->required();
  c_sc->add_option("--registry", sc.registry, "Level registry table");
  c_sc->add_option("--csv_dir", sc.csv_dir, "Write TEAM.csv score cards here");
  c_sc->add_option("--submission", sc.submission, "Submission number")->check(CLI::PositiveNumber);

  SpectrogramArgs sp;
  auto* c_sp = app.add_subcommand("spectrogram", "Export a dB spectrogram matrix");
  c_sp->add_option("input", sp.input, "Input WAV")->required();
  c_sp->add_option("output", sp.output, "Output file")->required();
  c_sp->add_option("--window", sp.window, "Window size");
  c_sp->add_option("--hop", sp.hop, "Hop size");
  c_sp->add_option("--format", sp.format, "csv or binary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, io.out, io.err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_fetch) return run_fetch(fetch, io);
    if (*c_corrupt) return run_corrupt(corrupt, io);
    if (*c_est) return run_estimate_ir(est, io);
    if (*c_enh) return run_enhance(enh, io);
    if (*c_ev) return run_evaluate(ev, io);
    if (*c_sc) return run_score(sc, io);
    if (*c_sp) return run_spectrogram(sp, io);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace hsc::cli
