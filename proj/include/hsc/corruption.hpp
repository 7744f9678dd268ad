// hsc/corruption.hpp

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
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/dsp.hpp"
#include "hsc/error.hpp"
#include "hsc/levels.hpp"
#include "hsc/signal.hpp"

namespace hsc {

inline constexpr double kMaxRecordingDelaySeconds = 0.5;

struct DistortionSpec {
  double band_low_hz = 50.0;
  double band_high_hz = 250.0;
  std::vector<double> harmonic_gains;  // gain of the 2nd, 3rd, ... harmonic

  void validate(int sample_rate_hz) const {
    if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz && band_high_hz < 0.5 * sample_rate_hz)) {
      fail(ErrorKind::InvalidSpec, "distortion band must satisfy 0 < low < high < Nyquist");
    }
    for (double g : harmonic_gains) {
      if (!std::isfinite(g)) fail(ErrorKind::InvalidSpec, "non-finite harmonic gain");
    }
  }
};

struct CorruptionModel {
  ImpulseResponse ir = ImpulseResponse::identity();
  double snr_db = 300.0;
  double delay_seconds = 0.0;
  std::optional<DistortionSpec> distortion;
  double clip_ceiling = 1.0;

  void validate() const {
    if (!std::isfinite(snr_db)) fail(ErrorKind::InvalidSpec, "snr_db must be finite");
    if (!(delay_seconds >= 0.0 && delay_seconds <= kMaxRecordingDelaySeconds)) {
      fail(ErrorKind::InvalidSpec, "delay must lie in [0, 0.5] s");
    }
    if (!(clip_ceiling > 0.0 && clip_ceiling <= 1.0)) fail(ErrorKind::InvalidSpec, "clip ceiling must lie in (0, 1]");
    if (distortion) distortion->validate(ir.sample_rate_hz());
  }
};

// ---------------------------------------------------------------------------
// Synthetic impulse responses

/// Digital Butterworth low-pass (bilinear transform, prewarped), as a
/// truncated impulse response with unity DC gain.
inline ImpulseResponse butterworth_lowpass_ir(double cutoff_hz, int order, std::size_t taps,
                                              int rate = kChallengeRate) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * rate) || order < 1 || taps == 0) {
    fail(ErrorKind::InvalidSpec, "butterworth: need 0 < cutoff < Nyquist, order >= 1, taps >= 1");
  }
  using C = std::complex<double>;
  const double fs2 = 2.0 * rate;
  const double wc = fs2 * std::tan(std::numbers::pi * cutoff_hz / rate);
  std::vector<double> h(taps, 0.0);
  h[0] = 1.0;
  auto run_section = [&](double b0, double b1, double b2, double a1, double a2) {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& v : h) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  };
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    const C s = wc * std::polar(1.0, theta);
    const C z = (fs2 + s) / (fs2 - s);
    const double a1 = -2.0 * z.real(), a2 = std::norm(z);
    const double g = (1.0 + a1 + a2) / 4.0;
    run_section(g, 2.0 * g, g, a1, a2);
  }
  if (order % 2 == 1) {
    const double s = -wc;
    const double p = (fs2 + s) / (fs2 - s);
    const double g = (1.0 - p) / 2.0;
    run_section(g, g, 0.0, -p, 0.0);
  }
  return ImpulseResponse(std::move(h), rate);
}

/// Direct path at tap 0 followed by an exponentially decaying Gaussian tail
/// (-60 dB at rt60) whose energy sits drr_db below the direct path.
inline ImpulseResponse reverb_ir(double rt60_s, double drr_db, std::size_t predelay, std::uint64_t seed,
                                 int rate = kChallengeRate) {
  if (!(rt60_s > 0.0) || !std::isfinite(drr_db)) fail(ErrorKind::InvalidSpec, "reverb: need rt60 > 0");
  const std::size_t tail = static_cast<std::size_t>(std::ceil(rt60_s * rate));
  std::vector<double> h(1 + predelay + tail, 0.0);
  h[0] = 1.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double decay = std::log(1000.0) / (rt60_s * rate);  // amplitude: -60 dB at rt60
  double tail_energy = 0.0;
  for (std::size_t i = 0; i < tail; ++i) {
    const double v = gauss(rng) * std::exp(-decay * static_cast<double>(i));
    h[1 + predelay + i] = v;
    tail_energy += v * v;
  }
  const double g = std::sqrt(std::pow(10.0, -drr_db / 10.0) / tail_energy);
  for (std::size_t i = 1 + predelay; i < h.size(); ++i) h[i] *= g;
  return ImpulseResponse(std::move(h), rate);
}

// ---------------------------------------------------------------------------
// Nonlinearity

/// Band-split harmonic generator. The band [low, high] is extracted in the
/// Fourier domain, normalized by a near-peak level R, and shaped with Chebyshev
/// polynomials so a pure in-band tone of amplitude A gains a k-th harmonic of
/// amplitude gain_k * A. The product is high-passed below the band to drop the
/// DC term of even orders and added to the input.
inline AudioClip apply_harmonic_distortion(const AudioClip& clip, const DistortionSpec& spec) {
  const int rate = clip.sample_rate_hz();
  spec.validate(rate);
  if (spec.harmonic_gains.empty() || clip.empty()) return clip;

  const std::size_t n = clip.size();
  const std::size_t nfft = fft::next_pow2(2 * n);
  Spectrum x = fft::forward(clip.samples(), nfft);
  const double width = spec.band_high_hz - spec.band_low_hz;
  const double edge = 0.1 * width;
  auto band_gain = [&](double f) {
    if (f <= spec.band_low_hz || f >= spec.band_high_hz) return 0.0;
    if (f < spec.band_low_hz + edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * (f - spec.band_low_hz) / edge);
    if (f > spec.band_high_hz - edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * (spec.band_high_hz - f) / edge);
    return 1.0;
  };
  for (std::size_t k = 0; k < nfft; ++k) x[k] *= band_gain(fft::bin_frequency(k, nfft, rate));
  std::vector<double> low = fft::inverse_real(x);
  low.resize(n);

  // Reference level: 99.5th percentile of |low|, so onset ringing of the band
  // split does not pull a steady tone away from full scale.
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(low[i]);
  const auto rank = mags.begin() + static_cast<std::ptrdiff_t>(std::min(n - 1, static_cast<std::size_t>(0.995 * n)));
  std::nth_element(mags.begin(), rank, mags.end());
  const double ref = *rank;
  if (ref < 1e-12) return clip;

  const std::size_t orders = spec.harmonic_gains.size() + 1;
  std::vector<double> product(n, 0.0);
  std::vector<double> t_at_zero(orders + 1);
  {
    double t0 = 1.0, t1 = 0.0;  // T_k(0)
    t_at_zero[0] = t0;
    t_at_zero[1] = t1;
    for (std::size_t k = 2; k <= orders; ++k) {
      const double tk = -t0;
      t_at_zero[k] = tk;
      t0 = t1;
      t1 = tk;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::clamp(low[i] / ref, -1.0, 1.0);
    double tm1 = 1.0, t = u;
    double acc = 0.0;
    for (std::size_t k = 2; k <= orders; ++k) {
      const double next = 2.0 * u * t - tm1;
      tm1 = t;
      t = next;
      acc += spec.harmonic_gains[k - 2] * (t - t_at_zero[k]);
    }
    product[i] = ref * acc;
  }

  Spectrum d = fft::forward(product, nfft);
  const double hp_lo = 0.5 * spec.band_low_hz, hp_hi = 0.9 * spec.band_low_hz;
  for (std::size_t k = 0; k < nfft; ++k) {
    const double f = fft::bin_frequency(k, nfft, rate);
    double g = 1.0;
    if (f <= hp_lo) g = 0.0;
    else if (f < hp_hi) g = 0.5 - 0.5 * std::cos(std::numbers::pi * (f - hp_lo) / (hp_hi - hp_lo));
    d[k] *= g;
  }
  std::vector<double> harmonics = fft::inverse_real(d);
  std::vector<double> out(clip.data());
  for (std::size_t i = 0; i < n; ++i) out[i] += harmonics[i];
  return AudioClip(std::move(out), rate);
}

/// clip(distort(delay(ir * clean)) + w), with w white Gaussian at snr_db
/// relative to the mean power of the noiseless output.
inline AudioClip apply_corruption(const AudioClip& clean, const CorruptionModel& model, std::uint64_t noise_seed) {
  model.validate();
  if (clean.sample_rate_hz() != kChallengeRate) {
    fail(ErrorKind::SampleRateMismatch, "apply_corruption expects 16 kHz input, got " +
                                            std::to_string(clean.sample_rate_hz()) + " Hz");
  }
  require_same_rate(clean.sample_rate_hz(), model.ir.sample_rate_hz(), "apply_corruption");
  AudioClip y = fft_convolve(clean, model.ir);
  y = delay(y, seconds_to_samples(model.delay_seconds, y.sample_rate_hz()));
  if (model.distortion) y = apply_harmonic_distortion(y, *model.distortion);

  std::vector<double> out = std::move(y).release();
  const double power = energy(out) / static_cast<double>(out.size());
  const double sigma = std::sqrt(power / std::pow(10.0, model.snr_db / 10.0));
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& s : out) {
    const double w = gauss(rng);
    s = std::clamp(s + sigma * w, -model.clip_ceiling, model.clip_ceiling);
  }
  return AudioClip(std::move(out), clean.sample_rate_hz());
}

// ---------------------------------------------------------------------------
// Level presets

// Synthetic stand-ins per level. Task 1 uses Butterworth low-passes with
// falling cutoff, Task 2 uses decaying-noise reverbs with growing rt60 and
// falling direct-to-reverberant ratio, Task 3 chains a Task 1 filter and a
// Task 2 reverb. delay_s=random draws the delay from the model seed.
inline constexpr std::string_view kDefaultPresets = R"(# level  type  parameters...
T1L1 type=lowpass cutoff_hz=6500 order=2 taps=512 snr_db=45 delay_s=random distortion=0.02,0.01
T1L2 type=lowpass cutoff_hz=4000 order=4 taps=512 snr_db=44 delay_s=random distortion=0.02,0.01
T1L3 type=lowpass cutoff_hz=2500 order=4 taps=512 snr_db=43 delay_s=random distortion=0.03,0.015
T1L4 type=lowpass cutoff_hz=1600 order=6 taps=512 snr_db=42 delay_s=random distortion=0.03,0.015
T1L5 type=lowpass cutoff_hz=1000 order=6 taps=512 snr_db=41 delay_s=random distortion=0.04,0.02
T1L6 type=lowpass cutoff_hz=700 order=8 taps=1024 snr_db=40 delay_s=random distortion=0.04,0.02
T1L7 type=lowpass cutoff_hz=550 order=8 taps=1024 snr_db=40 delay_s=random distortion=0.05,0.025
T2L1 type=reverb rt60_s=0.4 drr_db=6 predelay_ms=3 snr_db=30 delay_s=random distortion=0.005
T2L2 type=reverb rt60_s=0.9 drr_db=-3 predelay_ms=15 snr_db=25 delay_s=random distortion=0.005
T2L3 type=reverb rt60_s=1.5 drr_db=-8 predelay_ms=29 snr_db=20 delay_s=random distortion=0.005
T3L1 type=series parts=T1L2,T2L2 snr_db=25 delay_s=random distortion=0.02,0.01
T3L2 type=series parts=T1L4,T2L3 snr_db=20 delay_s=random distortion=0.03,0.015
)";

class PresetTable {
 public:
  PresetTable() : PresetTable(parse_key_value_table(kDefaultPresets)) {}
  explicit PresetTable(std::vector<KeyValueEntry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) parse_level_id(e.name);
  }

  static PresetTable parse(std::string_view text) { return PresetTable(parse_key_value_table(text)); }
  static PresetTable load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

  const KeyValueEntry* find(const LevelId& id) const {
    const std::string key = id.str();
    for (const auto& e : entries_) {
      if (e.name == key) return &e;
    }
    return nullptr;
  }

  const KeyValueEntry& at(const LevelId& id) const {
    const auto* e = find(id);
    if (!e) fail(ErrorKind::UnknownLevel, "no corruption preset for " + id.str());
    return *e;
  }

  const std::vector<KeyValueEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<KeyValueEntry> entries_;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, const LevelId& id, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(id.task) * 1000 + id.level + 1) + salt;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline ImpulseResponse preset_ir(const LevelId& id, const PresetTable& presets, std::uint64_t seed, int depth = 0) {
  if (depth > 4) fail(ErrorKind::InvalidConfig, "preset series nesting too deep at " + id.str());
  const auto& entry = presets.at(id);
  const std::string type = entry.get("type");
  if (type == "lowpass") {
    return butterworth_lowpass_ir(entry.number("cutoff_hz"), static_cast<int>(entry.number("order")),
                                  static_cast<std::size_t>(entry.number_or("taps", 512)));
  }
  if (type == "reverb") {
    const std::size_t predelay = seconds_to_samples(entry.number_or("predelay_ms", 0.0) / 1000.0, kChallengeRate);
    return reverb_ir(entry.number("rt60_s"), entry.number("drr_db"), predelay, mix_seed(seed, id, 1));
  }
  if (type == "series") {
    std::vector<double> taps{1.0};
    for (const auto& part : split(entry.get("parts"), ',')) {
      const auto ir = preset_ir(parse_level_id(trim(part)), presets, seed, depth + 1);
      taps = convolve(taps, ir.taps());
    }
    return ImpulseResponse(std::move(taps), kChallengeRate);
  }
  if (type == "identity") return ImpulseResponse::identity();
  fail(ErrorKind::InvalidConfig, id.str() + ": unknown preset type '" + type + "'");
}

}  // namespace detail

/// Builds the synthetic corruption model of a registered level.
inline CorruptionModel make_level_model(const LevelId& level, const LevelRegistry& registry, std::uint64_t rng_seed,
                                        const PresetTable& presets = PresetTable()) {
  registry.at(level);
  const auto& entry = presets.at(level);
  CorruptionModel model;
  model.ir = detail::preset_ir(level, presets, rng_seed);
  model.snr_db = entry.number_or("snr_db", 40.0);
  const std::string delay_text = entry.get_or("delay_s", "0");
  if (delay_text == "random") {
    std::mt19937_64 rng(detail::mix_seed(rng_seed, level, 2));
    model.delay_seconds = std::uniform_real_distribution<double>(0.0, kMaxRecordingDelaySeconds)(rng);
  } else {
    model.delay_seconds = entry.number("delay_s");
  }
  if (entry.has("distortion") && entry.get("distortion") != "none") {
    DistortionSpec d;
    d.harmonic_gains = entry.numbers("distortion");
    d.band_low_hz = entry.number_or("band_low_hz", d.band_low_hz);
    d.band_high_hz = entry.number_or("band_high_hz", d.band_high_hz);
    model.distortion = d;
  }
  model.clip_ceiling = entry.number_or("clip", 1.0);
  model.validate();
  return model;
}

}  // namespace hsc
