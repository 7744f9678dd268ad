// tests/support/oracles.hpp

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

// Independent reference implementations and fixtures shared by the test
// suites. Nothing here calls into the FFT paths it is used to check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsc::testing {

inline std::vector<double> direct_convolve(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// 10 log10(|est - ref|^2 / |ref|^2) over the overlapping prefix.
inline double normalized_error_db(std::span<const double> estimate, std::span<const double> reference) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = i < estimate.size() ? estimate[i] : 0.0;
    err += (e - reference[i]) * (e - reference[i]);
    ref += reference[i] * reference[i];
  }
  for (std::size_t i = reference.size(); i < estimate.size(); ++i) err += estimate[i] * estimate[i];
  return 10.0 * std::log10(err / ref);
}

inline double snr_db(std::span<const double> estimate, std::span<const double> reference) {
  return -normalized_error_db(estimate, reference);
}

// Single-bin DFT magnitude at an arbitrary frequency (Goertzel-style direct
// sum with a Hann window), amplitude-calibrated for a pure sinusoid.
inline double tone_amplitude(std::span<const double> x, double freq_hz, int rate) {
  const std::size_t n = x.size();
  std::complex<double> acc = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
    const double ph = -2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate;
    acc += w * x[i] * std::complex<double>(std::cos(ph), std::sin(ph));
    wsum += w;
  }
  return 2.0 * std::abs(acc) / wsum;
}

inline std::vector<double> sine(double freq_hz, double amplitude, std::size_t n, int rate, double phase = 0.0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate + phase);
  }
  return out;
}

inline std::vector<double> gaussian(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

// Deterministic speech-like test signal: a glottal pulse train with drifting
// pitch, three formant resonances, syllable-rate amplitude modulation and
// short band-limited fricative bursts. Peak-normalized to `peak`.
inline std::vector<double> speech_like(double seconds, int rate, std::uint64_t seed, double peak = 0.5) {
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> source(n, 0.0);
  const double f0_base = 110.0 + 60.0 * uni(rng);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double f0 = f0_base * (1.0 + 0.15 * std::sin(2.0 * std::numbers::pi * 0.7 * t));
    phase += f0 / rate;
    if (phase >= 1.0) {
      phase -= 1.0;
      source[i] = 1.0;
    }
  }

  // Formants as two-pole resonators in series.
  auto resonate = [&](std::vector<double>& x, double freq, double bw) {
    const double r = std::exp(-std::numbers::pi * bw / rate);
    const double a1 = -2.0 * r * std::cos(2.0 * std::numbers::pi * freq / rate);
    const double a2 = r * r;
    double y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
      const double y = v - a1 * y1 - a2 * y2;
      y2 = y1;
      y1 = y;
      v = y * (1.0 - r);
    }
  };
  std::vector<double> voiced = source;
  resonate(voiced, 500.0 + 200.0 * uni(rng), 80.0);
  std::vector<double> f2 = source;
  resonate(f2, 1500.0 + 300.0 * uni(rng), 120.0);
  std::vector<double> f3 = source;
  resonate(f3, 2600.0 + 300.0 * uni(rng), 200.0);
  for (std::size_t i = 0; i < n; ++i) voiced[i] += 0.6 * f2[i] + 0.3 * f3[i];

  // Fricatives: noise through a broad resonance around 3.5 kHz, in short bursts.
  std::vector<double> fric(n);
  for (double& v : fric) v = gauss(rng);
  resonate(fric, 3500.0, 1500.0);

  const double syllable_hz = 3.5 + uni(rng);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double env = std::pow(std::max(0.0, std::sin(std::numbers::pi * syllable_hz * t)), 2.0);
    const double fric_env = std::pow(std::max(0.0, -std::sin(std::numbers::pi * syllable_hz * t)), 8.0);
    out[i] = env * voiced[i] + 0.02 * fric_env * fric[i];
  }
  const double p = max_abs(out);
  if (p > 0.0) {
    for (double& v : out) v *= peak / p;
  }
  return out;
}

// Edit distance by exhaustive search over edit scripts with iterative
// deepening. Exponential; only for short strings.
inline bool edit_within(std::string_view a, std::string_view b, std::size_t budget) {
  if (a.empty()) return b.size() <= budget;
  if (b.empty()) return a.size() <= budget;
  const std::size_t gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (gap > budget) return false;
  if (a[0] == b[0] && edit_within(a.substr(1), b.substr(1), budget)) return true;
  if (budget == 0) return false;
  return edit_within(a.substr(1), b.substr(1), budget - 1) || edit_within(a.substr(1), b, budget - 1) ||
         edit_within(a, b.substr(1), budget - 1);
}

inline std::size_t brute_edit_distance(std::string_view a, std::string_view b) {
  std::size_t d = 0;
  while (!edit_within(a, b, d)) ++d;
  return d;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "hsc") {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(stamp) + "-" +
                                                       std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace hsc::testing
