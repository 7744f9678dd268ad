// hsc/dsp.hpp

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
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "hsc/error.hpp"
#include "hsc/signal.hpp"

namespace hsc {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace fft {

// Eigen's FFT object caches twiddles per size; one instance per thread.
inline Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> instance;
  return instance;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Full complex spectrum of a real sequence zero-padded to `size`.
inline Spectrum forward(std::span<const double> x, std::size_t size) {
  std::vector<double> padded(size, 0.0);
  std::copy_n(x.begin(), std::min(x.size(), size), padded.begin());
  Spectrum out;
  engine().fwd(out, padded);
  return out;
}

// Real part of the inverse transform, scaled by 1/size.
inline std::vector<double> inverse_real(const Spectrum& spectrum) {
  Spectrum work(spectrum);
  // Enforce Hermitian symmetry so the round-off imaginary part is discarded consistently.
  const std::size_t n = work.size();
  work[0] = work[0].real();
  if (n % 2 == 0) work[n / 2] = work[n / 2].real();
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) work[n - k] = std::conj(work[k]);
  std::vector<double> out;
  engine().inv(out, work);
  return out;
}

inline double bin_frequency(std::size_t k, std::size_t size, int rate) {
  const double kk = k <= size / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(size);
  return std::abs(kk) * rate / static_cast<double>(size);
}

}  // namespace fft

/// Linear convolution of two raw sequences via zero-padded FFT.
inline std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptyInput, "convolution of an empty sequence");
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = fft::next_pow2(out_len);
  Spectrum fa = fft::forward(a, n);
  const Spectrum fb = fft::forward(b, n);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  std::vector<double> out = fft::inverse_real(fa);
  out.resize(out_len);
  return out;
}

/// r[lag] = sum_n a[n + lag] * b[n] for lag in [0, max_lag].
inline std::vector<double> cross_correlate(std::span<const double> a, std::span<const double> b,
                                           std::size_t max_lag) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptyInput, "correlation of an empty sequence");
  const std::size_t n = fft::next_pow2(a.size() + b.size());
  Spectrum fa = fft::forward(a, n);
  const Spectrum fb = fft::forward(b, n);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= std::conj(fb[k]);
  std::vector<double> full = fft::inverse_real(fa);
  full.resize(std::min(max_lag + 1, n));
  return full;
}

inline AudioClip fft_convolve(const AudioClip& signal, const ImpulseResponse& kernel) {
  require_same_rate(signal.sample_rate_hz(), kernel.sample_rate_hz(), "fft_convolve");
  if (signal.empty()) fail(ErrorKind::EmptyInput, "fft_convolve: empty signal");
  return AudioClip(convolve(signal.samples(), kernel.taps()), signal.sample_rate_hz());
}

// ---------------------------------------------------------------------------
// STFT

// Periodic Hann window.
inline std::vector<double> hann_window(int size) {
  std::vector<double> w(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / size));
  return w;
}

// Frames index a copy of the signal carrying (window_size - hop) leading zeros
// and enough trailing zeros that every original sample is covered by all of its
// overlapping frames; istft strips both.
struct Stft {
  Eigen::MatrixXcd frames;  // frequency_bins x time_frames
  int window_size = 512;
  int hop = 256;
  int sample_rate_hz = kChallengeRate;
  std::size_t signal_length = 0;
  std::size_t lead_pad = 0;

  Eigen::Index bins() const { return frames.rows(); }
  Eigen::Index time_frames() const { return frames.cols(); }
};

namespace detail {

inline void check_reconstructible(const std::vector<double>& w, int hop) {
  const int size = static_cast<int>(w.size());
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < hop; ++j) {
    double s = 0.0;
    for (int i = j; i < size; i += hop) s += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    worst = std::min(worst, s);
  }
  if (worst < 1e-10) {
    fail(ErrorKind::NonReconstructibleParameters,
         "window " + std::to_string(size) + " with hop " + std::to_string(hop) + " leaves uncovered samples");
  }
}

}  // namespace detail

inline Stft stft(const AudioClip& clip, int window_size, int hop) {
  if (window_size <= 0 || hop <= 0 || hop > window_size ||
      static_cast<std::size_t>(window_size) > clip.size()) {
    fail(ErrorKind::InvalidWindow, "need 0 < hop <= window_size <= clip length (window " +
                                       std::to_string(window_size) + ", hop " + std::to_string(hop) +
                                       ", length " + std::to_string(clip.size()) + ")");
  }
  const auto w = hann_window(window_size);
  const std::size_t win = static_cast<std::size_t>(window_size);
  const std::size_t step = static_cast<std::size_t>(hop);
  const std::size_t lead = win - step;
  const std::size_t core = lead + clip.size();
  // Smallest frame count whose span reaches core + (win - hop).
  const std::size_t needed = core + lead;
  const std::size_t frames = needed <= win ? 1 : (needed - win + step - 1) / step + 1;
  std::vector<double> padded((frames - 1) * step + win, 0.0);
  std::copy(clip.samples().begin(), clip.samples().end(), padded.begin() + static_cast<std::ptrdiff_t>(lead));

  Stft out;
  out.window_size = window_size;
  out.hop = hop;
  out.sample_rate_hz = clip.sample_rate_hz();
  out.signal_length = clip.size();
  out.lead_pad = lead;
  const std::size_t bins = win / 2 + 1;
  out.frames.resize(static_cast<Eigen::Index>(bins), static_cast<Eigen::Index>(frames));
  std::vector<double> frame(win);
  Spectrum spectrum;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < win; ++i) frame[i] = padded[t * step + i] * w[i];
    fft::engine().fwd(spectrum, frame);
    for (std::size_t k = 0; k < bins; ++k) out.frames(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = spectrum[k];
  }
  return out;
}

/// Weighted overlap-add inverse (synthesis window equal to the analysis window).
inline AudioClip istft(const Stft& spec) {
  const int window_size = spec.window_size;
  const std::size_t win = static_cast<std::size_t>(window_size);
  const std::size_t step = static_cast<std::size_t>(spec.hop);
  if (spec.hop <= 0 || spec.hop > window_size) fail(ErrorKind::InvalidWindow, "istft: invalid hop");
  if (spec.bins() != static_cast<Eigen::Index>(win / 2 + 1)) {
    fail(ErrorKind::InvalidWindow, "istft: bin count does not match window size");
  }
  const auto w = hann_window(window_size);
  detail::check_reconstructible(w, spec.hop);

  const std::size_t frames = static_cast<std::size_t>(spec.time_frames());
  const std::size_t total = frames == 0 ? 0 : (frames - 1) * step + win;
  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);
  Spectrum full(win);
  std::vector<double> frame;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k <= win / 2; ++k) full[k] = spec.frames(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
    frame = fft::inverse_real(full);
    for (std::size_t i = 0; i < win; ++i) {
      acc[t * step + i] += frame[i] * w[i];
      norm[t * step + i] += w[i] * w[i];
    }
  }
  std::vector<double> out(spec.signal_length, 0.0);
  for (std::size_t i = 0; i < spec.signal_length; ++i) {
    const std::size_t p = i + spec.lead_pad;
    if (p < total && norm[p] > 1e-12) out[i] = acc[p] / norm[p];
  }
  return AudioClip(std::move(out), spec.sample_rate_hz);
}

/// Energy of the frames with one-sided bins unfolded, divided by the mean
/// overlap gain sum(w^2)/hop. Equals signal energy for w^2-COLA pairs
/// (periodic Hann at 75% overlap).
inline double stft_energy(const Stft& spec) {
  const auto w = hann_window(spec.window_size);
  const double gain = std::inner_product(w.begin(), w.end(), w.begin(), 0.0) / spec.hop;
  const Eigen::Index bins = spec.bins();
  double total = 0.0;
  for (Eigen::Index t = 0; t < spec.time_frames(); ++t) {
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double m2 = std::norm(spec.frames(k, t));
      const bool edge = k == 0 || (spec.window_size % 2 == 0 && k == bins - 1);
      total += edge ? m2 : 2.0 * m2;
    }
  }
  return total / spec.window_size / gain;
}

/// Mean magnitude per bin, used as a stationary noise profile.
inline std::vector<double> mean_magnitude(const Stft& spec) {
  std::vector<double> out(static_cast<std::size_t>(spec.bins()), 0.0);
  if (spec.time_frames() == 0) return out;
  for (Eigen::Index k = 0; k < spec.bins(); ++k) {
    out[static_cast<std::size_t>(k)] = spec.frames.row(k).cwiseAbs().mean();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resampling

namespace detail {

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

inline double kaiser(double n, double length, double beta) {
  const double r = 2.0 * n / (length - 1.0) - 1.0;
  const double arg = std::max(0.0, 1.0 - r * r);
  return std::cyl_bessel_i(0.0, beta * std::sqrt(arg)) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace detail

struct ResamplerDesign {
  double stopband_db = 80.0;       // design attenuation; exceeds the 60 dB requirement
  double passband_fraction = 0.9;  // passband edge relative to the lower Nyquist
};

/// Rational windowed-sinc polyphase resampler (Kaiser window).
inline AudioClip resample(const AudioClip& clip, int target_rate_hz, const ResamplerDesign& design = {}) {
  const int source = clip.sample_rate_hz();
  if (target_rate_hz <= 0 || source <= 0) fail(ErrorKind::InvalidRate, "resample: rates must be positive");
  if (target_rate_hz == source) return clip;
  const long g = std::gcd(source, target_rate_hz);
  const std::size_t up = static_cast<std::size_t>(target_rate_hz / g);
  const std::size_t down = static_cast<std::size_t>(source / g);
  const double rate_up = static_cast<double>(source) * static_cast<double>(up);
  const double nyquist = 0.5 * std::min(source, target_rate_hz);
  const double pass_edge = design.passband_fraction * nyquist;
  const double cutoff = 0.5 * (pass_edge + nyquist);
  const double delta_omega = 2.0 * std::numbers::pi * (nyquist - pass_edge) / rate_up;
  const double atten = design.stopband_db;
  const double beta = atten > 50.0 ? 0.1102 * (atten - 8.7) : 0.5842 * std::pow(atten - 21.0, 0.4) + 0.07886 * (atten - 21.0);
  std::size_t taps = static_cast<std::size_t>(std::ceil((atten - 8.0) / (2.285 * delta_omega))) + 1;
  if (taps % 2 == 0) ++taps;
  const double centre = static_cast<double>(taps - 1) / 2.0;
  const double fc = cutoff / rate_up;  // cycles per upsampled sample
  std::vector<double> h(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    const double n = static_cast<double>(k) - centre;
    h[k] = static_cast<double>(up) * 2.0 * fc * detail::sinc(2.0 * fc * n) *
           detail::kaiser(static_cast<double>(k), static_cast<double>(taps), beta);
  }

  const auto x = clip.samples();
  const std::size_t in_len = x.size();
  const std::size_t out_len = (in_len * up + down - 1) / down;
  const std::size_t delay = (taps - 1) / 2;
  std::vector<double> y(out_len, 0.0);
  for (std::size_t m = 0; m < out_len; ++m) {
    const std::size_t t = m * down + delay;  // position in the upsampled stream incl. filter delay
    std::size_t n_hi = t / up;
    if (n_hi >= in_len) n_hi = in_len - 1;
    const std::size_t n_lo = t + 1 >= taps ? (t + 1 - taps + up - 1) / up : 0;
    double acc = 0.0;
    for (std::size_t n = n_lo; n <= n_hi && in_len > 0; ++n) acc += h[t - n * up] * x[n];
    y[m] = acc;
  }
  return AudioClip(std::move(y), target_rate_hz);
}

// ---------------------------------------------------------------------------
// Level and length utilities

inline std::size_t seconds_to_samples(double seconds, int rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

inline AudioClip pad(const AudioClip& clip, double lead_seconds, double trail_seconds) {
  if (lead_seconds < 0.0 || trail_seconds < 0.0) fail(ErrorKind::InvalidSpec, "pad: negative padding");
  const std::size_t lead = seconds_to_samples(lead_seconds, clip.sample_rate_hz());
  const std::size_t trail = seconds_to_samples(trail_seconds, clip.sample_rate_hz());
  std::vector<double> out(lead + clip.size() + trail, 0.0);
  std::copy(clip.samples().begin(), clip.samples().end(), out.begin() + static_cast<std::ptrdiff_t>(lead));
  return AudioClip(std::move(out), clip.sample_rate_hz());
}

inline AudioClip delay(const AudioClip& clip, std::size_t samples) {
  std::vector<double> out(samples + clip.size(), 0.0);
  std::copy(clip.samples().begin(), clip.samples().end(), out.begin() + static_cast<std::ptrdiff_t>(samples));
  return AudioClip(std::move(out), clip.sample_rate_hz());
}

inline AudioClip scale(const AudioClip& clip, double gain) {
  std::vector<double> out(clip.data());
  for (double& s : out) s *= gain;
  return AudioClip(std::move(out), clip.sample_rate_hz());
}

inline AudioClip normalize_peak(const AudioClip& clip, double target_dbfs) {
  const double peak = peak_abs(clip.samples());
  if (peak == 0.0) fail(ErrorKind::SilentInput, "normalize_peak: clip is all zeros");
  return scale(clip, db_to_amplitude(target_dbfs) / peak);
}

// ---------------------------------------------------------------------------
// Spectrogram export

struct Spectrogram {
  int bins = 0;
  int frames = 0;
  int hop = 0;
  int window = 0;
  int sample_rate_hz = 0;
  std::vector<float> db;  // row-major, one row per frame

  float at(int frame, int bin) const { return db[static_cast<std::size_t>(frame) * bins + bin]; }
};

inline Spectrogram spectrogram_db(const AudioClip& clip, int window_size, int hop, double floor = 1e-10) {
  const Stft s = stft(clip, window_size, hop);
  Spectrogram out;
  out.bins = static_cast<int>(s.bins());
  out.frames = static_cast<int>(s.time_frames());
  out.hop = hop;
  out.window = window_size;
  out.sample_rate_hz = clip.sample_rate_hz();
  out.db.resize(static_cast<std::size_t>(out.bins) * out.frames);
  for (int t = 0; t < out.frames; ++t) {
    for (int k = 0; k < out.bins; ++k) {
      out.db[static_cast<std::size_t>(t) * out.bins + k] =
          static_cast<float>(20.0 * std::log10(std::max(std::abs(s.frames(k, t)), floor)));
    }
  }
  return out;
}

// CSV: one comment header line, then one row per frame.
inline void write_spectrogram_csv(const Spectrogram& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  out << "# bins=" << s.bins << " frames=" << s.frames << " hop=" << s.hop << " window=" << s.window
      << " rate=" << s.sample_rate_hz << "\n";
  char buf[32];
  for (int t = 0; t < s.frames; ++t) {
    for (int k = 0; k < s.bins; ++k) {
      std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(s.at(t, k)));
      if (k) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::IoFailure, "write failed for " + path.string());
}

// Binary: "HSCSPEC1", five little-endian int32 (bins, frames, hop, window,
// rate), then float32 dB values row-major by frame.
inline void write_spectrogram_binary(const Spectrogram& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  out.write("HSCSPEC1", 8);
  auto put = [&](std::int32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  for (int v : {s.bins, s.frames, s.hop, s.window, s.sample_rate_hz}) put(v);
  for (float f : s.db) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put(static_cast<std::int32_t>(bits));
  }
  if (!out) fail(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace hsc
