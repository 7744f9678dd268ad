// hsc/deconv.hpp

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

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hsc/dsp.hpp"
#include "hsc/error.hpp"
#include "hsc/signal.hpp"

namespace hsc {

struct WienerParams {
  double noise_power = 1e-3;           // lambda
  std::optional<int> frame_size;       // none: whole-signal FFT
};

namespace detail {

// Below this fraction of max |K|^2 an unregularized bin is treated as a null.
inline constexpr double kNullGuard = 1e-12;

inline Spectrum wiener_gain(const Spectrum& k, double lambda) {
  double max_power = 0.0;
  for (const auto& c : k) max_power = std::max(max_power, std::norm(c));
  Spectrum g(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double p = std::norm(k[i]);
    const double denom = p + lambda;
    g[i] = (lambda == 0.0 && p <= kNullGuard * max_power) || denom == 0.0 ? Complex{} : std::conj(k[i]) / denom;
  }
  return g;
}

// Linear convolution by overlap-add with blocks of `block` input samples.
inline std::vector<double> overlap_add(std::span<const double> x, std::span<const double> h, std::size_t block) {
  const std::size_t n = fft::next_pow2(block + h.size() - 1);
  const Spectrum fh = fft::forward(h, n);
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    Spectrum fx = fft::forward(x.subspan(start, len), n);
    for (std::size_t k = 0; k < n; ++k) fx[k] *= fh[k];
    const auto y = fft::inverse_real(fx);
    const std::size_t span_len = std::min(n, out.size() - start);
    for (std::size_t i = 0; i < span_len; ++i) out[start + i] += y[i];
  }
  return out;
}

}  // namespace detail

/// X = Y conj(K) / (|K|^2 + lambda). Whole-signal mode divides on one linear
/// FFT grid; framed mode builds a frame_size-tap two-sided inverse filter and
/// applies it by overlap-add. Output has len(observed) - len(ir) + 1 samples.
inline AudioClip wiener_deconvolve(const AudioClip& observed, const ImpulseResponse& ir, const WienerParams& params) {
  require_same_rate(observed.sample_rate_hz(), ir.sample_rate_hz(), "wiener_deconvolve");
  if (ir.is_zero()) fail(ErrorKind::DegenerateKernel, "wiener_deconvolve: impulse response is all zeros");
  if (!(params.noise_power >= 0.0) || !std::isfinite(params.noise_power)) {
    fail(ErrorKind::InvalidSpec, "wiener_deconvolve: noise_power must be finite and >= 0");
  }
  if (observed.size() < ir.size()) {
    fail(ErrorKind::EmptyInput, "wiener_deconvolve: observation shorter than the impulse response");
  }
  const std::size_t out_len = observed.size() - ir.size() + 1;
  std::vector<double> x;

  if (!params.frame_size) {
    const std::size_t n = fft::next_pow2(observed.size() + ir.size());
    Spectrum y = fft::forward(observed.samples(), n);
    const Spectrum g = detail::wiener_gain(fft::forward(ir.taps(), n), params.noise_power);
    for (std::size_t k = 0; k < n; ++k) y[k] *= g[k];
    x = fft::inverse_real(y);
  } else {
    const int frame = *params.frame_size;
    if (frame < 2 || static_cast<std::size_t>(frame) < 2 * ir.size()) {
      fail(ErrorKind::InvalidWindow, "wiener_deconvolve: frame_size must be >= 2 * len(ir)");
    }
    const std::size_t f = static_cast<std::size_t>(frame);
    const auto g = fft::inverse_real(detail::wiener_gain(fft::forward(ir.taps(), f), params.noise_power));
    // Two-sided filter: lags [-f/2, f/2) rotated to be causal with delay f/2.
    const std::size_t half = f / 2;
    std::vector<double> causal(f);
    for (std::size_t j = 0; j < f; ++j) causal[j] = g[(j + f - half) % f];
    const auto z = detail::overlap_add(observed.samples(), causal, 4 * f);
    x.assign(z.begin() + static_cast<std::ptrdiff_t>(half), z.end());
  }
  x.resize(out_len, 0.0);
  return AudioClip(std::move(x), observed.sample_rate_hz());
}

struct TikhonovResult {
  AudioClip clip;
  double lambda = 0.0;
  double quality = 0.0;
};

/// Grid search over lambda; the highest quality wins and ties go to the
/// larger lambda, independent of grid order.
inline TikhonovResult tikhonov_deconvolve(const AudioClip& observed, const ImpulseResponse& ir,
                                          std::span<const double> lambda_grid,
                                          const std::function<double(const AudioClip&)>& quality,
                                          std::optional<int> frame_size = std::nullopt) {
  if (lambda_grid.empty()) fail(ErrorKind::InvalidSpec, "tikhonov_deconvolve: empty lambda grid");
  std::optional<TikhonovResult> best;
  for (double lambda : lambda_grid) {
    auto clip = wiener_deconvolve(observed, ir, WienerParams{lambda, frame_size});
    const double q = quality(clip);
    if (!best || q > best->quality || (q == best->quality && lambda > best->lambda)) {
      best = TikhonovResult{std::move(clip), lambda, q};
    }
  }
  return std::move(*best);
}

struct StftConfig {
  int window_size = 512;
  int hop = 128;
};

/// Mean STFT magnitude per bin, the profile format spectral_denoise expects.
inline std::vector<double> noise_profile(const AudioClip& noise, const StftConfig& cfg = {}) {
  return mean_magnitude(stft(noise, cfg.window_size, cfg.hop));
}

/// Magnitude spectral subtraction |Y| - a * N floored at zero, phase kept.
inline AudioClip spectral_denoise(const AudioClip& observed, std::span<const double> profile, double over_subtraction,
                                  const StftConfig& cfg = {}) {
  auto spec = stft(observed, cfg.window_size, cfg.hop);
  if (static_cast<Eigen::Index>(profile.size()) != spec.bins()) {
    fail(ErrorKind::ProfileShapeMismatch, "noise profile has " + std::to_string(profile.size()) + " bins, STFT has " +
                                              std::to_string(spec.bins()));
  }
  if (!(over_subtraction >= 0.0)) fail(ErrorKind::InvalidSpec, "over_subtraction must be >= 0");
  for (Eigen::Index k = 0; k < spec.bins(); ++k) {
    const double sub = over_subtraction * profile[static_cast<std::size_t>(k)];
    if (sub == 0.0) continue;
    for (Eigen::Index t = 0; t < spec.time_frames(); ++t) {
      Complex& c = spec.frames(k, t);
      const double mag = std::abs(c);
      c = mag > sub ? c * ((mag - sub) / mag) : Complex{};
    }
  }
  return istft(spec);
}

}  // namespace hsc
