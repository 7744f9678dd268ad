// hsc/system_id.hpp

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
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "hsc/dsp.hpp"
#include "hsc/error.hpp"
#include "hsc/signal.hpp"

namespace hsc {

struct ProbePadding {
  double lead_seconds = 0.5;
  double trail_seconds = 5.0;
};

/// Exponential sine sweep, phase-compatible with librosa.chirp(linear=False).
struct SweepSpec {
  double f_min_hz = 20.0;
  double f_max_hz = 8000.0;
  double duration_seconds = 30.0;
  int sample_rate_hz = kChallengeRate;
  double pad_lead_seconds = 0.5;
  double pad_trail_seconds = 5.0;

  void validate() const {
    if (!(f_min_hz > 0.0 && f_min_hz < f_max_hz && f_max_hz <= 0.5 * sample_rate_hz)) {
      fail(ErrorKind::InvalidSpec, "sweep: need 0 < f_min < f_max <= Nyquist");
    }
    if (!(duration_seconds > 0.0) || sample_rate_hz <= 0) fail(ErrorKind::InvalidSpec, "sweep: need duration > 0");
    if (!(pad_lead_seconds >= 0.0 && pad_trail_seconds >= 0.0)) fail(ErrorKind::InvalidSpec, "sweep: negative padding");
  }

  std::size_t sweep_samples() const {
    return static_cast<std::size_t>(std::llround(duration_seconds * sample_rate_hz));
  }
  std::size_t lead_samples() const { return seconds_to_samples(pad_lead_seconds, sample_rate_hz); }
};

inline double sweep_instantaneous_frequency(const SweepSpec& spec, double t) {
  return spec.f_min_hz * std::pow(spec.f_max_hz / spec.f_min_hz, t / spec.duration_seconds);
}

namespace detail {

inline std::vector<double> sweep_core(const SweepSpec& spec) {
  const std::size_t n = spec.sweep_samples();
  const double ratio = spec.f_max_hz / spec.f_min_hz;
  const double k = 2.0 * std::numbers::pi * spec.f_min_hz * spec.duration_seconds / std::log(ratio);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate_hz;
    s[i] = std::sin(k * (std::pow(ratio, t / spec.duration_seconds) - 1.0));
  }
  return s;
}

}  // namespace detail

/// Unit-amplitude sweep with lead and trail silence.
inline AudioClip synth_sweep(const SweepSpec& spec) {
  spec.validate();
  return pad(AudioClip(detail::sweep_core(spec), spec.sample_rate_hz), spec.pad_lead_seconds, spec.pad_trail_seconds);
}

/// Peak-normalized white Gaussian noise with padding.
inline AudioClip synth_noise_probe(double duration_seconds, std::uint64_t seed, const ProbePadding& padding = {},
                                   int rate = kChallengeRate) {
  if (!(duration_seconds > 0.0)) fail(ErrorKind::InvalidSpec, "noise probe: duration must be positive");
  const std::size_t n = std::max<std::size_t>(1, seconds_to_samples(duration_seconds, rate));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = gauss(rng);
  const double peak = peak_abs(x);
  for (double& v : x) v /= peak;
  return pad(AudioClip(std::move(x), rate), padding.lead_seconds, padding.trail_seconds);
}

inline AudioClip synth_burst_probe(std::uint64_t seed, double duration_seconds = 0.1, const ProbePadding& padding = {},
                                   int rate = kChallengeRate) {
  return synth_noise_probe(duration_seconds, seed, padding, rate);
}

struct IrEstimateOptions {
  // Regularization relative to the mean power of the excitation spectrum.
  double relative_regularization = 1e-6;
  double onset_fraction = 0.1;
  // Sweep detection: peak-to-mean power of the inverse-filtered recording.
  double detection_ratio = 1000.0;
  // How far before the main peak the onset search starts.
  double onset_search_seconds = 0.05;
};

struct IrEstimate {
  ImpulseResponse ir = ImpulseResponse::identity();
  std::size_t onset = 0;      // lag of the first tap relative to the excitation
  double residual_db = 0.0;   // 10 log10(|y - x * k|^2 / |y|^2)
  double detection_ratio = 0.0;
};

/// 10 log10 of the energy the LTI model leaves unexplained.
inline double ir_residual_db(const AudioClip& recorded, const AudioClip& excitation, const ImpulseResponse& ir,
                             std::size_t onset) {
  const auto model = convolve(excitation.samples(), ir.taps());
  double err = 0.0;
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    const double m = i >= onset && i - onset < model.size() ? model[i - onset] : 0.0;
    err += (recorded[i] - m) * (recorded[i] - m);
  }
  const double e = energy(recorded.samples());
  return e > 0.0 ? 10.0 * std::log10(std::max(err, 1e-300) / e) : 0.0;
}

namespace detail {

// Regularized least-squares deconvolution K = Y X* / (|X|^2 + lambda) on a
// linear (non-wrapping) FFT grid. Returns the causal part, length len(y).
inline std::vector<double> spectral_division(std::span<const double> y, std::span<const double> x, double lambda) {
  const std::size_t n = fft::next_pow2(y.size() + x.size());
  Spectrum fy = fft::forward(y, n);
  const Spectrum fx = fft::forward(x, n);
  for (std::size_t k = 0; k < n; ++k) fy[k] = fy[k] * std::conj(fx[k]) / (std::norm(fx[k]) + lambda);
  std::vector<double> h = fft::inverse_real(fy);
  h.resize(y.size());
  return h;
}

inline double mean_spectral_power(std::span<const double> x) {
  // Parseval: mean |X_k|^2 over an n-point grid equals the signal energy.
  return energy(x);
}

inline IrEstimate extract_ir(const std::vector<double>& h, std::size_t ir_length, const IrEstimateOptions& opt,
                             int rate) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[peak])) peak = i;
  }
  const double threshold = opt.onset_fraction * std::abs(h[peak]);
  const std::size_t back = seconds_to_samples(opt.onset_search_seconds, rate);
  std::size_t onset = peak >= back ? peak - back : 0;
  while (onset < peak && std::abs(h[onset]) < threshold) ++onset;
  std::vector<double> taps(ir_length, 0.0);
  for (std::size_t i = 0; i < ir_length && onset + i < h.size(); ++i) taps[i] = h[onset + i];
  IrEstimate est;
  est.ir = ImpulseResponse(std::move(taps), rate);
  est.onset = onset;
  return est;
}

}  // namespace detail

/// Sweep measurement. The inverse filter (time-reversed sweep with a
/// 6 dB/octave envelope) detects the sweep; the taps come from regularized
/// spectral division against the padded reference sweep.
inline IrEstimate estimate_ir_sweep_detailed(const AudioClip& recorded, const SweepSpec& spec, std::size_t ir_length,
                                             const IrEstimateOptions& opt = {}) {
  spec.validate();
  require_same_rate(recorded.sample_rate_hz(), spec.sample_rate_hz, "estimate_ir_sweep");
  if (ir_length == 0 || ir_length > recorded.size()) {
    fail(ErrorKind::InvalidSpec, "estimate_ir_sweep: ir_length must be in [1, len(recorded)]");
  }
  if (peak_abs(recorded.samples()) == 0.0) fail(ErrorKind::NoSweepDetected, "recording is silent");

  const auto core = detail::sweep_core(spec);
  std::vector<double> inverse(core.rbegin(), core.rend());
  const double ratio = spec.f_max_hz / spec.f_min_hz;
  for (std::size_t i = 0; i < inverse.size(); ++i) {
    inverse[i] *= std::pow(ratio, -static_cast<double>(i) / static_cast<double>(inverse.size()));
  }
  const auto compressed = convolve(recorded.samples(), inverse);
  const double peak = peak_abs(compressed);
  const double mean = energy(compressed) / static_cast<double>(compressed.size());
  const double detection = mean > 0.0 ? peak * peak / mean : 0.0;
  if (detection < opt.detection_ratio) {
    fail(ErrorKind::NoSweepDetected, "no sweep found in recording (peak-to-mean " + std::to_string(detection) + ")");
  }

  const AudioClip reference = synth_sweep(spec);
  const double lambda = opt.relative_regularization * detail::mean_spectral_power(reference.samples());
  const auto h = detail::spectral_division(recorded.samples(), reference.samples(), lambda);
  auto est = detail::extract_ir(h, ir_length, opt, spec.sample_rate_hz);
  est.detection_ratio = detection;
  est.residual_db = ir_residual_db(recorded, reference, est.ir, est.onset);
  return est;
}

inline ImpulseResponse estimate_ir_sweep(const AudioClip& recorded, const SweepSpec& spec, std::size_t ir_length) {
  return estimate_ir_sweep_detailed(recorded, spec, ir_length).ir;
}

inline constexpr double kDefaultNoiseRegularization = 1e-3;

/// Noise or burst measurement: K = R X* / (|X|^2 + lambda). With no lambda
/// given, lambda = 1e-3 times the mean power of the reference spectrum.
/// lambda = 0 is accepted only when the reference spectrum has no nulls.
inline IrEstimate estimate_ir_noise_detailed(const AudioClip& recorded, const AudioClip& reference,
                                             std::size_t ir_length, std::optional<double> regularization = {},
                                             const IrEstimateOptions& opt = {}) {
  require_same_rate(recorded.sample_rate_hz(), reference.sample_rate_hz(), "estimate_ir_noise");
  if (recorded.empty() || reference.empty()) fail(ErrorKind::EmptyInput, "estimate_ir_noise: empty clip");
  if (ir_length == 0 || ir_length > recorded.size()) {
    fail(ErrorKind::InvalidSpec, "estimate_ir_noise: ir_length must be in [1, len(recorded)]");
  }
  const double mean_power = detail::mean_spectral_power(reference.samples());
  if (mean_power == 0.0) fail(ErrorKind::SilentInput, "estimate_ir_noise: silent reference");
  const double lambda = regularization.value_or(kDefaultNoiseRegularization * mean_power);
  if (!(lambda >= 0.0)) fail(ErrorKind::InvalidSpec, "regularization must be >= 0");
  if (lambda == 0.0) {
    const std::size_t n = fft::next_pow2(recorded.size() + reference.size());
    const Spectrum fx = fft::forward(reference.samples(), n);
    double max_power = 0.0;
    for (const auto& c : fx) max_power = std::max(max_power, std::norm(c));
    for (const auto& c : fx) {
      if (std::norm(c) <= 1e-12 * max_power) {
        fail(ErrorKind::DegenerateKernel, "reference spectrum has a null; unregularized division is undefined");
      }
    }
  }
  const auto h = detail::spectral_division(recorded.samples(), reference.samples(), lambda);
  auto est = detail::extract_ir(h, ir_length, opt, recorded.sample_rate_hz());
  est.residual_db = ir_residual_db(recorded, reference, est.ir, est.onset);
  return est;
}

inline ImpulseResponse estimate_ir_noise(const AudioClip& recorded, const AudioClip& reference, std::size_t ir_length,
                                         std::optional<double> regularization = {}) {
  return estimate_ir_noise_detailed(recorded, reference, ir_length, regularization).ir;
}

struct AlignOptions {
  double max_delay_seconds = 0.5;
  std::size_t ir_budget = 8000;  // extra lag allowed for the IR's own latency
  double min_correlation = 0.05;
};

/// Lag in [0, max_delay + ir_budget] maximizing the cross-correlation of
/// recorded against reference.
inline std::size_t align(const AudioClip& recorded, const AudioClip& reference, const AlignOptions& opt = {}) {
  require_same_rate(recorded.sample_rate_hz(), reference.sample_rate_hz(), "align");
  if (recorded.empty() || reference.empty()) fail(ErrorKind::EmptyInput, "align: empty clip");
  const std::size_t max_lag = std::min(recorded.size() - 1,
                                       seconds_to_samples(opt.max_delay_seconds, recorded.sample_rate_hz()) +
                                           opt.ir_budget);
  const auto r = cross_correlate(recorded.samples(), reference.samples(), max_lag);
  const std::size_t lag = static_cast<std::size_t>(std::distance(r.begin(), std::max_element(r.begin(), r.end())));
  const double norm = std::sqrt(energy(recorded.samples()) * energy(reference.samples()));
  if (norm == 0.0 || r[lag] / norm < opt.min_correlation) {
    fail(ErrorKind::NoCorrelation, "no correlation between recording and reference");
  }
  return lag;
}

}  // namespace hsc
