// hsc/signal.hpp

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
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsc/error.hpp"

namespace hsc {

inline constexpr int kChallengeRate = 16000;

// Immutable mono waveform. Samples are finite; the [-1, 1] range is only
// guaranteed after a normalization or clamping step.
class AudioClip {
 public:
  AudioClip() = default;

  AudioClip(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), rate_(sample_rate_hz) {
    if (rate_ <= 0) fail(ErrorKind::InvalidRate, "sample rate must be positive");
    for (double s : samples_) {
      if (!std::isfinite(s)) fail(ErrorKind::InvalidSpec, "non-finite sample in clip");
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& data() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  int sample_rate_hz() const noexcept { return rate_; }
  double duration_seconds() const noexcept {
    return rate_ > 0 ? static_cast<double>(samples_.size()) / rate_ : 0.0;
  }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  // Moves the samples out; leaves the clip empty.
  std::vector<double> release() && { return std::move(samples_); }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::vector<double> samples_;
  int rate_ = kChallengeRate;
};

// Finite tap sequence of an LTI system, y = taps * x.
class ImpulseResponse {
 public:
  ImpulseResponse() = default;

  ImpulseResponse(std::vector<double> taps, int sample_rate_hz)
      : taps_(std::move(taps)), rate_(sample_rate_hz) {
    if (taps_.empty()) fail(ErrorKind::EmptyInput, "impulse response has no taps");
    if (rate_ <= 0) fail(ErrorKind::InvalidRate, "sample rate must be positive");
    for (double t : taps_) {
      if (!std::isfinite(t)) fail(ErrorKind::InvalidSpec, "non-finite impulse response tap");
    }
  }

  static ImpulseResponse identity(int sample_rate_hz = kChallengeRate) {
    return ImpulseResponse({1.0}, sample_rate_hz);
  }

  std::span<const double> taps() const noexcept { return taps_; }
  const std::vector<double>& data() const noexcept { return taps_; }
  std::size_t size() const noexcept { return taps_.size(); }
  int sample_rate_hz() const noexcept { return rate_; }

  double energy() const noexcept {
    double e = 0.0;
    for (double t : taps_) e += t * t;
    return e;
  }

  bool is_zero() const noexcept {
    for (double t : taps_) {
      if (t != 0.0) return false;
    }
    return true;
  }

  // Scaled copy with unit energy.
  ImpulseResponse normalized() const {
    const double e = energy();
    if (e == 0.0) fail(ErrorKind::DegenerateKernel, "cannot normalize an all-zero impulse response");
    std::vector<double> out(taps_);
    const double g = 1.0 / std::sqrt(e);
    for (double& t : out) t *= g;
    return ImpulseResponse(std::move(out), rate_);
  }

  friend bool operator==(const ImpulseResponse&, const ImpulseResponse&) = default;

 private:
  std::vector<double> taps_;
  int rate_ = kChallengeRate;
};

inline void require_same_rate(int a, int b, const char* what) {
  if (a != b) {
    fail(ErrorKind::SampleRateMismatch,
         std::string(what) + ": " + std::to_string(a) + " Hz vs " + std::to_string(b) + " Hz");
  }
}

inline double energy(std::span<const double> x) noexcept {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double peak_abs(std::span<const double> x) noexcept {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace hsc
