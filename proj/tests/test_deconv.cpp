// tests/test_deconv.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "hsc/corruption.hpp"
#include "hsc/deconv.hpp"
#include "support/oracles.hpp"

using namespace hsc;
namespace ht = hsc::testing;

namespace {

AudioClip noisy(const std::vector<double>& y, double snr_db, std::uint64_t seed) {
  const double power = energy(y) / static_cast<double>(y.size());
  const auto w = ht::gaussian(y.size(), std::sqrt(power / std::pow(10.0, snr_db / 10.0)), seed);
  std::vector<double> out(y);
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += w[i];
  return AudioClip(std::move(out), 16000);
}

}  // namespace

TEST_CASE("identity kernel returns the observation", "[deconv]") {
  const AudioClip x(ht::gaussian(5000, 0.2, 1), 16000);
  for (double lambda : {0.0, 1e-12}) {
    const auto out = wiener_deconvolve(x, ImpulseResponse::identity(), WienerParams{lambda, {}});
    REQUIRE(out.size() == x.size());
    CHECK(ht::max_abs_diff(out.samples(), x.samples()) < 1e-6);
  }
  const auto framed = wiener_deconvolve(x, ImpulseResponse::identity(), WienerParams{0.0, 256});
  CHECK(ht::max_abs_diff(framed.samples(), x.samples()) < 1e-6);
}

TEST_CASE("wiener inverts a low-pass at 60 dB SNR", "[deconv][oracle]") {
  const auto x = ht::speech_like(3.0, 16000, 2);
  const auto k = butterworth_lowpass_ir(4000.0, 4, 512);
  const auto y = noisy(ht::direct_convolve(x, k.taps()), 60.0, 3);
  double best = -1e9;
  for (double lambda : {1e-5, 1e-4, 1e-3, 1e-2}) {
    const auto out = wiener_deconvolve(y, k, WienerParams{lambda, {}});
    REQUIRE(out.size() == x.size());
    best = std::max(best, ht::snr_db(out.samples(), x));
  }
  CHECK(best >= 20.0);
  const auto framed = wiener_deconvolve(y, k, WienerParams{1e-4, 4096});
  CHECK(ht::snr_db(framed.samples(), x) >= 18.0);
}

TEST_CASE("wiener errors", "[deconv]") {
  const AudioClip y(ht::gaussian(100, 0.2, 1), 16000);
  try {
    wiener_deconvolve(y, ImpulseResponse(std::vector<double>(8, 0.0), 16000), WienerParams{});
    FAIL("expected DegenerateKernel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateKernel);
  }
  CHECK_THROWS_AS(wiener_deconvolve(y, ImpulseResponse({1.0}, 8000), WienerParams{}), Error);
  CHECK_THROWS_AS(wiener_deconvolve(y, ImpulseResponse::identity(), WienerParams{-1.0, {}}), Error);
  CHECK_THROWS_AS(wiener_deconvolve(y, ImpulseResponse(ht::gaussian(64, 1.0, 2), 16000), WienerParams{0.1, 64}), Error);
}

TEST_CASE("spectral nulls never produce NaN", "[deconv][property]") {
  const auto x = ht::gaussian(3000, 0.2, 4);
  const ImpulseResponse k({1.0, 1.0}, 16000);  // exact null at Nyquist
  const AudioClip y(ht::direct_convolve(x, k.taps()), 16000);
  for (double lambda : {0.0, 1e-9, 1e-3, 1.0}) {
    for (std::optional<int> frame : {std::optional<int>{}, std::optional<int>{512}}) {
      const auto out = wiener_deconvolve(y, k, WienerParams{lambda, frame});
      for (double v : out.samples()) REQUIRE(std::isfinite(v));
    }
  }
}

TEST_CASE("output energy falls monotonically with lambda", "[deconv][property]") {
  const auto x = ht::speech_like(1.0, 16000, 5);
  const auto k = butterworth_lowpass_ir(2000.0, 4, 256);
  const auto y = noisy(ht::direct_convolve(x, k.taps()), 40.0, 6);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda = 1e-6; lambda < 1e6; lambda *= 10.0) {
    const double e = energy(wiener_deconvolve(y, k, WienerParams{lambda, {}}).samples());
    CHECK(e < previous);
    previous = e;
  }
  CHECK(previous < 1e-6 * energy(x));
}

TEST_CASE("reconvolution reproduces the observation", "[deconv][property]") {
  const auto x = ht::gaussian(4000, 0.3, 7);
  const ImpulseResponse k({1.0, 0.5, -0.2, 0.1}, 16000);
  const AudioClip y(ht::direct_convolve(x, k.taps()), 16000);
  const auto xhat = wiener_deconvolve(y, k, WienerParams{1e-12, {}});
  const auto back = fft_convolve(xhat, k);
  REQUIRE(back.size() == y.size());
  CHECK(ht::max_abs_diff(back.samples(), y.samples()) / ht::max_abs(y.samples()) < 1e-4);
}

TEST_CASE("tikhonov grid search", "[deconv]") {
  const auto x = ht::speech_like(1.0, 16000, 8);
  const auto k = butterworth_lowpass_ir(1600.0, 6, 512);
  const auto y = noisy(ht::direct_convolve(x, k.taps()), 35.0, 9);
  std::vector<double> grid;
  for (double lambda = 1e-6; lambda <= 1.0; lambda *= std::sqrt(10.0)) grid.push_back(lambda);

  SECTION("single candidate equals wiener") {
    const double one[] = {1e-3};
    const auto r = tikhonov_deconvolve(y, k, one, [](const AudioClip&) { return 0.0; });
    CHECK(r.lambda == 1e-3);
    CHECK(r.clip == wiener_deconvolve(y, k, WienerParams{1e-3, {}}));
  }
  SECTION("choice matches the exhaustive SNR optimum") {
    const auto quality = [&](const AudioClip& c) {
      double err = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) err += (c[i] - x[i]) * (c[i] - x[i]);
      return -err;
    };
    const auto r = tikhonov_deconvolve(y, k, grid, quality);
    std::size_t best = 0;
    double best_snr = -1e9;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = ht::snr_db(wiener_deconvolve(y, k, WienerParams{grid[i], {}}).samples(), x);
      if (s > best_snr) best_snr = s, best = i;
    }
    const auto chosen = std::find(grid.begin(), grid.end(), r.lambda) - grid.begin();
    CHECK(std::abs(static_cast<long>(chosen) - static_cast<long>(best)) <= 1);
    CHECK(best > 0);
    CHECK(best + 1 < grid.size());
  }
  SECTION("ties go to the larger lambda whatever the grid order") {
    auto shuffled = grid;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
    const auto flat = [](const AudioClip&) { return 1.0; };
    CHECK(tikhonov_deconvolve(y, k, grid, flat).lambda == grid.back());
    CHECK(tikhonov_deconvolve(y, k, shuffled, flat).lambda == grid.back());
  }
  SECTION("empty grid") {
    CHECK_THROWS_AS(tikhonov_deconvolve(y, k, std::span<const double>{}, [](const AudioClip&) { return 0.0; }), Error);
  }
}

TEST_CASE("spectral subtraction", "[deconv]") {
  const std::size_t n = 48000;
  const auto tone = ht::sine(440.0, 0.3, n, 16000);
  const double tone_power = 0.3 * 0.3 / 2.0;
  const auto noise = ht::gaussian(n, std::sqrt(tone_power / 10.0), 10);  // 10 dB SNR
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = tone[i] + noise[i];
  const AudioClip observed(mix, 16000);
  const auto profile = noise_profile(AudioClip(ht::gaussian(16000, std::sqrt(tone_power / 10.0), 11), 16000));

  SECTION("zero profile and zero over-subtraction are identities") {
    const std::vector<double> zeros(profile.size(), 0.0);
    CHECK(ht::max_abs_diff(spectral_denoise(observed, zeros, 1.0).samples(), mix) < 1e-6);
    CHECK(ht::max_abs_diff(spectral_denoise(observed, profile, 0.0).samples(), mix) < 1e-6);
  }
  SECTION("tone SNR improves by at least 5 dB") {
    const auto out = spectral_denoise(observed, profile, 1.5);
    REQUIRE(out.size() == n);
    const double before = ht::snr_db(mix, tone);
    const double after = ht::snr_db(out.samples(), tone);
    CHECK(before == Catch::Approx(10.0).margin(0.3));
    CHECK(after >= before + 5.0);
  }
  SECTION("profile shape must match") {
    const std::vector<double> wrong(100, 0.0);
    try {
      spectral_denoise(observed, wrong, 1.0);
      FAIL("expected ProfileShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ProfileShapeMismatch);
    }
  }
}
