// tests/test_system_id.cpp

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

#include "hsc/corruption.hpp"
#include "hsc/system_id.hpp"
#include "support/oracles.hpp"

using namespace hsc;
namespace ht = hsc::testing;

namespace {

// Decaying random IR with a unit direct path.
std::vector<double> known_ir(std::size_t taps, std::uint64_t seed) {
  auto h = ht::gaussian(taps, 0.4, seed);
  h[0] = 1.0;
  for (std::size_t i = 1; i < taps; ++i) h[i] *= std::exp(-static_cast<double>(i) / 12.0);
  return h;
}

AudioClip add_noise(const std::vector<double>& y, double snr_db, std::uint64_t seed) {
  const double power = energy(y) / static_cast<double>(y.size());
  const auto w = ht::gaussian(y.size(), std::sqrt(power / std::pow(10.0, snr_db / 10.0)), seed);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + w[i];
  return AudioClip(std::move(out), 16000);
}

// Frequency from interpolated upward zero crossings in a short window.
double measured_frequency(const AudioClip& clip, double t_center, double half_window = 0.02) {
  const auto& x = clip.samples();
  const double rate = clip.sample_rate_hz();
  const auto lo = static_cast<std::size_t>((t_center - half_window) * rate);
  const auto hi = static_cast<std::size_t>((t_center + half_window) * rate);
  std::vector<double> crossings;
  for (std::size_t i = lo; i < hi; ++i) {
    if (x[i] < 0.0 && x[i + 1] >= 0.0) crossings.push_back(i + x[i] / (x[i] - x[i + 1]));
  }
  REQUIRE(crossings.size() >= 2);
  return (crossings.size() - 1) * rate / (crossings.back() - crossings.front());
}

const SweepSpec kSpec{};

const AudioClip& reference_sweep() {
  static const AudioClip s = synth_sweep(kSpec);
  return s;
}

}  // namespace

TEST_CASE("sweep frequency law", "[system_id]") {
  CHECK(sweep_instantaneous_frequency(kSpec, 0.0) == 20.0);
  CHECK(sweep_instantaneous_frequency(kSpec, 30.0) == Catch::Approx(8000.0).epsilon(1e-12));
  CHECK(sweep_instantaneous_frequency(kSpec, 15.0) == Catch::Approx(400.0).epsilon(1e-12));

  const auto& s = reference_sweep();
  const double lead = kSpec.pad_lead_seconds;
  CHECK(std::abs(measured_frequency(s, lead + 15.0) - 400.0) < 1.0);
  CHECK(std::abs(measured_frequency(s, lead + 5.0, 0.1) - sweep_instantaneous_frequency(kSpec, 5.0)) < 0.5);
  CHECK(std::abs(measured_frequency(s, lead + 29.0, 0.005) - sweep_instantaneous_frequency(kSpec, 29.0)) < 20.0);
}

TEST_CASE("sweep layout", "[system_id]") {
  const auto& s = reference_sweep();
  CHECK(s.size() == 8000 + 480000 + 80000);
  for (std::size_t i = 0; i < 8000; ++i) REQUIRE(s[i] == 0.0);
  for (std::size_t i = 488000; i < s.size(); ++i) REQUIRE(s[i] == 0.0);
  CHECK(peak_abs(std::span(s.samples()).subspan(8000 + 16000, 16000)) == Catch::Approx(1.0).margin(1e-3));
  SweepSpec bad;
  bad.f_max_hz = 9000.0;
  CHECK_THROWS_AS(synth_sweep(bad), Error);
  bad = SweepSpec{};
  bad.f_min_hz = 0.0;
  CHECK_THROWS_AS(synth_sweep(bad), Error);
}

TEST_CASE("noise and burst probes", "[system_id]") {
  const auto a = synth_noise_probe(10.0, 3);
  CHECK(a.size() == 160000 + 8000 + 80000);
  CHECK(a == synth_noise_probe(10.0, 3));
  CHECK_FALSE(a == synth_noise_probe(10.0, 4));
  CHECK(peak_abs(a.samples()) == Catch::Approx(1.0));

  const AudioClip body(std::vector<double>(a.data().begin() + 8000, a.data().begin() + 168000), 16000);
  const auto s = stft(body, 512, 256);
  double log_sum = 0.0, sum = 0.0;
  for (Eigen::Index k = 1; k < s.bins() - 1; ++k) {
    const double p = s.frames.row(k).cwiseAbs2().mean();
    log_sum += std::log(p);
    sum += p;
  }
  const double count = static_cast<double>(s.bins() - 2);
  CHECK(std::exp(log_sum / count) / (sum / count) > 0.9);

  CHECK(synth_burst_probe(1).size() == 1600 + 8000 + 80000);
  CHECK_THROWS_AS(synth_noise_probe(0.0, 1), Error);
}

TEST_CASE("sweep estimator recovers a known 64-tap system", "[system_id][oracle]") {
  const auto k = known_ir(64, 5);
  const auto y = convolve(reference_sweep().samples(), k);
  SECTION("noiseless") {
    const auto est = estimate_ir_sweep_detailed(AudioClip(y, 16000), kSpec, 64);
    CHECK(est.onset == 0);
    CHECK(ht::normalized_error_db(est.ir.taps(), k) <= -30.0);
    CHECK(est.residual_db < -30.0);
  }
  SECTION("40 dB SNR") {
    const auto est = estimate_ir_sweep(add_noise(y, 40.0, 6), kSpec, 64);
    CHECK(ht::normalized_error_db(est.taps(), k) <= -20.0);
  }
}

TEST_CASE("sweep estimator identities and failures", "[system_id]") {
  SECTION("the sweep itself gives a unit impulse") {
    const auto est = estimate_ir_sweep(reference_sweep(), kSpec, 32);
    std::vector<double> unit(32, 0.0);
    unit[0] = 1.0;
    CHECK(ht::normalized_error_db(est.taps(), unit) < -30.0);
  }
  SECTION("silence") {
    try {
      estimate_ir_sweep(AudioClip(std::vector<double>(reference_sweep().size(), 0.0), 16000), kSpec, 64);
      FAIL("expected NoSweepDetected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoSweepDetected);
    }
  }
  SECTION("noise only") {
    const AudioClip noise(ht::gaussian(reference_sweep().size(), 0.1, 8), 16000);
    CHECK_THROWS_AS(estimate_ir_sweep(noise, kSpec, 64), Error);
  }
  SECTION("ir_length bounds") {
    CHECK_THROWS_AS(estimate_ir_sweep(AudioClip(ht::gaussian(10, 1.0, 1), 16000), kSpec, 64), Error);
  }
}

TEST_CASE("sweep estimator is delay covariant", "[system_id][property]") {
  const auto k = known_ir(64, 9);
  const auto y = convolve(reference_sweep().samples(), k);
  const auto base = estimate_ir_sweep_detailed(AudioClip(y, 16000), kSpec, 64);
  const auto shifted = estimate_ir_sweep_detailed(delay(AudioClip(y, 16000), 777), kSpec, 64);
  CHECK(shifted.onset == base.onset + 777);
  CHECK(ht::normalized_error_db(shifted.ir.taps(), base.ir.taps()) < -40.0);
}

TEST_CASE("noise estimator", "[system_id][oracle]") {
  const auto probe = synth_noise_probe(10.0, 21);
  const auto k = known_ir(64, 22);
  SECTION("60 dB SNR") {
    const auto rec = add_noise(convolve(probe.samples(), k), 60.0, 23);
    const auto est = estimate_ir_noise_detailed(rec, probe, 64);
    CHECK(ht::normalized_error_db(est.ir.taps(), k) <= -25.0);
    CHECK(est.residual_db < -40.0);
  }
  SECTION("reference equal to recording") {
    const auto est = estimate_ir_noise(probe, probe, 16);
    std::vector<double> unit(16, 0.0);
    unit[0] = 1.0;
    CHECK(ht::normalized_error_db(est.taps(), unit) < -30.0);
  }
  SECTION("burst probe") {
    const auto burst = synth_burst_probe(30);
    const auto rec = add_noise(convolve(burst.samples(), k), 60.0, 31);
    CHECK(ht::normalized_error_db(estimate_ir_noise(rec, burst, 64).taps(), k) <= -20.0);
  }
  SECTION("spectral null without regularization is an error, with it is finite") {
    const auto x = ht::gaussian(4000, 0.3, 40);
    const std::vector<double> two{1.0, 1.0};
    const AudioClip nulled(convolve(x, two), 16000);
    const AudioClip rec(convolve(nulled.samples(), k), 16000);
    try {
      estimate_ir_noise(rec, nulled, 64, 0.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateKernel);
    }
    const auto est = estimate_ir_noise(rec, nulled, 64, 1e-3);
    for (double v : est.taps()) REQUIRE(std::isfinite(v));
  }
  SECTION("rate mismatch") {
    CHECK_THROWS_AS(estimate_ir_noise(AudioClip({1.0, 0.0}, 8000), AudioClip({1.0, 0.0}, 16000), 1), Error);
  }
}

TEST_CASE("sweep and noise estimators agree", "[system_id][property]") {
  const auto k = known_ir(64, 50);
  const auto sweep_rec = add_noise(convolve(reference_sweep().samples(), k), 60.0, 51);
  const auto probe = synth_noise_probe(10.0, 52);
  const auto noise_rec = add_noise(convolve(probe.samples(), k), 60.0, 53);
  const auto a = estimate_ir_sweep(sweep_rec, kSpec, 64);
  const auto b = estimate_ir_noise(noise_rec, probe, 64);
  CHECK(ht::normalized_error_db(a.taps(), b.taps()) <= -20.0);
}

TEST_CASE("nonlinear distortion shows up in the residual", "[system_id]") {
  const auto probe = synth_noise_probe(4.0, 60);
  const auto k = butterworth_lowpass_ir(300.0, 4, 512);
  const AudioClip linear(convolve(probe.samples(), k.taps()), 16000);
  DistortionSpec d;
  d.harmonic_gains = {0.2, 0.1};
  const auto bent = apply_harmonic_distortion(linear, d);
  const double lambda = 1e-8 * energy(probe.samples());
  const double clean_residual = estimate_ir_noise_detailed(linear, probe, 512, lambda).residual_db;
  const double bent_residual = estimate_ir_noise_detailed(bent, probe, 512, lambda).residual_db;
  CHECK(bent_residual > clean_residual + 10.0);
}

TEST_CASE("align", "[system_id]") {
  const AudioClip x(ht::speech_like(2.0, 16000, 70), 16000);
  CHECK(align(x, x) == 0);
  CHECK(align(delay(x, 1234), x) == 1234);

  auto model = make_level_model(parse_level_id("T1L2"), LevelRegistry::builtin(), 3);
  model.delay_seconds = 0.3;
  const auto rec = apply_corruption(x, model, 4);
  CHECK(std::abs(static_cast<long>(align(rec, x)) - 4800) <= 8);

  try {
    align(AudioClip(ht::gaussian(32000, 0.1, 71), 16000), x);
    FAIL("expected NoCorrelation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoCorrelation);
  }
}
