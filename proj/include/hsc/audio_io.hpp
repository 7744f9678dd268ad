// hsc/audio_io.hpp

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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "hsc/error.hpp"
#include "hsc/signal.hpp"

namespace hsc {

struct WavSpec {
  int bit_depth = 16;
  int channels = 1;
  int sample_rate_hz = kChallengeRate;

  friend bool operator==(const WavSpec&, const WavSpec&) = default;
};

inline constexpr WavSpec kChallengeWavSpec{16, 1, kChallengeRate};

struct WriteReport {
  std::size_t frames = 0;
  std::size_t clipped_samples = 0;
};

struct FormatReport {
  WavSpec spec;
  bool pcm = true;
  std::vector<std::string> violations;  // field names: "encoding", "bit_depth", "channels", "sample_rate"

  bool conformant() const noexcept { return violations.empty(); }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline void put_u16le(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

struct ParsedWav {
  WavSpec spec;
  std::uint16_t format_tag = 0;
  bool pcm = false;
  std::size_t block_align = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
};

inline constexpr std::uint16_t kFormatPcm = 1;
inline constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// Walks the RIFF chunk list. Only container-level problems throw here; the
// encoding checks are left to the caller so validation can report them.
inline ParsedWav parse_wav(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorKind::MalformedContainer, name + ": missing RIFF/WAVE header");
  }
  ParsedWav out;
  bool have_fmt = false;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = read_u32le(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) fail(ErrorKind::MalformedContainer, name + ": truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      out.format_tag = read_u16le(f);
      out.spec.channels = read_u16le(f + 2);
      out.spec.sample_rate_hz = static_cast<int>(read_u32le(f + 4));
      out.block_align = read_u16le(f + 12);
      out.spec.bit_depth = read_u16le(f + 14);
      out.pcm = out.format_tag == kFormatPcm;
      if (out.format_tag == kFormatExtensible && size >= 40) {
        // SubFormat GUID starts at offset 24; its first two bytes hold the format tag.
        out.pcm = read_u16le(f + 24) == kFormatPcm;
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      // Some writers leave the data size unset while streaming; clamp to what is present.
      out.data = bytes.data() + body;
      out.data_size = std::min(size, available);
      have_data = true;
    }
    if (size > available) break;
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(ErrorKind::MalformedContainer, name + ": no fmt chunk");
  if (!have_data) fail(ErrorKind::MalformedContainer, name + ": no data chunk");
  if (out.spec.channels <= 0 || out.spec.sample_rate_hz <= 0 || out.spec.bit_depth <= 0) {
    fail(ErrorKind::MalformedContainer, name + ": zero channels, rate or bit depth");
  }
  return out;
}

inline std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

inline double decode_sample(const unsigned char* p, int bits) {
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16le(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(read_u32le(p)) / 2147483648.0;
    default:
      return 0.0;
  }
}

inline std::int16_t quantize16(double s) {
  const double scaled = std::nearbyint(s * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace detail

/// Decodes a mono PCM WAV file to samples in [-1, 1).
inline AudioClip read_wav(const std::filesystem::path& path) {
  const auto bytes = detail::slurp(path);
  const auto wav = detail::parse_wav(bytes, path.string());
  if (!wav.pcm) {
    fail(ErrorKind::UnsupportedEncoding,
         path.string() + ": format tag " + std::to_string(wav.format_tag) + " is not integer PCM");
  }
  const int bits = wav.spec.bit_depth;
  if (bits != 8 && bits != 16 && bits != 24 && bits != 32) {
    fail(ErrorKind::UnsupportedEncoding, path.string() + ": " + std::to_string(bits) + "-bit PCM");
  }
  if (wav.spec.channels != 1) {
    fail(ErrorKind::MultiChannel, path.string() + ": " + std::to_string(wav.spec.channels) + " channels");
  }
  const std::size_t width = static_cast<std::size_t>(bits / 8);
  const std::size_t frames = wav.data_size / width;
  std::vector<double> samples(frames);
  for (std::size_t i = 0; i < frames; ++i) samples[i] = detail::decode_sample(wav.data + i * width, bits);
  return AudioClip(std::move(samples), wav.spec.sample_rate_hz);
}

/// Writes 16-bit PCM. Out-of-range samples are clamped and counted.
inline WriteReport write_wav(const AudioClip& clip, const std::filesystem::path& path,
                             const WavSpec& spec = kChallengeWavSpec) {
  require_same_rate(clip.sample_rate_hz(), spec.sample_rate_hz, "write_wav");
  if (spec.bit_depth != 16) fail(ErrorKind::UnsupportedEncoding, "only 16-bit output is supported");
  if (spec.channels != 1) fail(ErrorKind::MultiChannel, "only mono output is supported");

  WriteReport report;
  report.frames = clip.size();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32le(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32le(out, 16);
  detail::put_u16le(out, detail::kFormatPcm);
  detail::put_u16le(out, 1);
  detail::put_u32le(out, static_cast<std::uint32_t>(spec.sample_rate_hz));
  detail::put_u32le(out, static_cast<std::uint32_t>(spec.sample_rate_hz) * 2);
  detail::put_u16le(out, 2);
  detail::put_u16le(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32le(out, data_bytes);
  for (double s : clip.samples()) {
    if (s > 1.0 || s < -1.0) ++report.clipped_samples;
    detail::put_u16le(out, static_cast<std::uint16_t>(detail::quantize16(s)));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorKind::IoFailure, "write failed for " + path.string());
  return report;
}

/// Checks a file against the challenge format (16-bit, mono, 16 kHz PCM).
inline FormatReport validate_challenge_format(const std::filesystem::path& path) {
  const auto bytes = detail::slurp(path);
  const auto wav = detail::parse_wav(bytes, path.string());
  FormatReport report;
  report.spec = wav.spec;
  report.pcm = wav.pcm;
  if (!wav.pcm) report.violations.emplace_back("encoding");
  if (wav.spec.bit_depth != kChallengeWavSpec.bit_depth) report.violations.emplace_back("bit_depth");
  if (wav.spec.channels != kChallengeWavSpec.channels) report.violations.emplace_back("channels");
  if (wav.spec.sample_rate_hz != kChallengeWavSpec.sample_rate_hz) report.violations.emplace_back("sample_rate");
  return report;
}

}  // namespace hsc
