// hsc/error.hpp

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hsc {

enum class ErrorKind {
  // audio-io
  MalformedContainer,
  UnsupportedEncoding,
  MultiChannel,
  IoFailure,
  SampleRateMismatch,
  // dsp-core
  EmptyInput,
  InvalidWindow,
  NonReconstructibleParameters,
  InvalidRate,
  SilentInput,
  // corruption-sim / challenge-engine
  UnknownLevel,
  InvalidSpec,
  MalformedId,
  ZeroLengthAudio,
  // system-id
  NoSweepDetected,
  NoCorrelation,
  // deconv
  DegenerateKernel,
  ProfileShapeMismatch,
  // text-metrics
  EmptyReference,
  EmptyBatch,
  InvalidVariantMap,
  // dataset-manager
  ChecksumMismatch,
  NetworkFailure,
  DiskFull,
  DuplicateFilename,
  UnparseableLine,
  MissingAudioFile,
  // cli / config
  InvalidConfig,
  Usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedContainer: return "MalformedContainer";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::MultiChannel: return "MultiChannel";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::NonReconstructibleParameters: return "NonReconstructibleParameters";
    case ErrorKind::InvalidRate: return "InvalidRate";
    case ErrorKind::SilentInput: return "SilentInput";
    case ErrorKind::UnknownLevel: return "UnknownLevel";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::MalformedId: return "MalformedId";
    case ErrorKind::ZeroLengthAudio: return "ZeroLengthAudio";
    case ErrorKind::NoSweepDetected: return "NoSweepDetected";
    case ErrorKind::NoCorrelation: return "NoCorrelation";
    case ErrorKind::DegenerateKernel: return "DegenerateKernel";
    case ErrorKind::ProfileShapeMismatch: return "ProfileShapeMismatch";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::InvalidVariantMap: return "InvalidVariantMap";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::NetworkFailure: return "NetworkFailure";
    case ErrorKind::DiskFull: return "DiskFull";
    case ErrorKind::DuplicateFilename: return "DuplicateFilename";
    case ErrorKind::UnparseableLine: return "UnparseableLine";
    case ErrorKind::MissingAudioFile: return "MissingAudioFile";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hsc
