// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavecnet {

enum class Errc {
  UnknownWavelet,
  EvenN,
  InvalidArgument,
  TooShort,
  ShapeMismatch,
  NegativeLambda,
  OddSpatial,
  InvalidConfig,
  DivergedLoss,
  BadSeverity,
  ZeroReference,
  MissingCorruption,
  ShiftOutOfRange,
  NonPositive,
  Io,
  Format,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownWavelet: return "UnknownWavelet";
    case Errc::EvenN: return "EvenN";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TooShort: return "TooShort";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NegativeLambda: return "NegativeLambda";
    case Errc::OddSpatial: return "OddSpatial";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::BadSeverity: return "BadSeverity";
    case Errc::ZeroReference: return "ZeroReference";
    case Errc::MissingCorruption: return "MissingCorruption";
    case Errc::ShiftOutOfRange: return "ShiftOutOfRange";
    case Errc::NonPositive: return "NonPositive";
    case Errc::Io: return "Io";
    case Errc::Format: return "Format";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace wavecnet
