#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motionrig {

enum class Errc {
  InvalidArgument,
  MissingKeypoint,
  JointCountMismatch,
  EmptyClip,
  DegenerateFit,
  EmptyInput,
  InsufficientCorrespondences,
  MissingAnchor,
  ZeroLengthBone,
  MissingWristOrElbow,
  BlankInput,
  TopologyMismatch,
  FpsMismatch,
  ParseError,
  UnknownTopology,
  ZeroVector,
  DimensionMismatch,
  ImageTooSmall,
  ServiceUnreachable,
  ContractViolation,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// The single exception type thrown by the library. `code()` identifies the
/// failure class; `what()` carries a human-readable detail string.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace motionrig
