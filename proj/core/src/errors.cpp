#include "motionrig/errors.hpp"

namespace motionrig {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MissingKeypoint: return "MissingKeypoint";
    case Errc::JointCountMismatch: return "JointCountMismatch";
    case Errc::EmptyClip: return "EmptyClip";
    case Errc::DegenerateFit: return "DegenerateFit";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case Errc::MissingAnchor: return "MissingAnchor";
    case Errc::ZeroLengthBone: return "ZeroLengthBone";
    case Errc::MissingWristOrElbow: return "MissingWristOrElbow";
    case Errc::BlankInput: return "BlankInput";
    case Errc::TopologyMismatch: return "TopologyMismatch";
    case Errc::FpsMismatch: return "FpsMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownTopology: return "UnknownTopology";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::ServiceUnreachable: return "ServiceUnreachable";
    case Errc::ContractViolation: return "ContractViolation";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace motionrig
