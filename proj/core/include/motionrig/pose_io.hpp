#pragma once

/// \file pose_io.hpp
/// \brief Pose clip interchange format, 3D motion files and detector ingestion.
///
/// Formats are documented in docs/formats.md.

#include <filesystem>
#include <string>
#include <string_view>

#include "motionrig/skeleton.hpp"

namespace motionrig {

inline constexpr int kPoseClipVersion = 1;
inline constexpr int kMotion3dVersion = 1;

/// Pixel size of the frames a clip is meant to be rendered at.
struct FrameSize {
  int height = 1024;
  int width = 576;

  friend bool operator==(FrameSize, FrameSize) = default;
};

struct PoseClipDocument {
  MotionClip clip;
  FrameSize frame_size;
};

/// Canonical, byte-stable serialization. Numbers use the shortest decimal
/// form that round-trips exactly.
std::string write_clip(const MotionClip& clip, FrameSize size);

/// Parses a pose clip file. Throws `Error(ParseError)` for malformed input,
/// version or frame-count mismatch, out-of-range confidence; and
/// `Error(UnknownTopology)` for an unknown topology name.
PoseClipDocument read_clip(std::string_view bytes);

struct ReferencePose {
  TopologyPtr topology;
  KeypointFrame frame;
  FrameSize image_size;
};

/// Reads a single reference skeleton, either a pose clip file with exactly
/// one frame or an OpenPose-style detector document (`people[0]` with
/// `pose_keypoints_2d` and optional face / hand arrays, pixel coordinates
/// normalized by `canvas_width` / `canvas_height`).
ReferencePose read_reference(std::string_view bytes);

/// A reference pose as a one-frame clip file.
std::string write_reference(const ReferencePose& reference);

std::string write_motion3d(const MotionClip3D& clip);
MotionClip3D read_motion3d(std::string_view bytes);

/// Whole-file helpers; throw `Error(Io)`.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace motionrig
