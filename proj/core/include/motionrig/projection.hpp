#pragma once

#include <optional>

#include "motionrig/skeleton.hpp"

namespace motionrig {

/// Target box in normalized image coordinates, given by center and half extents.
struct FitBox {
  double cx = 0.5;
  double cy = 0.5;
  double half_width = 0.35;
  double half_height = 0.4;
};

struct ProjectionConfig {
  /// Negate y after dropping z (model space is y-up, images are y-down).
  bool flip_y = true;
  /// When unset, coordinates are passed through without scaling or centering.
  std::optional<FitBox> fit_box = FitBox{};
};

/// Orthographic projection onto the xy-plane followed by one uniform
/// scale + translation for the whole clip, chosen so the union bounding box of
/// all frames is centered in `fit_box` and fits inside it with aspect ratio
/// preserved. Joint j of each 3D frame maps to the j-th body keypoint of
/// `topology`; non-body keypoints are emitted absent, body keypoints with
/// confidence 1.
///
/// Throws `Error(EmptyClip)` for an empty clip and `Error(JointCountMismatch)`
/// when the joint count differs from the topology's body keypoint count.
MotionClip project(const MotionClip3D& clip, const ProjectionConfig& config, TopologyPtr topology);

}  // namespace motionrig
