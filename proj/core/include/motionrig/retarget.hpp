#pragma once

#include <vector>

#include "motionrig/skeleton.hpp"

namespace motionrig {

/// Target bone lengths measured on a reference frame, indexed by bone index of
/// the topology. Masked bones have no target (an endpoint was absent in the
/// reference, or the bone is not a body bone).
struct BoneLengthProfile {
  std::vector<double> lengths;
  std::vector<bool> masked;

  bool is_masked(std::size_t bone) const { return masked.at(bone); }
};

/// Measures every body bone of `topology` on `reference`.
BoneLengthProfile measure_profile(const KeypointFrame& reference, const SkeletonTopology& topology);

/// Anchor-point rescale: the root (neck) stays fixed; bones are visited in
/// pre-order and each unmasked body bone's child is slid along the current
/// bone direction to the profile length, carrying its whole subtree (hands
/// included) by the same displacement. Face keypoints never move. Bones with
/// an endpoint absent in `frame` are skipped.
///
/// Errors: MissingAnchor when the root is absent; ZeroLengthBone when an
/// unmasked bone has coincident endpoints.
KeypointFrame retarget_frame(const KeypointFrame& frame, const BoneLengthProfile& profile,
                             const SkeletonTopology& topology);

MotionClip retarget_clip(const MotionClip& clip, const BoneLengthProfile& profile);

}  // namespace motionrig
