#include "motionrig/retarget.hpp"

#include <string>

#include "motionrig/errors.hpp"

namespace motionrig {

BoneLengthProfile measure_profile(const KeypointFrame& reference, const SkeletonTopology& topology) {
  validate_frame(reference, topology);
  const std::size_t n = topology.bones().size();
  BoneLengthProfile profile{std::vector<double>(n, 0.0), std::vector<bool>(n, true)};
  for (std::size_t b = 0; b < n; ++b) {
    const Bone& bone = topology.bones()[b];
    if (!topology.is_body_bone(b) || !reference.present(bone.parent) || !reference.present(bone.child))
      continue;
    profile.lengths[b] = bone_length(reference, b, topology);
    profile.masked[b] = false;
  }
  return profile;
}

KeypointFrame retarget_frame(const KeypointFrame& frame, const BoneLengthProfile& profile,
                             const SkeletonTopology& topology) {
  validate_frame(frame, topology);
  if (profile.lengths.size() != topology.bones().size() || profile.masked.size() != topology.bones().size())
    throw Error(Errc::InvalidArgument, "bone length profile does not match topology");
  if (!frame.present(topology.root()))
    throw Error(Errc::MissingAnchor, "anchor keypoint '" + topology.keypoint(topology.root()).name + "' is absent");

  KeypointFrame out = frame;
  for (std::size_t b : topology.preorder_bones()) {
    if (profile.masked[b] || !topology.is_body_bone(b)) continue;
    const Bone& bone = topology.bones()[b];
    if (!out.present(bone.parent) || !out.present(bone.child)) continue;

    const Vec2 parent = out.positions[bone.parent];
    const Vec2 child = out.positions[bone.child];
    const double len = distance(parent, child);
    if (len == 0.0)
      throw Error(Errc::ZeroLengthBone, "bone '" + topology.keypoint(bone.parent).name + "' -> '" +
                                            topology.keypoint(bone.child).name + "' has zero length");
    const Vec2 target = parent + (profile.lengths[b] / len) * (child - parent);
    const Vec2 delta = target - child;
    for (std::size_t k : subtree(topology, bone.child)) {
      if (k == bone.child) {
        out.positions[k] = target;
      } else if (out.present(k) && topology.group(k) != KeypointGroup::Face) {
        out.positions[k] += delta;
      }
    }
  }
  return out;
}

MotionClip retarget_clip(const MotionClip& clip, const BoneLengthProfile& profile) {
  std::vector<KeypointFrame> frames;
  frames.reserve(clip.size());
  for (const auto& f : clip.frames()) frames.push_back(retarget_frame(f, profile, clip.topology()));
  return MotionClip(clip.topology_ptr(), std::move(frames), clip.fps());
}

}  // namespace motionrig
