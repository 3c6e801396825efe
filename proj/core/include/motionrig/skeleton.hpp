#pragma once

/// \file skeleton.hpp
/// \brief Skeleton topologies, keypoint frames and motion clips.
///
/// Keypoint positions are normalized image coordinates: origin top-left,
/// x to the right, y downward, nominal range [0, 1]. Confidence 0 marks a
/// keypoint as absent.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionrig/geometry.hpp"

namespace motionrig {

enum class KeypointGroup { Body, Face, HandLeft, HandRight };

std::string_view to_string(KeypointGroup group) noexcept;

struct Keypoint {
  std::string name;
  KeypointGroup group = KeypointGroup::Body;
};

/// Directed parent -> child edge between two keypoint indices.
struct Bone {
  std::size_t parent = 0;
  std::size_t child = 0;

  friend bool operator==(const Bone&, const Bone&) = default;
};

/// Named keypoints plus a bone forest. The body keypoints form a single tree
/// rooted at `root()` (the neck for the canonical topologies). Hand keypoints
/// hang below their wrist; face keypoints are not attached to any bone.
///
/// Construction validates every invariant and throws `Error` on violation.
class SkeletonTopology {
 public:
  SkeletonTopology(std::string name, std::vector<Keypoint> keypoints, std::vector<Bone> bones,
                   std::size_t root);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return keypoints_.size(); }
  std::span<const Keypoint> keypoints() const noexcept { return keypoints_; }
  std::span<const Bone> bones() const noexcept { return bones_; }
  std::size_t root() const noexcept { return root_; }

  const Keypoint& keypoint(std::size_t index) const { return keypoints_.at(index); }
  KeypointGroup group(std::size_t index) const { return keypoints_.at(index).group; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like `index_of` but throws `Error(InvalidArgument)` when the name is unknown.
  std::size_t require(std::string_view name) const;

  /// Index of the bone whose child is `keypoint`, if any.
  std::optional<std::size_t> parent_bone(std::size_t keypoint) const;
  /// Bone indices leaving `keypoint`, in bone-table order.
  std::span<const std::size_t> child_bones(std::size_t keypoint) const;

  /// Bone indices in depth-first pre-order from the root, children visited in
  /// bone-table order. Every bone appears after the bone that reaches its parent.
  std::span<const std::size_t> preorder_bones() const noexcept { return preorder_; }

  /// True when both endpoints of the bone are body keypoints.
  bool is_body_bone(std::size_t bone) const;

  std::size_t count(KeypointGroup group) const;
  bool has_group(KeypointGroup group) const { return count(group) > 0; }
  std::vector<std::size_t> indices_of(KeypointGroup group) const;

  friend bool operator==(const SkeletonTopology& a, const SkeletonTopology& b);

 private:
  std::string name_;
  std::vector<Keypoint> keypoints_;
  std::vector<Bone> bones_;
  std::size_t root_;
  std::vector<std::optional<std::size_t>> parent_bone_;
  std::vector<std::vector<std::size_t>> child_bones_;
  std::vector<std::size_t> preorder_;
};

using TopologyPtr = std::shared_ptr<const SkeletonTopology>;

/// Canonical topologies. Body keypoints follow the COCO-18 ordering used by
/// OpenPose: nose, neck, right arm, left arm, right leg, left leg, eyes, ears.
namespace topologies {

inline constexpr std::size_t kBodyCount = 18;
inline constexpr std::size_t kFaceCount = 68;
inline constexpr std::size_t kHandCount = 21;

/// 18 body keypoints (includes the 5 head points nose/eyes/ears).
const TopologyPtr& body18();
/// body18 plus 21 keypoints per hand.
const TopologyPtr& body18_hands();
/// body18 + 68 face + 2x21 hand keypoints (128 total).
const TopologyPtr& full();

/// Resolves a canonical topology by name; throws `Error(UnknownTopology)`.
const TopologyPtr& by_name(std::string_view name);

/// The hand-carrying canonical topology with the same body (and face) content
/// as `topology`: body18 -> body18_hands, full -> full.
const TopologyPtr& with_hands(const SkeletonTopology& topology);

}  // namespace topologies

/// One time step of keypoints. `positions` and `confidence` are indexed by
/// topology keypoint index.
struct KeypointFrame {
  std::vector<Vec2> positions;
  std::vector<double> confidence;

  /// A frame of `count` keypoints at the origin, all absent.
  static KeypointFrame absent(std::size_t count);

  std::size_t size() const noexcept { return positions.size(); }
  bool present(std::size_t index) const { return confidence.at(index) > 0.0; }

  friend bool operator==(const KeypointFrame&, const KeypointFrame&) = default;
};

/// Throws `Error(InvalidArgument)` unless the frame has one entry per keypoint
/// of `topology` and every confidence lies in [0, 1].
void validate_frame(const KeypointFrame& frame, const SkeletonTopology& topology);

/// Copies keypoints from `frame` (laid out for `from`) into a frame laid out
/// for `to`, matching by keypoint name. Keypoints missing in `from` are absent.
KeypointFrame remap_frame(const KeypointFrame& frame, const SkeletonTopology& from,
                          const SkeletonTopology& to);

/// Frames per second as a positive rational.
struct Fps {
  std::int64_t num = 20;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(Fps a, Fps b) { return a.num * b.den == b.num * a.den; }
};

/// An ordered sequence of frames sharing one topology and frame rate.
class MotionClip {
 public:
  MotionClip(TopologyPtr topology, std::vector<KeypointFrame> frames, Fps fps);

  const SkeletonTopology& topology() const noexcept { return *topology_; }
  const TopologyPtr& topology_ptr() const noexcept { return topology_; }
  std::span<const KeypointFrame> frames() const noexcept { return frames_; }
  const KeypointFrame& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  Fps fps() const noexcept { return fps_; }

  friend bool operator==(const MotionClip& a, const MotionClip& b);

 private:
  TopologyPtr topology_;
  std::vector<KeypointFrame> frames_;
  Fps fps_;
};

/// 3D joint sequence in model space (y up), K joints per frame.
class MotionClip3D {
 public:
  MotionClip3D(std::vector<std::vector<Vec3>> frames, Fps fps);

  std::span<const std::vector<Vec3>> frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t joint_count() const noexcept { return frames_.empty() ? 0 : frames_.front().size(); }
  Fps fps() const noexcept { return fps_; }

  friend bool operator==(const MotionClip3D&, const MotionClip3D&) = default;

 private:
  std::vector<std::vector<Vec3>> frames_;
  Fps fps_;
};

/// Euclidean length of `bone`. Throws `Error(MissingKeypoint)` when either
/// endpoint is absent.
double bone_length(const KeypointFrame& frame, std::size_t bone, const SkeletonTopology& topology);

/// `keypoint` and all its descendants in the bone forest, sorted ascending.
std::vector<std::size_t> subtree(const SkeletonTopology& topology, std::size_t keypoint);

}  // namespace motionrig
