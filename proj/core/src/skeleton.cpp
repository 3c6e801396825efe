#include "motionrig/skeleton.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

#include "motionrig/errors.hpp"

namespace motionrig {

std::string_view to_string(KeypointGroup group) noexcept {
  switch (group) {
    case KeypointGroup::Body: return "body";
    case KeypointGroup::Face: return "face";
    case KeypointGroup::HandLeft: return "hand-left";
    case KeypointGroup::HandRight: return "hand-right";
  }
  return "unknown";
}

SkeletonTopology::SkeletonTopology(std::string name, std::vector<Keypoint> keypoints,
                                   std::vector<Bone> bones, std::size_t root)
    : name_(std::move(name)), keypoints_(std::move(keypoints)), bones_(std::move(bones)), root_(root) {
  const std::size_t n = keypoints_.size();
  if (n == 0) throw Error(Errc::InvalidArgument, "topology '" + name_ + "' has no keypoints");
  if (root_ >= n) throw Error(Errc::InvalidArgument, "root index out of range");
  if (keypoints_[root_].group != KeypointGroup::Body)
    throw Error(Errc::InvalidArgument, "root must be a body keypoint");

  std::unordered_set<std::string> names;
  for (const auto& kp : keypoints_) {
    if (!names.insert(kp.name).second)
      throw Error(Errc::InvalidArgument, "duplicate keypoint name '" + kp.name + "'");
  }

  parent_bone_.assign(n, std::nullopt);
  child_bones_.assign(n, {});
  for (std::size_t b = 0; b < bones_.size(); ++b) {
    const Bone& bone = bones_[b];
    if (bone.parent >= n || bone.child >= n || bone.parent == bone.child)
      throw Error(Errc::InvalidArgument, "bone " + std::to_string(b) + " has invalid endpoints");
    if (parent_bone_[bone.child])
      throw Error(Errc::InvalidArgument,
                  "keypoint '" + keypoints_[bone.child].name + "' has more than one parent");
    parent_bone_[bone.child] = b;
    child_bones_[bone.parent].push_back(b);
  }
  if (parent_bone_[root_]) throw Error(Errc::InvalidArgument, "root keypoint has a parent");

  // Walking parent links must terminate (no cycles); body keypoints must reach
  // the root through body keypoints only.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t cur = k;
    std::size_t steps = 0;
    const bool body = keypoints_[k].group == KeypointGroup::Body;
    while (parent_bone_[cur]) {
      cur = bones_[*parent_bone_[cur]].parent;
      if (body && keypoints_[cur].group != KeypointGroup::Body)
        throw Error(Errc::InvalidArgument, "body keypoint '" + keypoints_[k].name +
                                               "' has a non-body ancestor");
      if (++steps > n) throw Error(Errc::InvalidArgument, "bone graph contains a cycle");
    }
    if (body && cur != root_)
      throw Error(Errc::InvalidArgument,
                  "body keypoint '" + keypoints_[k].name + "' is not connected to the root");
  }

  auto visit = [this](std::size_t start) {
    std::vector<std::size_t> stack;
    auto push_children = [&](std::size_t kp) {
      const auto& kids = child_bones_[kp];
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    };
    push_children(start);
    while (!stack.empty()) {
      const std::size_t b = stack.back();
      stack.pop_back();
      preorder_.push_back(b);
      push_children(bones_[b].child);
    }
  };
  visit(root_);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != root_ && !parent_bone_[k]) visit(k);
  }
}

std::optional<std::size_t> SkeletonTopology::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    if (keypoints_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SkeletonTopology::require(std::string_view name) const {
  if (auto idx = index_of(name)) return *idx;
  throw Error(Errc::InvalidArgument,
              "topology '" + name_ + "' has no keypoint named '" + std::string(name) + "'");
}

std::optional<std::size_t> SkeletonTopology::parent_bone(std::size_t keypoint) const {
  return parent_bone_.at(keypoint);
}

std::span<const std::size_t> SkeletonTopology::child_bones(std::size_t keypoint) const {
  return child_bones_.at(keypoint);
}

bool SkeletonTopology::is_body_bone(std::size_t bone) const {
  const Bone& b = bones_.at(bone);
  return keypoints_[b.parent].group == KeypointGroup::Body &&
         keypoints_[b.child].group == KeypointGroup::Body;
}

std::size_t SkeletonTopology::count(KeypointGroup group) const {
  return static_cast<std::size_t>(std::count_if(keypoints_.begin(), keypoints_.end(),
                                                [group](const Keypoint& k) { return k.group == group; }));
}

std::vector<std::size_t> SkeletonTopology::indices_of(KeypointGroup group) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    if (keypoints_[i].group == group) out.push_back(i);
  }
  return out;
}

bool operator==(const SkeletonTopology& a, const SkeletonTopology& b) {
  if (&a == &b) return true;
  if (a.name_ != b.name_ || a.root_ != b.root_ || a.bones_ != b.bones_ ||
      a.keypoints_.size() != b.keypoints_.size())
    return false;
  for (std::size_t i = 0; i < a.keypoints_.size(); ++i) {
    if (a.keypoints_[i].name != b.keypoints_[i].name || a.keypoints_[i].group != b.keypoints_[i].group)
      return false;
  }
  return true;
}

namespace topologies {
namespace {

constexpr std::array<const char*, kBodyCount> kBodyNames = {
    "nose",      "neck",       "right_shoulder", "right_elbow", "right_wrist", "left_shoulder",
    "left_elbow", "left_wrist", "right_hip",      "right_knee",  "right_ankle", "left_hip",
    "left_knee", "left_ankle", "right_eye",      "left_eye",    "right_ear",   "left_ear"};

constexpr std::size_t kNeck = 1;

// Left before right, arms before legs, head last.
constexpr std::array<std::pair<std::size_t, std::size_t>, 17> kBodyBones = {{
    {1, 5}, {5, 6}, {6, 7},        // left arm
    {1, 2}, {2, 3}, {3, 4},        // right arm
    {1, 11}, {11, 12}, {12, 13},   // left leg
    {1, 8}, {8, 9}, {9, 10},       // right leg
    {1, 0}, {0, 15}, {15, 17},     // nose, left eye, left ear
    {0, 14}, {14, 16},             // right eye, right ear
}};

void append_hand(std::vector<Keypoint>& kps, std::vector<Bone>& bones, KeypointGroup group,
                 const char* prefix, std::size_t body_wrist) {
  const std::size_t base = kps.size();
  for (std::size_t i = 0; i < kHandCount; ++i) {
    kps.push_back({std::string(prefix) + std::to_string(i), group});
  }
  bones.push_back({body_wrist, base});
  for (std::size_t finger = 0; finger < 5; ++finger) {
    std::size_t prev = base;
    for (std::size_t j = 1; j <= 4; ++j) {
      const std::size_t cur = base + finger * 4 + j;
      bones.push_back({prev, cur});
      prev = cur;
    }
  }
}

std::vector<Keypoint> body_keypoints() {
  std::vector<Keypoint> kps;
  for (const char* n : kBodyNames) kps.push_back({n, KeypointGroup::Body});
  return kps;
}

std::vector<Bone> body_bones() {
  std::vector<Bone> bones;
  for (auto [p, c] : kBodyBones) bones.push_back({p, c});
  return bones;
}

TopologyPtr make(bool face, bool hands, std::string name) {
  auto kps = body_keypoints();
  auto bones = body_bones();
  if (face) {
    for (std::size_t i = 0; i < kFaceCount; ++i) kps.push_back({"face_" + std::to_string(i), KeypointGroup::Face});
  }
  if (hands) {
    append_hand(kps, bones, KeypointGroup::HandLeft, "left_hand_", 7);
    append_hand(kps, bones, KeypointGroup::HandRight, "right_hand_", 4);
  }
  return std::make_shared<const SkeletonTopology>(std::move(name), std::move(kps), std::move(bones), kNeck);
}

}  // namespace

const TopologyPtr& body18() {
  static const TopologyPtr t = make(false, false, "body18");
  return t;
}

const TopologyPtr& body18_hands() {
  static const TopologyPtr t = make(false, true, "body18_hands");
  return t;
}

const TopologyPtr& full() {
  static const TopologyPtr t = make(true, true, "full");
  return t;
}

const TopologyPtr& by_name(std::string_view name) {
  if (name == "body18") return body18();
  if (name == "body18_hands") return body18_hands();
  if (name == "full") return full();
  throw Error(Errc::UnknownTopology, "unknown topology '" + std::string(name) + "'");
}

const TopologyPtr& with_hands(const SkeletonTopology& topology) {
  if (topology.has_group(KeypointGroup::Face)) return full();
  return body18_hands();
}

}  // namespace topologies

KeypointFrame KeypointFrame::absent(std::size_t count) {
  return KeypointFrame{std::vector<Vec2>(count), std::vector<double>(count, 0.0)};
}

void validate_frame(const KeypointFrame& frame, const SkeletonTopology& topology) {
  if (frame.positions.size() != topology.size() || frame.confidence.size() != topology.size())
    throw Error(Errc::InvalidArgument, "frame has " + std::to_string(frame.positions.size()) +
                                           " keypoints, topology '" + topology.name() + "' has " +
                                           std::to_string(topology.size()));
  for (double c : frame.confidence) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(Errc::InvalidArgument, "confidence outside [0, 1]");
  }
}

KeypointFrame remap_frame(const KeypointFrame& frame, const SkeletonTopology& from,
                          const SkeletonTopology& to) {
  if (&from == &to || from == to) return frame;
  KeypointFrame out = KeypointFrame::absent(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (auto src = from.index_of(to.keypoint(i).name)) {
      out.positions[i] = frame.positions.at(*src);
      out.confidence[i] = frame.confidence.at(*src);
    }
  }
  return out;
}

MotionClip::MotionClip(TopologyPtr topology, std::vector<KeypointFrame> frames, Fps fps)
    : topology_(std::move(topology)), frames_(std::move(frames)), fps_(fps) {
  if (!topology_) throw Error(Errc::InvalidArgument, "clip has no topology");
  if (fps_.num <= 0 || fps_.den <= 0) throw Error(Errc::InvalidArgument, "fps must be positive");
  for (const auto& f : frames_) validate_frame(f, *topology_);
}

bool operator==(const MotionClip& a, const MotionClip& b) {
  return *a.topology_ == *b.topology_ && a.fps_.num == b.fps_.num && a.fps_.den == b.fps_.den &&
         a.frames_ == b.frames_;
}

MotionClip3D::MotionClip3D(std::vector<std::vector<Vec3>> frames, Fps fps)
    : frames_(std::move(frames)), fps_(fps) {
  if (fps_.num <= 0 || fps_.den <= 0) throw Error(Errc::InvalidArgument, "fps must be positive");
  for (const auto& f : frames_) {
    if (f.size() != frames_.front().size())
      throw Error(Errc::JointCountMismatch, "3D frames disagree on joint count");
  }
}

double bone_length(const KeypointFrame& frame, std::size_t bone, const SkeletonTopology& topology) {
  const Bone& b = topology.bones()[bone];
  if (!frame.present(b.parent) || !frame.present(b.child))
    throw Error(Errc::MissingKeypoint, "bone '" + topology.keypoint(b.parent).name + "' -> '" +
                                           topology.keypoint(b.child).name + "' has an absent endpoint");
  return distance(frame.positions[b.parent], frame.positions[b.child]);
}

std::vector<std::size_t> subtree(const SkeletonTopology& topology, std::size_t keypoint) {
  if (keypoint >= topology.size()) throw Error(Errc::InvalidArgument, "keypoint index out of range");
  std::vector<std::size_t> out{keypoint};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t b : topology.child_bones(out[i])) out.push_back(topology.bones()[b].child);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace motionrig
