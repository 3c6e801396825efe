#include "motionrig/projection.hpp"

#include <algorithm>
#include <limits>

#include "motionrig/errors.hpp"

namespace motionrig {

MotionClip project(const MotionClip3D& clip, const ProjectionConfig& config, TopologyPtr topology) {
  if (clip.size() == 0) throw Error(Errc::EmptyClip, "3D clip has no frames");
  const auto body = topology->indices_of(KeypointGroup::Body);
  if (clip.joint_count() != body.size())
    throw Error(Errc::JointCountMismatch, "3D clip has " + std::to_string(clip.joint_count()) +
                                              " joints, topology '" + topology->name() + "' has " +
                                              std::to_string(body.size()) + " body keypoints");

  const double sign = config.flip_y ? -1.0 : 1.0;
  auto drop_z = [sign](const Vec3& p) { return Vec2{p.x, sign * p.y}; };

  double scale = 1.0;
  Vec2 offset{0.0, 0.0};
  if (config.fit_box) {
    const FitBox& box = *config.fit_box;
    if (!(box.half_width > 0.0 && box.half_height > 0.0))
      throw Error(Errc::InvalidArgument, "fit box half extents must be positive");
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& frame : clip.frames()) {
      for (const auto& joint : frame) {
        const Vec2 p = drop_z(joint);
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
      }
    }
    const double width = max_x - min_x;
    const double height = max_y - min_y;
    const double sx = width > 0.0 ? 2.0 * box.half_width / width : std::numeric_limits<double>::infinity();
    const double sy = height > 0.0 ? 2.0 * box.half_height / height : std::numeric_limits<double>::infinity();
    scale = std::min(sx, sy);
    if (!std::isfinite(scale)) scale = 1.0;  // every joint at one point
    const Vec2 center{0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
    offset = Vec2{box.cx, box.cy} - scale * center;
  }

  std::vector<KeypointFrame> frames;
  frames.reserve(clip.size());
  for (const auto& joints : clip.frames()) {
    KeypointFrame f = KeypointFrame::absent(topology->size());
    for (std::size_t j = 0; j < body.size(); ++j) {
      const Vec2 p = drop_z(joints[j]);
      f.positions[body[j]] = config.fit_box ? Vec2{scale * p.x + offset.x, scale * p.y + offset.y} : p;
      f.confidence[body[j]] = 1.0;
    }
    frames.push_back(std::move(f));
  }
  return MotionClip(std::move(topology), std::move(frames), clip.fps());
}

}  // namespace motionrig
