#include "motionrig/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "detail/json_io.hpp"
#include "motionrig/errors.hpp"

namespace motionrig {

void validate_style(const RenderStyle& s) {
  if (s.bone_colors.empty() || s.finger_colors.empty())
    throw Error(Errc::InvalidArgument, "render style needs bone and finger colors");
  if (s.thickness < 1 || s.hand_thickness < 1) throw Error(Errc::InvalidArgument, "line thickness must be >= 1");
  if (s.keypoint_radius < 0 || s.hand_point_radius < 0 || s.face_point_radius < 0)
    throw Error(Errc::InvalidArgument, "keypoint radii must be >= 0");
  if (!(s.threshold >= 0.0 && s.threshold <= 1.0))
    throw Error(Errc::InvalidArgument, "confidence threshold must lie in [0, 1]");
}

int to_pixel(double coord, int dimension) {
  const double p = std::floor(coord * dimension);
  if (!(p >= 0.0)) return 0;  // also maps NaN to 0
  if (p >= dimension - 1) return dimension - 1;
  return static_cast<int>(p);
}

std::vector<std::pair<int, int>> bresenham_line(int x0, int y0, int x1, int y1) {
  std::vector<std::pair<int, int>> pts;
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    pts.emplace_back(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return pts;
}

void stamp_disc(Image& image, int cx, int cy, int radius, Rgb color) {
  const int r2 = radius * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= r2) image.set(cx + dx, cy + dy, color);
    }
  }
}

void draw_thick_line(Image& image, int x0, int y0, int x1, int y1, int thickness, Rgb color) {
  const int radius = thickness / 2;
  for (auto [x, y] : bresenham_line(x0, y0, x1, y1)) stamp_disc(image, x, y, radius, color);
}

Image render_frame(const KeypointFrame& frame, const SkeletonTopology& topology, const RenderStyle& style,
                   FrameSize size) {
  validate_style(style);
  validate_frame(frame, topology);
  Image img(size.width, size.height, style.background);
  auto visible = [&](std::size_t k) { return frame.confidence[k] > style.threshold; };
  auto px = [&](std::size_t k) {
    return std::pair{to_pixel(frame.positions[k].x, size.width), to_pixel(frame.positions[k].y, size.height)};
  };

  std::size_t body_bone = 0;
  for (std::size_t b = 0; b < topology.bones().size(); ++b) {
    const Bone& bone = topology.bones()[b];
    const bool body = topology.is_body_bone(b);
    const std::size_t color_slot = body ? body_bone++ : 0;
    if (!visible(bone.parent) || !visible(bone.child)) continue;
    const auto [x0, y0] = px(bone.parent);
    const auto [x1, y1] = px(bone.child);
    if (body) {
      draw_thick_line(img, x0, y0, x1, y1, style.thickness, style.bone_colors[color_slot % style.bone_colors.size()]);
    } else if (topology.group(bone.child) == KeypointGroup::HandLeft ||
               topology.group(bone.child) == KeypointGroup::HandRight) {
      // Hand keypoint 1..20 -> finger 0..4; the wrist link uses the first color.
      const auto& hand = topology.indices_of(topology.group(bone.child));
      const auto local = static_cast<std::size_t>(std::find(hand.begin(), hand.end(), bone.child) - hand.begin());
      const std::size_t finger = local == 0 ? 0 : (local - 1) / 4;
      draw_thick_line(img, x0, y0, x1, y1, style.hand_thickness,
                      style.finger_colors[finger % style.finger_colors.size()]);
    }
  }

  for (std::size_t k = 0; k < topology.size(); ++k) {
    if (!visible(k)) continue;
    const auto [x, y] = px(k);
    switch (topology.group(k)) {
      case KeypointGroup::Body:
        stamp_disc(img, x, y, style.keypoint_radius, style.bone_colors[k % style.bone_colors.size()]);
        break;
      case KeypointGroup::Face:
        stamp_disc(img, x, y, style.face_point_radius, style.face_color);
        break;
      case KeypointGroup::HandLeft:
      case KeypointGroup::HandRight:
        stamp_disc(img, x, y, style.hand_point_radius, style.hand_point_color);
        break;
    }
  }
  return img;
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04zu.ppm", index);
  return buf;
}

std::vector<std::filesystem::path> render_clip(const MotionClip& clip, const RenderStyle& style, FrameSize size,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < clip.size(); ++i) {
    names.push_back(frame_file_name(i));
    written.push_back(dir / names.back());
    write_ppm(written.back(), render_frame(clip.frame(i), clip.topology(), style, size));
  }
  detail::Json index{{"format", "motionrig.frames"},
                     {"version", 1},
                     {"fps", {clip.fps().num, clip.fps().den}},
                     {"frame_count", clip.size()},
                     {"frame_size", {{"height", size.height}, {"width", size.width}}},
                     {"frames", names},
                     {"poses", "poses.json"}};
  written.push_back(dir / "index.json");
  write_file(written.back(), index.dump(2) + "\n");
  written.push_back(dir / "poses.json");
  write_file(written.back(), write_clip(clip, size));
  return written;
}

FrameIndex read_frame_index(const std::filesystem::path& dir) {
  const detail::Json doc = detail::parse_json(read_file(dir / "index.json"), "frame index");
  try {
    if (doc.at("format").get<std::string>() != "motionrig.frames")
      throw Error(Errc::ParseError, "not a frame index document");
    FrameIndex idx;
    for (const auto& n : doc.at("frames")) idx.frames.push_back(dir / n.get<std::string>());
    idx.size = {doc.at("frame_size").at("height").get<int>(), doc.at("frame_size").at("width").get<int>()};
    const auto fps = doc.at("fps").get<std::vector<std::int64_t>>();
    if (fps.size() != 2 || fps[0] <= 0 || fps[1] <= 0) throw Error(Errc::ParseError, "bad fps in frame index");
    idx.fps = {fps[0], fps[1]};
    if (doc.contains("poses")) idx.poses = dir / doc.at("poses").get<std::string>();
    return idx;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("frame index: ") + e.what());
  }
}

}  // namespace motionrig
