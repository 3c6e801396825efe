#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "motionrig/image.hpp"
#include "motionrig/pose_io.hpp"
#include "motionrig/skeleton.hpp"

namespace motionrig {

/// Skeleton drawing style. Defaults follow the usual OpenPose look: an
/// 18-color limb palette on black.
struct RenderStyle {
  /// Body bone b uses bone_colors[b % size]; body keypoint k uses bone_colors[k % size].
  std::vector<Rgb> bone_colors{{255, 0, 0},   {255, 85, 0},  {255, 170, 0}, {255, 255, 0}, {170, 255, 0},
                               {85, 255, 0},  {0, 255, 0},   {0, 255, 85},  {0, 255, 170}, {0, 255, 255},
                               {0, 170, 255}, {0, 85, 255},  {0, 0, 255},   {85, 0, 255},  {170, 0, 255},
                               {255, 0, 255}, {255, 0, 170}, {255, 0, 85}};
  /// Hand bones, one color per finger (thumb first).
  std::vector<Rgb> finger_colors{{255, 0, 0}, {255, 255, 0}, {0, 255, 0}, {0, 255, 255}, {255, 0, 255}};
  Rgb hand_point_color{0, 0, 255};
  Rgb face_color{255, 255, 255};
  Rgb background{0, 0, 0};
  int thickness = 5;        ///< body bone width in pixels (odd widths are exact)
  int hand_thickness = 3;
  int keypoint_radius = 4;
  int hand_point_radius = 2;
  int face_point_radius = 2;
  /// Keypoints at or below this confidence are not drawn, nor bones touching them.
  double threshold = 0.3;
};

void validate_style(const RenderStyle& style);

/// Normalized coordinate to pixel index: floor(coord * dimension), clamped.
int to_pixel(double coord, int dimension);

/// Integer Bresenham centerline from (x0, y0) to (x1, y1), endpoints included.
std::vector<std::pair<int, int>> bresenham_line(int x0, int y0, int x1, int y1);

/// Sets every pixel within Euclidean distance `radius` of (cx, cy).
void stamp_disc(Image& image, int cx, int cy, int radius, Rgb color);

/// Draws a line of width 2 * (thickness / 2) + 1 by stamping discs along the
/// Bresenham centerline.
void draw_thick_line(Image& image, int x0, int y0, int x1, int y1, int thickness, Rgb color);

/// Deterministic, non-anti-aliased raster of one frame: bones first (bone
/// table order), then keypoints (index order). Output is width x height.
Image render_frame(const KeypointFrame& frame, const SkeletonTopology& topology, const RenderStyle& style,
                   FrameSize size);

/// "frame_0000.ppm"-style name for frame `index`.
std::string frame_file_name(std::size_t index);

/// Renders every frame into `dir` as numbered PPM files and writes
/// `index.json` (frame list, fps, size) plus `poses.json` (the clip itself).
/// Returns the paths written, frames first.
std::vector<std::filesystem::path> render_clip(const MotionClip& clip, const RenderStyle& style, FrameSize size,
                                               const std::filesystem::path& dir);

struct FrameIndex {
  std::vector<std::filesystem::path> frames;  ///< absolute or relative to cwd
  FrameSize size;
  Fps fps;
  std::filesystem::path poses;  ///< empty when the index names no pose file
};

/// Reads `dir/index.json`. Throws `Error(Io)` or `Error(ParseError)`.
FrameIndex read_frame_index(const std::filesystem::path& dir);

}  // namespace motionrig
