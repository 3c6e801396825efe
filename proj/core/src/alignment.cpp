#include "motionrig/alignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "motionrig/errors.hpp"

namespace motionrig {

AffineParams inverse(const AffineParams& p) {
  if (p.a_x == 0.0 || p.a_y == 0.0) throw Error(Errc::InvalidArgument, "affine transform is singular");
  return {1.0 / p.a_x, 1.0 / p.a_y, -p.b_x / p.a_x, -p.b_y / p.a_y};
}

void validate_geometry(const FrameGeometry& g) {
  if (g.frame_height <= 0 || g.frame_width <= 0 || g.ref_height <= 0 || g.ref_width <= 0)
    throw Error(Errc::InvalidArgument, "frame and reference dimensions must be positive");
}

std::pair<double, double> fit_y(std::span<const double> y_detected, std::span<const double> y_reference) {
  if (y_detected.size() != y_reference.size())
    throw Error(Errc::InvalidArgument, "fit_y: input lengths differ");
  const std::size_t n = y_detected.size();
  if (n < 2) throw Error(Errc::DegenerateFit, "fit_y needs at least two samples");
  if (std::all_of(y_detected.begin(), y_detected.end(), [&](double v) { return v == y_detected[0]; }))
    throw Error(Errc::DegenerateFit, "detected y values have zero variance");

  const double inv_n = 1.0 / static_cast<double>(n);
  const double mean_d = std::accumulate(y_detected.begin(), y_detected.end(), 0.0) * inv_n;
  const double mean_r = std::accumulate(y_reference.begin(), y_reference.end(), 0.0) * inv_n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = y_detected[i] - mean_d;
    sxx += dx * dx;
    sxy += dx * (y_reference[i] - mean_r);
  }
  if (!(sxx > 0.0)) throw Error(Errc::DegenerateFit, "detected y values have zero variance");
  const double slope = sxy / sxx;
  return {slope, mean_r - slope * mean_d};
}

double derive_x_scale(double a_y, const FrameGeometry& geom) {
  validate_geometry(geom);
  const double frame_ratio = static_cast<double>(geom.frame_height) / geom.frame_width;
  const double ref_ratio = static_cast<double>(geom.ref_height) / geom.ref_width;
  return a_y / (frame_ratio * ref_ratio);
}

double fit_x_offset(std::span<const double> x_detected, std::span<const double> x_reference, double a_x) {
  if (x_detected.size() != x_reference.size())
    throw Error(Errc::InvalidArgument, "fit_x_offset: input lengths differ");
  if (x_detected.empty()) throw Error(Errc::EmptyInput, "fit_x_offset: no samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < x_detected.size(); ++i) sum += x_reference[i] - x_detected[i] * a_x;
  return sum / static_cast<double>(x_detected.size());
}

KeypointFrame apply_affine(const KeypointFrame& frame, const AffineParams& p) {
  KeypointFrame out = frame;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.present(i)) continue;
    out.positions[i] = {p.a_x * out.positions[i].x + p.b_x, p.a_y * out.positions[i].y + p.b_y};
  }
  return out;
}

MotionClip apply_affine(const MotionClip& clip, const AffineParams& params) {
  std::vector<KeypointFrame> frames;
  frames.reserve(clip.size());
  for (const auto& f : clip.frames()) frames.push_back(apply_affine(f, params));
  return MotionClip(clip.topology_ptr(), std::move(frames), clip.fps());
}

namespace {

struct Correspondences {
  std::vector<double> xd, yd, xr, yr;
};

double vertical_extent(std::span<const double> ys) {
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  return *hi - *lo;
}

}  // namespace

AlignResult align_clip(const MotionClip& clip, const KeypointFrame& reference,
                       const SkeletonTopology& reference_topology, const FrameGeometry& geom,
                       const AlignOptions& options) {
  validate_geometry(geom);
  if (clip.empty()) throw Error(Errc::EmptyClip, "cannot align an empty clip");
  validate_frame(reference, reference_topology);
  const SkeletonTopology& topo = clip.topology();
  const KeypointFrame ref = remap_frame(reference, reference_topology, topo);
  const auto body = topo.indices_of(KeypointGroup::Body);

  std::vector<double> ref_body_y;
  for (std::size_t k : body) {
    if (ref.present(k)) ref_body_y.push_back(ref.positions[k].y);
  }
  if (ref_body_y.size() < 2)
    throw Error(Errc::InsufficientCorrespondences, "reference has fewer than two present body keypoints");

  const std::size_t frame_count = options.source == FitSource::FirstFrame ? 1 : clip.size();
  Correspondences c;
  std::vector<double> det_body_y;
  for (std::size_t f = 0; f < frame_count; ++f) {
    const KeypointFrame& frame = clip.frame(f);
    for (std::size_t k : body) {
      if (!frame.present(k)) continue;
      det_body_y.push_back(frame.positions[k].y);
      if (!ref.present(k)) continue;
      c.xd.push_back(frame.positions[k].x);
      c.yd.push_back(frame.positions[k].y);
      c.xr.push_back(ref.positions[k].x);
      c.yr.push_back(ref.positions[k].y);
    }
  }
  if (c.yd.empty())
    throw Error(Errc::InsufficientCorrespondences, "no body keypoint is present in both clip and reference");

  AlignResult result{clip, {}, false};
  AffineParams& p = result.params;
  const bool singular =
      c.yd.size() < 2 || std::all_of(c.yd.begin(), c.yd.end(), [&](double v) { return v == c.yd[0]; });
  if (!singular) {
    std::tie(p.a_y, p.b_y) = fit_y(c.yd, c.yr);
    if (!(p.a_y > 0.0))
      throw Error(Errc::DegenerateFit, "fitted y scale " + std::to_string(p.a_y) +
                                           " is not positive (body orientation differs)");
  } else {
    // Match body heights and centroids instead.
    const double det_h = vertical_extent(det_body_y);
    const double ref_h = vertical_extent(ref_body_y);
    if (!(det_h > 0.0 && ref_h > 0.0))
      throw Error(Errc::DegenerateFit, "fit is singular and the bounding-box fallback has zero height");
    const double inv_n = 1.0 / static_cast<double>(c.yd.size());
    p.a_y = ref_h / det_h;
    p.b_y = std::accumulate(c.yr.begin(), c.yr.end(), 0.0) * inv_n -
            p.a_y * std::accumulate(c.yd.begin(), c.yd.end(), 0.0) * inv_n;
    result.used_fallback = true;
  }
  p.a_x = derive_x_scale(p.a_y, geom);
  p.b_x = fit_x_offset(c.xd, c.xr, p.a_x);
  result.clip = apply_affine(clip, p);
  return result;
}

}  // namespace motionrig
