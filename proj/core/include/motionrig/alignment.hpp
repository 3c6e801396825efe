#pragma once

#include <span>
#include <utility>

#include "motionrig/skeleton.hpp"

namespace motionrig {

/// Per-axis scale and offset: x' = a_x x + b_x, y' = a_y y + b_y.
struct AffineParams {
  double a_x = 1.0;
  double a_y = 1.0;
  double b_x = 0.0;
  double b_y = 0.0;

  friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

/// Inverse transform. Throws `Error(InvalidArgument)` if either scale is zero.
AffineParams inverse(const AffineParams& params);

/// Pixel sizes of the skeleton video frame and of the reference image.
struct FrameGeometry {
  int frame_height = 1024;
  int frame_width = 576;
  int ref_height = 1024;
  int ref_width = 576;

  friend bool operator==(const FrameGeometry&, const FrameGeometry&) = default;
};

void validate_geometry(const FrameGeometry& geom);

/// Degree-1 least-squares fit of y_reference against y_detected, returned as
/// (slope, intercept). Throws `Error(DegenerateFit)` for fewer than two samples
/// or zero variance in `y_detected`, `Error(InvalidArgument)` on length mismatch.
std::pair<double, double> fit_y(std::span<const double> y_detected, std::span<const double> y_reference);

/// x scale derived from the y scale and the two aspect ratios:
/// a_x = a_y / ((f_h / f_w) * (ref_h / ref_w)).
double derive_x_scale(double a_y, const FrameGeometry& geom);

/// b_x = mean(x_reference - a_x * x_detected). Throws `Error(EmptyInput)`.
double fit_x_offset(std::span<const double> x_detected, std::span<const double> x_reference, double a_x);

/// Applies `params` to every present keypoint of every frame. Absent
/// keypoints and all confidences are left as they are.
MotionClip apply_affine(const MotionClip& clip, const AffineParams& params);
KeypointFrame apply_affine(const KeypointFrame& frame, const AffineParams& params);

/// Which generated frames feed the correspondence set of the fit.
enum class FitSource {
  FirstFrame,  ///< Only the clip's first frame.
  AllFrames,   ///< Every frame pooled against the same reference keypoints.
};

struct AlignOptions {
  FitSource source = FitSource::FirstFrame;
};

struct AlignResult {
  MotionClip clip;
  AffineParams params;
  /// True when the least-squares fit was singular and the bounding-box
  /// fallback produced a_y / b_y.
  bool used_fallback = false;
};

/// Fits one transform from body keypoints present in both `reference` and the
/// clip (per `options.source`) and applies it to every frame. `reference` is
/// matched to the clip's topology by keypoint name.
///
/// Errors: InsufficientCorrespondences when the reference has fewer than two
/// present body keypoints or nothing corresponds; DegenerateFit when neither
/// the fit nor the fallback yields a positive scale.
AlignResult align_clip(const MotionClip& clip, const KeypointFrame& reference,
                       const SkeletonTopology& reference_topology, const FrameGeometry& geom,
                       const AlignOptions& options = {});

}  // namespace motionrig
