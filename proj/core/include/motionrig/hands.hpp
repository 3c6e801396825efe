#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "motionrig/skeleton.hpp"

namespace motionrig {

/// Fixed 21-point hand shape in a wrist-local frame: origin at the wrist,
/// +x along the forearm (elbow -> wrist), unit = forearm length. Offsets are
/// stored for the right hand; the left hand mirrors the local y axis.
/// Index 0 is the wrist, then four joints each for thumb, index, middle,
/// ring and pinky (base to tip).
struct HandTemplate {
  std::string name;
  std::array<Vec2, topologies::kHandCount> offsets{};

  /// Variants: "default" (loosely curled) and "relaxed-open".
  static HandTemplate named(std::string_view name);
};

inline constexpr double kTemplateHandConfidence = 0.9;
/// Maximum per-keypoint deviation of body keypoints an adapter may introduce.
inline constexpr double kAdapterBodyTolerance = 0.01;

enum class Hand { Left, Right };

struct MissingHand {
  std::size_t frame = 0;
  Hand hand = Hand::Left;
};

struct HandCompletion {
  MotionClip clip;
  /// (frame, hand) pairs left absent because the wrist or elbow was missing.
  std::vector<MissingHand> missing;
};

/// Writes template hands at each wrist, oriented and scaled by the frame's
/// forearm. The output uses `topologies::with_hands(clip.topology())`; body
/// and face keypoints are copied unchanged.
HandCompletion complete_hands_template(const MotionClip& clip, const HandTemplate& tmpl);

/// Completes hands on a handless clip given a reference skeleton with hands.
/// Implementations are typically remote services.
class HandAdapter {
 public:
  virtual ~HandAdapter() = default;
  virtual MotionClip complete(const MotionClip& clip, const KeypointFrame& reference,
                              const SkeletonTopology& reference_topology) = 0;
};

/// HTTP client for an adapter service. `endpoint` is an http:// URL; when
/// empty the ADAPTER_ENDPOINT environment variable is used.
std::unique_ptr<HandAdapter> make_http_hand_adapter(const std::string& endpoint = {});

/// Checks an adapter response against its request. Throws
/// `Error(ContractViolation)` on frame-count or fps mismatch, a response
/// without hand keypoints, or body keypoints moved by more than `tolerance`.
void validate_adapter_response(const MotionClip& request, const MotionClip& response,
                               double tolerance = kAdapterBodyTolerance);

/// Calls `adapter` and validates its response.
MotionClip complete_hands_external(const MotionClip& clip, const KeypointFrame& reference,
                                   const SkeletonTopology& reference_topology, HandAdapter& adapter);

}  // namespace motionrig
