#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionrig/skeleton.hpp"

namespace motionrig {

struct MotionPlan {
  std::vector<std::string> segments;
  std::string source_text;
  /// Prompt template used, or "rule-based".
  std::string template_id;
  /// True when an LLM response was unusable and the rule-based splitter ran instead.
  bool fallback = false;
};

/// Splits on the connectives "then", "after that", "and then", ";" and ". "
/// (case-insensitive, words matched on word boundaries), trimming whitespace
/// and edge punctuation. Throws `Error(BlankInput)` for blank text.
MotionPlan plan_rule_based(std::string_view text);

/// Versioned planning prompt. `{text}` is substituted with the input.
inline constexpr std::string_view kPlanTemplateId = "motion-plan-v1";
std::string_view plan_template();
std::string render_plan_prompt(std::string_view text);

/// Transport to a planning LLM: returns the raw response body for a request
/// carrying the template id, rendered prompt and source text.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(std::string_view template_id, std::string_view prompt, std::string_view text) = 0;
};

/// HTTP client; `endpoint` defaults to the LLM_ENDPOINT environment variable.
std::unique_ptr<LlmClient> make_http_llm_client(const std::string& endpoint = {});

/// Parses an LLM response into segments. Accepts a JSON object
/// `{"segments": [...]}` or plain text with one segment per line and/or
/// '|' separators; list markers ("1.", "-", "*") are stripped. Returns an
/// empty list when nothing usable is found.
std::vector<std::string> parse_plan_response(std::string_view body);

/// Asks `llm` for a plan; malformed or empty responses degrade to
/// `plan_rule_based` with `fallback` set. ServiceUnreachable propagates.
MotionPlan plan_llm(std::string_view text, LlmClient& llm);

std::string write_plan(const MotionPlan& plan);
MotionPlan read_plan(std::string_view bytes);

/// How clip boundaries are pulled to the reference pose.
struct BoundaryPolicy {
  /// Frames blended toward the reference at each clip end.
  int blend_frames = 3;
  /// Allowed per-keypoint distance of a boundary frame from the reference.
  double tolerance = 1e-6;
};

/// Blends each clip's first and last min(k, len/2) frames toward `reference`
/// (frame 0 and the last frame become the reference pose), then joins clips
/// end to end, dropping each later clip's first frame so junctions hold the
/// reference once. Output length = sum of lengths - (clips - 1).
///
/// Errors: EmptyInput for no clips, EmptyClip for an empty clip,
/// TopologyMismatch, FpsMismatch.
MotionClip concat_clips(std::span<const MotionClip> clips, const KeypointFrame& reference,
                        const SkeletonTopology& reference_topology, const BoundaryPolicy& policy = {});

}  // namespace motionrig
