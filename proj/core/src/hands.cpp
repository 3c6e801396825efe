#include "motionrig/hands.hpp"

#include <cmath>
#include <string>

#include "detail/http.hpp"
#include "motionrig/errors.hpp"
#include "motionrig/services.hpp"

namespace motionrig {
namespace {

using Offsets = std::array<Vec2, topologies::kHandCount>;

// Right hand, forearm along +x, thumb on the -y side.
constexpr Offsets kRelaxedOpen = {{
    {0.00, 0.00},
    {0.08, -0.10}, {0.16, -0.20}, {0.24, -0.27}, {0.30, -0.33},  // thumb
    {0.35, -0.09}, {0.48, -0.11}, {0.57, -0.12}, {0.64, -0.13},  // index
    {0.37, -0.03}, {0.52, -0.03}, {0.62, -0.03}, {0.70, -0.03},  // middle
    {0.36, 0.03},  {0.49, 0.04},  {0.58, 0.05},  {0.65, 0.05},   // ring
    {0.33, 0.09},  {0.43, 0.11},  {0.50, 0.12},  {0.56, 0.13},   // pinky
}};

constexpr Offsets kLooselyCurled = {{
    {0.00, 0.00},
    {0.08, -0.09}, {0.15, -0.16}, {0.21, -0.18}, {0.26, -0.17},
    {0.34, -0.08}, {0.44, -0.09}, {0.47, -0.06}, {0.43, -0.04},
    {0.36, -0.02}, {0.47, -0.02}, {0.50, 0.01},  {0.45, 0.02},
    {0.35, 0.03},  {0.45, 0.04},  {0.47, 0.06},  {0.43, 0.07},
    {0.32, 0.08},  {0.40, 0.09},  {0.42, 0.11},  {0.39, 0.12},
}};

struct HandSlots {
  KeypointGroup group;
  Hand hand;
  const char* elbow;
  const char* wrist;
  double mirror;  // +1 right, -1 left
};

constexpr std::array<HandSlots, 2> kHands = {{
    {KeypointGroup::HandLeft, Hand::Left, "left_elbow", "left_wrist", -1.0},
    {KeypointGroup::HandRight, Hand::Right, "right_elbow", "right_wrist", 1.0},
}};

}  // namespace

HandTemplate HandTemplate::named(std::string_view name) {
  if (name == "default") return {"default", kLooselyCurled};
  if (name == "relaxed-open") return {"relaxed-open", kRelaxedOpen};
  throw Error(Errc::InvalidArgument, "unknown hand template '" + std::string(name) + "'");
}

HandCompletion complete_hands_template(const MotionClip& clip, const HandTemplate& tmpl) {
  const TopologyPtr& out_topo = topologies::with_hands(clip.topology());
  const SkeletonTopology& in_topo = clip.topology();

  HandCompletion result{MotionClip(out_topo, {}, clip.fps()), {}};
  std::vector<KeypointFrame> frames;
  frames.reserve(clip.size());
  for (std::size_t f = 0; f < clip.size(); ++f) {
    KeypointFrame out = remap_frame(clip.frame(f), in_topo, *out_topo);
    for (const HandSlots& slot : kHands) {
      const auto hand = out_topo->indices_of(slot.group);
      for (std::size_t k : hand) {
        out.positions[k] = {};
        out.confidence[k] = 0.0;
      }
      const std::size_t elbow = out_topo->require(slot.elbow);
      const std::size_t wrist = out_topo->require(slot.wrist);
      const Vec2 forearm = out.positions[wrist] - out.positions[elbow];
      const double length = norm(forearm);
      if (!out.present(elbow) || !out.present(wrist) || length == 0.0) {
        result.missing.push_back({f, slot.hand});
        continue;
      }
      const Vec2 along = (1.0 / length) * forearm;
      const Vec2 across{-along.y, along.x};
      const Vec2 origin = out.positions[wrist];
      for (std::size_t i = 0; i < hand.size(); ++i) {
        const Vec2 o = tmpl.offsets[i];
        const double oy = slot.mirror * o.y;
        out.positions[hand[i]] = {origin.x + length * (o.x * along.x + oy * across.x),
                                  origin.y + length * (o.x * along.y + oy * across.y)};
        out.confidence[hand[i]] = kTemplateHandConfidence;
      }
    }
    frames.push_back(std::move(out));
  }
  result.clip = MotionClip(out_topo, std::move(frames), clip.fps());
  return result;
}

void validate_adapter_response(const MotionClip& request, const MotionClip& response, double tolerance) {
  if (response.size() != request.size())
    throw Error(Errc::ContractViolation, "adapter returned " + std::to_string(response.size()) +
                                             " frames for a " + std::to_string(request.size()) + "-frame request");
  if (!(response.fps() == request.fps())) throw Error(Errc::ContractViolation, "adapter changed the frame rate");
  const SkeletonTopology& out = response.topology();
  if (!out.has_group(KeypointGroup::HandLeft) || !out.has_group(KeypointGroup::HandRight))
    throw Error(Errc::ContractViolation, "adapter response topology '" + out.name() + "' has no hands");

  const SkeletonTopology& in = request.topology();
  for (std::size_t k : in.indices_of(KeypointGroup::Body)) {
    const auto name = in.keypoint(k).name;
    const auto mapped = out.index_of(name);
    if (!mapped) throw Error(Errc::ContractViolation, "adapter response lacks body keypoint '" + name + "'");
    for (std::size_t f = 0; f < request.size(); ++f) {
      if (!request.frame(f).present(k)) continue;
      const KeypointFrame& r = response.frame(f);
      if (!r.present(*mapped))
        throw Error(Errc::ContractViolation, "adapter dropped '" + name + "' in frame " + std::to_string(f));
      const double drift = distance(request.frame(f).positions[k], r.positions[*mapped]);
      if (drift > tolerance)
        throw Error(Errc::ContractViolation, "adapter moved '" + name + "' by " + std::to_string(drift) +
                                                 " in frame " + std::to_string(f));
    }
  }
}

MotionClip complete_hands_external(const MotionClip& clip, const KeypointFrame& reference,
                                   const SkeletonTopology& reference_topology, HandAdapter& adapter) {
  MotionClip response = adapter.complete(clip, reference, reference_topology);
  validate_adapter_response(clip, response);
  return response;
}

namespace {

class HttpHandAdapter final : public HandAdapter {
 public:
  explicit HttpHandAdapter(std::string endpoint) : client_(std::move(endpoint)) {}

  MotionClip complete(const MotionClip& clip, const KeypointFrame& reference,
                      const SkeletonTopology& reference_topology) override {
    detail::Json request;
    request["clip"] = detail::clip_to_json(clip, FrameSize{});
    request["reference"] = detail::clip_to_json(
        MotionClip(topologies::by_name(reference_topology.name()), {reference}, Fps{1, 1}), FrameSize{});
    try {
      return detail::clip_from_json(client_.post_json(request)).clip;
    } catch (const Error& e) {
      if (e.code() == Errc::ParseError || e.code() == Errc::UnknownTopology)
        throw Error(Errc::ContractViolation, std::string("adapter response: ") + e.what());
      throw;
    }
  }

 private:
  detail::HttpJsonClient client_;
};

}  // namespace

std::unique_ptr<HandAdapter> make_http_hand_adapter(const std::string& endpoint) {
  std::string url = endpoint.empty() ? env_or_empty("ADAPTER_ENDPOINT") : endpoint;
  if (url.empty()) throw Error(Errc::ServiceUnreachable, "no adapter endpoint configured (ADAPTER_ENDPOINT)");
  return std::make_unique<HttpHandAdapter>(std::move(url));
}

}  // namespace motionrig
