#include "motionrig/planner.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "detail/http.hpp"
#include "motionrig/errors.hpp"
#include "motionrig/services.hpp"

namespace motionrig {
namespace {

struct Connective {
  std::string_view token;
  bool word;  // must sit on word boundaries
};

constexpr std::array<Connective, 5> kConnectives = {{
    {"then", true},
    {"after that", true},
    {"and then", true},
    {";", false},
    {". ", false},
}};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool matches_at(std::string_view text, std::size_t pos, const Connective& conn) {
  if (pos + conn.token.size() > text.size()) return false;
  for (std::size_t i = 0; i < conn.token.size(); ++i) {
    if (lower(text[pos + i]) != conn.token[i]) return false;
  }
  if (!conn.word) return true;
  const bool start_ok = pos == 0 || !is_word_char(text[pos - 1]);
  const std::size_t end = pos + conn.token.size();
  const bool end_ok = end == text.size() || !is_word_char(text[end]);
  return start_ok && end_ok;
}

std::string trim_segment(std::string_view s) {
  auto edge = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';' || c == '.'; };
  std::size_t b = 0, e = s.size();
  while (b < e && edge(s[b])) ++b;
  while (e > b && edge(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string strip_list_marker(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  if (b < s.size() && (s[b] == '-' || s[b] == '*')) {
    ++b;
  } else {
    std::size_t d = b;
    while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
    if (d > b && d < s.size() && (s[d] == '.' || s[d] == ')')) b = d + 1;
  }
  return trim_segment(s.substr(b));
}

std::vector<std::string> split_text_response(std::string_view body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '\n' || body[i] == '|') {
      std::string seg = strip_list_marker(body.substr(start, i - start));
      if (!seg.empty()) out.push_back(std::move(seg));
      start = i + 1;
    }
  }
  return out;
}

constexpr std::string_view kPlanTemplate =
    "You are a motion planner for character animation.\n"
    "Split the description below into the sequence of simple body motions it contains,\n"
    "in the order they happen. Each segment must describe one motion of the same person\n"
    "and be understandable on its own. Do not add motions that are not described.\n"
    "Answer with one segment per line and nothing else.\n"
    "\n"
    "Description: {text}\n"
    "Segments:\n";

}  // namespace

MotionPlan plan_rule_based(std::string_view text) {
  if (is_blank(text)) throw Error(Errc::BlankInput, "motion text is blank");
  MotionPlan plan{{}, std::string(text), "rule-based", false};
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto hit = std::find_if(kConnectives.begin(), kConnectives.end(),
                                  [&](const Connective& c) { return matches_at(text, i, c); });
    if (hit == kConnectives.end()) {
      ++i;
      continue;
    }
    std::string seg = trim_segment(text.substr(start, i - start));
    if (!seg.empty()) plan.segments.push_back(std::move(seg));
    i += hit->token.size();
    start = i;
  }
  std::string seg = trim_segment(text.substr(start));
  if (!seg.empty()) plan.segments.push_back(std::move(seg));
  // Text made only of connectives and punctuation.
  if (plan.segments.empty()) throw Error(Errc::BlankInput, "motion text has no content besides connectives");
  return plan;
}

std::string_view plan_template() { return kPlanTemplate; }

std::string render_plan_prompt(std::string_view text) {
  std::string prompt(kPlanTemplate);
  const auto pos = prompt.find("{text}");
  prompt.replace(pos, 6, text);
  return prompt;
}

std::vector<std::string> parse_plan_response(std::string_view body) {
  std::size_t b = 0;
  while (b < body.size() && std::isspace(static_cast<unsigned char>(body[b]))) ++b;
  if (b < body.size() && (body[b] == '{' || body[b] == '[')) {
    detail::Json doc;
    try {
      doc = detail::parse_json(body, "plan response");
    } catch (const Error&) {
      return {};
    }
    if (doc.is_object() && doc.contains("text") && doc["text"].is_string())
      return split_text_response(doc["text"].get<std::string>());
    const detail::Json* list = doc.is_array() ? &doc : nullptr;
    if (doc.is_object() && doc.contains("segments")) list = &doc["segments"];
    if (!list || !list->is_array()) return {};
    std::vector<std::string> out;
    for (const auto& item : *list) {
      if (!item.is_string()) return {};
      std::string seg = strip_list_marker(item.get<std::string>());
      if (!seg.empty()) out.push_back(std::move(seg));
    }
    return out;
  }
  return split_text_response(body);
}

MotionPlan plan_llm(std::string_view text, LlmClient& llm) {
  if (is_blank(text)) throw Error(Errc::BlankInput, "motion text is blank");
  const std::string body = llm.complete(kPlanTemplateId, render_plan_prompt(text), text);
  auto segments = parse_plan_response(body);
  if (segments.empty()) {
    MotionPlan plan = plan_rule_based(text);
    plan.fallback = true;
    return plan;
  }
  return {std::move(segments), std::string(text), std::string(kPlanTemplateId), false};
}

namespace {

class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(std::string endpoint) : client_(std::move(endpoint)) {}

  std::string complete(std::string_view template_id, std::string_view prompt, std::string_view text) override {
    detail::Json request{{"template_id", template_id}, {"prompt", prompt}, {"text", text}};
    return client_.post(request.dump());
  }

 private:
  detail::HttpJsonClient client_;
};

}  // namespace

std::unique_ptr<LlmClient> make_http_llm_client(const std::string& endpoint) {
  std::string url = endpoint.empty() ? env_or_empty("LLM_ENDPOINT") : endpoint;
  if (url.empty()) throw Error(Errc::ServiceUnreachable, "no LLM endpoint configured (LLM_ENDPOINT)");
  return std::make_unique<HttpLlmClient>(std::move(url));
}

std::string write_plan(const MotionPlan& plan) {
  detail::Json doc{{"format", "motionrig.plan"},
                   {"version", 1},
                   {"source_text", plan.source_text},
                   {"template_id", plan.template_id},
                   {"fallback", plan.fallback},
                   {"segments", plan.segments}};
  return doc.dump(2) + "\n";
}

MotionPlan read_plan(std::string_view bytes) {
  const detail::Json doc = detail::parse_json(bytes, "plan");
  try {
    if (doc.at("format").get<std::string>() != "motionrig.plan" || doc.at("version").get<int>() != 1)
      throw Error(Errc::ParseError, "not a version 1 plan document");
    MotionPlan plan{doc.at("segments").get<std::vector<std::string>>(), doc.at("source_text").get<std::string>(),
                    doc.at("template_id").get<std::string>(), doc.at("fallback").get<bool>()};
    if (plan.segments.empty()) throw Error(Errc::ParseError, "plan has no segments");
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("plan: ") + e.what());
  }
}

MotionClip concat_clips(std::span<const MotionClip> clips, const KeypointFrame& reference,
                        const SkeletonTopology& reference_topology, const BoundaryPolicy& policy) {
  if (clips.empty()) throw Error(Errc::EmptyInput, "no clips to concatenate");
  if (policy.blend_frames < 0) throw Error(Errc::InvalidArgument, "blend_frames must be >= 0");
  if (!(policy.tolerance > 0.0)) throw Error(Errc::InvalidArgument, "boundary tolerance must be positive");
  const SkeletonTopology& topo = clips.front().topology();
  const Fps fps = clips.front().fps();
  for (const auto& c : clips) {
    if (!(c.topology() == topo))
      throw Error(Errc::TopologyMismatch, "clips use topologies '" + topo.name() + "' and '" + c.topology().name() + "'");
    if (!(c.fps() == fps)) throw Error(Errc::FpsMismatch, "clips have different frame rates");
    if (c.empty()) throw Error(Errc::EmptyClip, "cannot concatenate an empty clip");
  }
  validate_frame(reference, reference_topology);
  const KeypointFrame ref = remap_frame(reference, reference_topology, topo);

  // Frame i of a ramp of length k: lerp(reference, anchor, i / k).
  auto blend = [&](const KeypointFrame& anchor, const KeypointFrame& original, std::size_t i, std::size_t k) {
    KeypointFrame out = original;
    const double t = static_cast<double>(i) / static_cast<double>(k);
    for (std::size_t p = 0; p < out.size(); ++p) {
      if (!ref.present(p)) continue;
      if (anchor.present(p)) {
        out.positions[p] = lerp(ref.positions[p], anchor.positions[p], t);
        out.confidence[p] = ref.confidence[p] + t * (anchor.confidence[p] - ref.confidence[p]);
      } else if (i == 0) {
        out.positions[p] = ref.positions[p];
        out.confidence[p] = ref.confidence[p];
      }
    }
    return out;
  };

  std::vector<KeypointFrame> joined;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    const auto src = clips[c].frames();
    const std::size_t n = src.size();
    const std::size_t k = std::min(static_cast<std::size_t>(policy.blend_frames), n / 2);
    std::vector<KeypointFrame> frames(src.begin(), src.end());
    for (std::size_t i = 0; i < k; ++i) {
      frames[i] = blend(src[k], src[i], i, k);
      frames[n - 1 - i] = blend(src[n - 1 - k], src[n - 1 - i], i, k);
    }
    if (k == 0) {
      // Without a ramp the end frames are still pinned to the reference.
      frames.front() = blend(src.front(), src.front(), 0, 1);
      frames.back() = blend(src.back(), src.back(), 0, 1);
    }
    joined.insert(joined.end(), frames.begin() + (c == 0 ? 0 : 1), frames.end());
  }
  return MotionClip(clips.front().topology_ptr(), std::move(joined), fps);
}

}  // namespace motionrig
