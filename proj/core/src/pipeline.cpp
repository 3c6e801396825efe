#include "motionrig/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "detail/http.hpp"
#include "detail/json_io.hpp"
#include "motionrig/hashing.hpp"
#include "motionrig/retarget.hpp"
#include "motionrig/synthetic.hpp"

namespace motionrig {

namespace fs = std::filesystem;

namespace {

class HttpVideoGenerator final : public VideoGenerator {
 public:
  explicit HttpVideoGenerator(std::string endpoint) : client_(std::move(endpoint)) {}

  std::string generate(const MotionClip& skeleton, const ReferencePose& reference) override {
    detail::Json request;
    request["clip"] = detail::clip_to_json(skeleton, reference.image_size);
    request["reference"] = detail::Json::parse(write_reference(reference));
    const detail::Json response = client_.post_json(request);
    if (!response.is_object() || !response.contains("video_id") || !response["video_id"].is_string())
      throw Error(Errc::ContractViolation, "generator response lacks a string \"video_id\"");
    return response["video_id"].get<std::string>();
  }

 private:
  detail::HttpJsonClient client_;
};

class HttpPoseExtractor final : public PoseExtractor {
 public:
  explicit HttpPoseExtractor(std::string endpoint) : client_(std::move(endpoint)) {}

  MotionClip extract(const std::string& video_id) override {
    try {
      return detail::clip_from_json(client_.post_json({{"video_id", video_id}})).clip;
    } catch (const Error& e) {
      if (e.code() == Errc::ParseError || e.code() == Errc::UnknownTopology)
        throw Error(Errc::ContractViolation, std::string("pose extractor response: ") + e.what());
      throw;
    }
  }

 private:
  detail::HttpJsonClient client_;
};

std::string resolve(const std::string& endpoint, const char* env) {
  std::string url = endpoint.empty() ? env_or_empty(env) : endpoint;
  if (url.empty()) throw Error(Errc::ServiceUnreachable, std::string("no endpoint configured (") + env + ")");
  return url;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw Error(Errc::InvalidArgument, "not an integer: '" + std::string(s) + "'");
  return v;
}

std::pair<int, int> parse_hw(std::string_view s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string_view::npos) throw Error(Errc::InvalidArgument, "expected HxW, got '" + std::string(s) + "'");
  return {parse_int(s.substr(0, x)), parse_int(s.substr(x + 1))};
}

ReferencePose load_reference(const fs::path& path) { return read_reference(read_file(path)); }

PoseClipDocument load_clip(const fs::path& path) { return read_clip(read_file(path)); }

}  // namespace

std::unique_ptr<VideoGenerator> make_http_video_generator(const std::string& endpoint) {
  return std::make_unique<HttpVideoGenerator>(resolve(endpoint, "GENERATOR_ENDPOINT"));
}

std::unique_ptr<PoseExtractor> make_http_pose_extractor(const std::string& endpoint) {
  return std::make_unique<HttpPoseExtractor>(resolve(endpoint, "POSE_EXTRACTOR_ENDPOINT"));
}

HandMode parse_hand_mode(std::string_view text) {
  if (text == "template") return HandMode::Template;
  if (text == "external") return HandMode::External;
  throw Error(Errc::InvalidArgument, "hand mode must be 'template' or 'external', got '" + std::string(text) + "'");
}

FrameGeometry parse_geometry(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(Errc::InvalidArgument, "geometry must be HxW:HxW, got '" + std::string(text) + "'");
  const auto [fh, fw] = parse_hw(text.substr(0, colon));
  const auto [rh, rw] = parse_hw(text.substr(colon + 1));
  FrameGeometry g{fh, fw, rh, rw};
  validate_geometry(g);
  return g;
}

PipelineServices PipelineServices::from_endpoints(const ServiceEndpoints& e) {
  PipelineServices s;
  if (!e.llm.empty()) s.llm = make_http_llm_client(e.llm);
  if (!e.adapter.empty()) s.adapter = make_http_hand_adapter(e.adapter);
  if (!e.generator.empty()) s.generator = make_http_video_generator(e.generator);
  if (!e.pose_extractor.empty()) s.extractor = make_http_pose_extractor(e.pose_extractor);
  if (!e.describer.empty()) s.describer = make_http_describer(e.describer);
  if (!e.embedder.empty()) s.embedder = make_http_embedder(e.embedder);
  return s;
}

void PipelineConfig::validate() const {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(Errc::InvalidArgument, "motion text is empty");
  if (refine < 0) throw Error(Errc::InvalidArgument, "refine count must be >= 0");
  if (jobs < 1) throw Error(Errc::InvalidArgument, "jobs must be >= 1");
  if (synthetic_frames == 0) throw Error(Errc::InvalidArgument, "synthetic frame count must be positive");
  if (out.empty()) throw Error(Errc::InvalidArgument, "output directory is empty");
  validate_geometry(geometry);
  validate_style(style);
  if (!reference.empty() && !fs::is_regular_file(reference))
    throw Error(Errc::Io, "reference keypoints not found: " + reference.string());
  for (const auto& m : motion3d) {
    if (!fs::is_regular_file(m)) throw Error(Errc::Io, "3D motion file not found: " + m.string());
  }
}

int exit_code_for(std::string_view stage, Errc code) {
  switch (code) {
    case Errc::ServiceUnreachable:
    case Errc::ContractViolation:
      return 10;
    case Errc::Io:
    case Errc::ParseError:
    case Errc::UnknownTopology:
      return 3;
    default:
      break;
  }
  if (stage == "config") return 2;
  if (stage == "plan") return 4;
  if (stage == "synth" || stage == "reference" || stage == "project" || stage == "align" || stage == "retarget")
    return 5;
  if (stage == "hands") return 6;
  if (stage == "concat" || stage == "refine") return 7;
  if (stage == "render") return 8;
  if (stage == "score") return 9;
  return 1;
}

namespace stages {

std::string segment_dir(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seg_%02zu", index);
  return buf;
}

MotionPlan plan(std::string_view text, LlmClient* llm, const fs::path& out) {
  MotionPlan p = llm ? plan_llm(text, *llm) : plan_rule_based(text);
  write_file(out, write_plan(p));
  return p;
}

void synth(std::string_view text, std::uint64_t seed, std::size_t frames, const fs::path& out) {
  write_file(out, write_motion3d(synthetic::generate_motion(text, seed, frames)));
}

void reference(const fs::path& input, FrameSize default_size, const fs::path& out) {
  const ReferencePose ref = input.empty() ? synthetic::reference_pose(default_size) : load_reference(input);
  write_file(out, write_reference(ref));
}

void project(const fs::path& motion3d, const ProjectionConfig& config, FrameSize size, const fs::path& out) {
  const MotionClip3D clip = read_motion3d(read_file(motion3d));
  write_file(out, write_clip(motionrig::project(clip, config, topologies::body18()), size));
}

void align(const fs::path& clip, const fs::path& reference, const FrameGeometry& geometry,
           const AlignOptions& options, const fs::path& out_clip, const fs::path& out_params) {
  const PoseClipDocument doc = load_clip(clip);
  const ReferencePose ref = load_reference(reference);
  const AlignResult r = align_clip(doc.clip, ref.frame, *ref.topology, geometry, options);
  write_file(out_clip, write_clip(r.clip, doc.frame_size));
  const detail::Json params{
      {"format", "motionrig.align-params"},
      {"version", 1},
      {"a_x", r.params.a_x},
      {"a_y", r.params.a_y},
      {"b_x", r.params.b_x},
      {"b_y", r.params.b_y},
      {"used_fallback", r.used_fallback},
      {"fit_source", options.source == FitSource::FirstFrame ? "first-frame" : "all-frames"},
      {"geometry",
       {{"frame_height", geometry.frame_height},
        {"frame_width", geometry.frame_width},
        {"ref_height", geometry.ref_height},
        {"ref_width", geometry.ref_width}}}};
  write_file(out_params, params.dump(2) + "\n");
}

void retarget(const fs::path& clip, const fs::path& reference, const fs::path& out) {
  const PoseClipDocument doc = load_clip(clip);
  const ReferencePose ref = load_reference(reference);
  const KeypointFrame target = remap_frame(ref.frame, *ref.topology, doc.clip.topology());
  const BoneLengthProfile profile = measure_profile(target, doc.clip.topology());
  write_file(out, write_clip(retarget_clip(doc.clip, profile), doc.frame_size));
}

void hands(const fs::path& clip, const fs::path& reference, HandMode mode, std::string_view hand_template,
           HandAdapter* adapter, const fs::path& out) {
  const PoseClipDocument doc = load_clip(clip);
  if (mode == HandMode::Template) {
    const HandCompletion done = complete_hands_template(doc.clip, HandTemplate::named(hand_template));
    write_file(out, write_clip(done.clip, doc.frame_size));
    return;
  }
  if (!adapter) throw Error(Errc::ServiceUnreachable, "external hand mode needs an adapter endpoint");
  const ReferencePose ref = load_reference(reference);
  write_file(out, write_clip(complete_hands_external(doc.clip, ref.frame, *ref.topology, *adapter), doc.frame_size));
}

void concat(const std::vector<fs::path>& clips, const fs::path& reference, const BoundaryPolicy& policy,
            const fs::path& out) {
  if (clips.empty()) throw Error(Errc::EmptyInput, "no clips to concatenate");
  std::vector<MotionClip> loaded;
  FrameSize size;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    PoseClipDocument doc = load_clip(clips[i]);
    if (i == 0) size = doc.frame_size;
    loaded.push_back(std::move(doc.clip));
  }
  const ReferencePose ref = load_reference(reference);
  write_file(out, write_clip(concat_clips(loaded, ref.frame, *ref.topology, policy), size));
}

void refine(const fs::path& clip, const fs::path& reference, VideoGenerator& generator, PoseExtractor& extractor,
            const fs::path& out) {
  const PoseClipDocument doc = load_clip(clip);
  const ReferencePose ref = load_reference(reference);
  const std::string id = generator.generate(doc.clip, ref);
  const MotionClip extracted = extractor.extract(id);
  if (extracted.empty()) throw Error(Errc::ContractViolation, "pose extractor returned an empty clip");
  write_file(out, write_clip(extracted, doc.frame_size));
}

std::vector<fs::path> render(const fs::path& clip, const RenderStyle& style, std::optional<FrameSize> size,
                             const fs::path& out_dir) {
  const PoseClipDocument doc = load_clip(clip);
  return render_clip(doc.clip, style, size.value_or(doc.frame_size), out_dir);
}

void score(const fs::path& frames_dir, std::string_view text, const fs::path& reference_frame,
           DescriptionProvider* describer, EmbeddingProvider* embedder, const ScoreOptions& options,
           const fs::path& out) {
  const VideoRef video = load_video(frames_dir);
  std::optional<Image> ref;
  if (!reference_frame.empty()) ref = read_ppm(reference_frame);
  PoseHeuristicDescriber offline_describer;
  BagOfWordsEmbedder offline_embedder;
  MetricsReport report = score_video(video, text, ref ? &*ref : nullptr, describer ? describer : &offline_describer,
                                     embedder ? embedder : &offline_embedder, options);
  report.metadata["sample_seed"] = std::to_string(options.seed);
  write_file(out, write_metrics_report(report));
}

}  // namespace stages

namespace {

class Recorder {
 public:
  explicit Recorder(fs::path root) : root_(std::move(root)) {}

  FileDigest digest(const fs::path& p) const {
    const fs::path rel = p.lexically_relative(root_);
    const bool inside = !rel.empty() && *rel.begin() != "..";
    return {inside ? rel.generic_string() : p.generic_string(), sha256_file(p)};
  }

  StageRecord record(std::string stage, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& outputs) const {
    StageRecord r{std::move(stage), {}, {}};
    for (const auto& p : inputs) r.inputs.push_back(digest(p));
    for (const auto& p : outputs) r.outputs.push_back(digest(p));
    return r;
  }

 private:
  fs::path root_;
};

template <class F>
auto run_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

}  // namespace

std::string write_manifest(const Manifest& manifest, const PipelineConfig& config) {
  auto files = [](const std::vector<FileDigest>& v) {
    detail::Json a = detail::Json::array();
    for (const auto& f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  detail::Json stages_json = detail::Json::array();
  for (const auto& s : manifest.stages)
    stages_json.push_back({{"stage", s.stage}, {"inputs", files(s.inputs)}, {"outputs", files(s.outputs)}});

  std::vector<std::string> motion3d;
  for (const auto& m : config.motion3d) motion3d.push_back(m.generic_string());
  const auto& g = config.geometry;
  char geometry[64];
  std::snprintf(geometry, sizeof geometry, "%dx%d:%dx%d", g.frame_height, g.frame_width, g.ref_height, g.ref_width);
  const detail::Json doc{
      {"format", "motionrig.manifest"},
      {"version", 1},
      {"config",
       {{"text", config.text},
        {"reference", config.reference.generic_string()},
        {"motion3d", motion3d},
        {"geometry", geometry},
        {"blend_frames", config.boundary.blend_frames},
        {"hand_mode", config.hand_mode == HandMode::Template ? "template" : "external"},
        {"hand_template", config.hand_template},
        {"refine", config.refine},
        {"seed", config.seed},
        {"synthetic_frames", config.synthetic_frames}}},
      {"stages", stages_json},
      {"notices", manifest.notices}};
  return doc.dump(2) + "\n";
}

PipelineResult run_pipeline(const PipelineConfig& config, PipelineServices services, NoticeSink notice) {
  if (!notice) notice = [](const std::string& msg) { std::cerr << "motionrig: " << msg << '\n'; };
  run_stage("config", [&] {
    config.validate();
    return 0;
  });

  const fs::path& out = config.out;
  fs::create_directories(out);
  const Recorder rec(out);
  Manifest manifest;
  auto note = [&](const std::string& msg) {
    manifest.notices.push_back(msg);
    notice(msg);
  };

  const FrameSize frame_size{config.geometry.frame_height, config.geometry.frame_width};
  const FrameSize ref_size{config.geometry.ref_height, config.geometry.ref_width};

  const fs::path plan_path = out / "plan.json";
  const MotionPlan plan = run_stage("plan", [&] { return stages::plan(config.text, services.llm.get(), plan_path); });
  if (plan.fallback) note("planner response unusable; rule-based split used");
  manifest.stages.push_back(rec.record("plan", {}, {plan_path}));

  const fs::path ref_path = out / "reference.json";
  run_stage("reference", [&] {
    stages::reference(config.reference, ref_size, ref_path);
    return 0;
  });
  manifest.stages.push_back(rec.record("reference", config.reference.empty() ? std::vector<fs::path>{}
                                                                             : std::vector<fs::path>{config.reference},
                                       {ref_path}));

  const std::size_t segments = config.motion3d.empty() ? plan.segments.size() : config.motion3d.size();
  if (!config.motion3d.empty() && config.motion3d.size() != plan.segments.size())
    note("using " + std::to_string(segments) + " supplied 3D clips for " + std::to_string(plan.segments.size()) +
         " planned segments");

  std::vector<std::vector<StageRecord>> seg_records(segments);
  std::vector<fs::path> hand_clips(segments);
  std::vector<std::exception_ptr> seg_errors(segments);
  auto run_segment = [&](std::size_t i) {
    const fs::path dir = out / "segments" / stages::segment_dir(i);
    auto& r = seg_records[i];
    const std::string tag = " (" + stages::segment_dir(i) + ")";
    const fs::path m3d = dir / "motion3d.json";
    if (config.motion3d.empty()) {
      run_stage("synth" + tag, [&] {
        stages::synth(plan.segments[i], synthetic::segment_seed(config.seed, i), config.synthetic_frames, m3d);
        return 0;
      });
      r.push_back(rec.record("synth", {plan_path}, {m3d}));
    } else {
      run_stage("synth" + tag, [&] {
        write_file(m3d, write_motion3d(read_motion3d(read_file(config.motion3d[i]))));
        return 0;
      });
      r.push_back(rec.record("synth", {config.motion3d[i]}, {m3d}));
    }

    const fs::path projected = dir / "projected.json";
    run_stage("project" + tag, [&] {
      stages::project(m3d, config.projection, frame_size, projected);
      return 0;
    });
    r.push_back(rec.record("project", {m3d}, {projected}));

    const fs::path aligned = dir / "aligned.json";
    const fs::path params = dir / "align_params.json";
    run_stage("align" + tag, [&] {
      stages::align(projected, ref_path, config.geometry, config.align, aligned, params);
      return 0;
    });
    r.push_back(rec.record("align", {projected, ref_path}, {aligned, params}));

    const fs::path retargeted = dir / "retargeted.json";
    run_stage("retarget" + tag, [&] {
      stages::retarget(aligned, ref_path, retargeted);
      return 0;
    });
    r.push_back(rec.record("retarget", {aligned, ref_path}, {retargeted}));

    hand_clips[i] = dir / "hands.json";
    run_stage("hands" + tag, [&] {
      stages::hands(retargeted, ref_path, config.hand_mode, config.hand_template, services.adapter.get(),
                    hand_clips[i]);
      return 0;
    });
    r.push_back(rec.record("hands", {retargeted, ref_path}, {hand_clips[i]}));
  };

  {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < segments; i = next++) {
        try {
          run_segment(i);
        } catch (...) {
          seg_errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), segments);
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < segments; ++i) {
    if (seg_errors[i]) std::rethrow_exception(seg_errors[i]);
    for (auto& r : seg_records[i]) {
      r.stage = stages::segment_dir(i) + "/" + r.stage;
      manifest.stages.push_back(std::move(r));
    }
  }

  fs::path current = out / "concat.json";
  run_stage("concat", [&] {
    stages::concat(hand_clips, ref_path, config.boundary, current);
    return 0;
  });
  {
    std::vector<fs::path> inputs = hand_clips;
    inputs.push_back(ref_path);
    manifest.stages.push_back(rec.record("concat", inputs, {current}));
  }

  if (config.refine > 0) {
    if (services.generator && services.extractor) {
      for (int k = 1; k <= config.refine; ++k) {
        const fs::path refined = out / ("refined_" + std::to_string(k) + ".json");
        run_stage("refine", [&] {
          stages::refine(current, ref_path, *services.generator, *services.extractor, refined);
          return 0;
        });
        manifest.stages.push_back(rec.record("refine", {current, ref_path}, {refined}));
        current = refined;
      }
    } else {
      note("refinement skipped: no video generator and pose extractor endpoints configured");
    }
  }

  const fs::path frames = out / "frames";
  const auto rendered = run_stage("render", [&] { return stages::render(current, config.style, frame_size, frames); });
  manifest.stages.push_back(rec.record("render", {current}, rendered));

  const fs::path ref_frames = out / "reference_frames";
  const auto ref_rendered =
      run_stage("render", [&] { return stages::render(ref_path, config.style, frame_size, ref_frames); });
  manifest.stages.push_back(rec.record("render-reference", {ref_path}, ref_rendered));

  const fs::path metrics = out / "metrics.json";
  if (!services.describer) note("describer: offline pose-heuristic fallback");
  if (!services.embedder) note("embedder: offline bag-of-words fallback");
  run_stage("score", [&] {
    stages::score(frames, plan.source_text, ref_frames / frame_file_name(0), services.describer.get(),
                  services.embedder.get(), config.score, metrics);
    return 0;
  });
  {
    std::vector<fs::path> inputs(rendered.begin(), rendered.end());
    inputs.push_back(ref_frames / frame_file_name(0));
    manifest.stages.push_back(rec.record("score", inputs, {metrics}));
  }

  write_file(out / "manifest.json", write_manifest(manifest, config));
  return {std::move(manifest), current};
}

}  // namespace motionrig
