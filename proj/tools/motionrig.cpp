// motionrig command-line tool: one subcommand per pipeline stage plus
// `pipeline`, which runs them all.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "motionrig/pipeline.hpp"
#include "motionrig/synthetic.hpp"

namespace fs = std::filesystem;
using namespace motionrig;

namespace {

struct Common {
  std::string text;
  std::string ref;
  std::string geometry = "1024x576:1024x576";
  std::string out;
  std::string clip;
  std::string mode = "template";
  std::string hand_template = "default";
  std::string fit_source = "first-frame";
  std::vector<std::string> motion3d;
  std::vector<std::string> clips;
  std::string frames;
  std::string reference_frame;
  std::string size;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t frame_count = 40;
  std::size_t samples = 10;
  int blend = 3;
  int jobs = 1;
  int refine = 1;
};

FrameSize parse_size(const std::string& s) {
  const FrameGeometry g = parse_geometry(s + ":" + s);
  return {g.frame_height, g.frame_width};
}

AlignOptions parse_fit_source(const std::string& s) {
  if (s == "first-frame") return {FitSource::FirstFrame};
  if (s == "all-frames") return {FitSource::AllFrames};
  throw Error(Errc::InvalidArgument, "fit source must be 'first-frame' or 'all-frames'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-motion skeleton pipeline: plan, project, align, retarget, complete hands, render, score"};
  app.require_subcommand(1);
  Common o;
  std::string stage;

  auto add_geometry = [&](CLI::App* c) {
    c->add_option("--geometry", o.geometry, "Frame and reference size, HxW:HxW")->capture_default_str();
  };
  auto add_ref = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--ref-keypoints", o.ref, "Reference skeleton (pose clip or detector JSON)");
    if (required) opt->required()->check(CLI::ExistingFile);
  };

  auto* plan = app.add_subcommand("plan", "Split motion text into segments (LLM_ENDPOINT if set)");
  plan->add_option("--text", o.text)->required();
  plan->add_option("--out", o.out)->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic 3D clip for one segment");
  synth->add_option("--text", o.text)->required();
  synth->add_option("--seed", o.seed, "Run seed")->capture_default_str();
  synth->add_option("--index", o.index, "Segment index mixed into the seed")->capture_default_str();
  synth->add_option("--frames", o.frame_count)->capture_default_str();
  synth->add_option("--out", o.out)->required();

  auto* reference = app.add_subcommand("reference", "Normalize reference keypoints into a pose clip file");
  add_ref(reference, false);
  add_geometry(reference);
  reference->add_option("--out", o.out)->required();

  auto* project = app.add_subcommand("project", "Project a 3D clip to 2D body keypoints");
  project->add_option("--motion3d", o.clip)->required()->check(CLI::ExistingFile);
  add_geometry(project);
  project->add_option("--out", o.out)->required();

  std::string params_out;
  auto* align = app.add_subcommand("align", "Fit and apply the affine alignment to the reference");
  align->add_option("--clip", o.clip)->required()->check(CLI::ExistingFile);
  add_ref(align, true);
  add_geometry(align);
  align->add_option("--fit-source", o.fit_source, "first-frame or all-frames")->capture_default_str();
  align->add_option("--out", o.out)->required();
  align->add_option("--params", params_out, "Alignment parameter report")->required();

  auto* retarget = app.add_subcommand("retarget", "Rescale bones to the reference's bone lengths");
  retarget->add_option("--clip", o.clip)->required()->check(CLI::ExistingFile);
  add_ref(retarget, true);
  retarget->add_option("--out", o.out)->required();

  auto* hands = app.add_subcommand("hands", "Complete hand keypoints (template or ADAPTER_ENDPOINT)");
  hands->add_option("--clip", o.clip)->required()->check(CLI::ExistingFile);
  add_ref(hands, true);
  hands->add_option("--mode", o.mode, "template or external")->capture_default_str();
  hands->add_option("--template", o.hand_template, "default or relaxed-open")->capture_default_str();
  hands->add_option("--out", o.out)->required();

  auto* concat = app.add_subcommand("concat", "Join clips through the reference pose");
  concat->add_option("--clips", o.clips)->required()->check(CLI::ExistingFile);
  add_ref(concat, true);
  concat->add_option("--blend-frames", o.blend)->capture_default_str();
  concat->add_option("--out", o.out)->required();

  auto* refine = app.add_subcommand("refine", "One generator + pose-extractor round trip");
  refine->add_option("--clip", o.clip)->required()->check(CLI::ExistingFile);
  add_ref(refine, true);
  refine->add_option("--out", o.out)->required();

  auto* render = app.add_subcommand("render", "Rasterize a clip to PPM frames");
  render->add_option("--clip", o.clip)->required()->check(CLI::ExistingFile);
  render->add_option("--size", o.size, "HxW; defaults to the clip's frame size");
  render->add_option("--out", o.out, "Output directory")->required();

  auto* score = app.add_subcommand("score", "PSNR / SSIM / MotionScore report");
  score->add_option("--frames", o.frames, "Rendered frames directory")->required()->check(CLI::ExistingDirectory);
  score->add_option("--text", o.text)->required();
  score->add_option("--reference-frame", o.reference_frame, "Reference image (PPM) for PSNR / SSIM");
  score->add_option("--samples", o.samples)->capture_default_str();
  score->add_option("--seed", o.seed)->capture_default_str();
  score->add_option("--out", o.out)->required();

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage into one artifact tree");
  pipeline->add_option("--text", o.text)->required();
  add_ref(pipeline, false);
  pipeline->add_option("--motion3d", o.motion3d, "3D clip per segment (default: synthetic)");
  pipeline->add_option("--out", o.out)->required();
  add_geometry(pipeline);
  pipeline->add_option("--blend-frames", o.blend)->capture_default_str();
  pipeline->add_option("--mode", o.mode, "Hand completion: template or external")->capture_default_str();
  pipeline->add_option("--template", o.hand_template)->capture_default_str();
  pipeline->add_option("--fit-source", o.fit_source)->capture_default_str();
  pipeline->add_option("--seed", o.seed)->capture_default_str();
  pipeline->add_option("--jobs", o.jobs)->capture_default_str();
  pipeline->add_option("--refine", o.refine, "Refinement iterations")->capture_default_str();
  pipeline->add_option("--frames", o.frame_count, "Synthetic frames per segment")->capture_default_str();
  pipeline->add_option("--samples", o.samples)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const ServiceEndpoints endpoints = ServiceEndpoints::from_environment();
  try {
    if (*plan) {
      stage = "plan";
      std::unique_ptr<LlmClient> llm;
      if (!endpoints.llm.empty()) llm = make_http_llm_client(endpoints.llm);
      stages::plan(o.text, llm.get(), o.out);
    } else if (*synth) {
      stage = "synth";
      stages::synth(o.text, synthetic::segment_seed(o.seed, o.index), o.frame_count, o.out);
    } else if (*reference) {
      stage = "reference";
      const FrameGeometry g = parse_geometry(o.geometry);
      stages::reference(o.ref, {g.ref_height, g.ref_width}, o.out);
    } else if (*project) {
      stage = "project";
      const FrameGeometry g = parse_geometry(o.geometry);
      stages::project(o.clip, {}, {g.frame_height, g.frame_width}, o.out);
    } else if (*align) {
      stage = "align";
      stages::align(o.clip, o.ref, parse_geometry(o.geometry), parse_fit_source(o.fit_source), o.out, params_out);
    } else if (*retarget) {
      stage = "retarget";
      stages::retarget(o.clip, o.ref, o.out);
    } else if (*hands) {
      stage = "hands";
      const HandMode mode = parse_hand_mode(o.mode);
      std::unique_ptr<HandAdapter> adapter;
      if (mode == HandMode::External) adapter = make_http_hand_adapter(endpoints.adapter);
      stages::hands(o.clip, o.ref, mode, o.hand_template, adapter.get(), o.out);
    } else if (*concat) {
      stage = "concat";
      std::vector<fs::path> clips(o.clips.begin(), o.clips.end());
      BoundaryPolicy policy;
      policy.blend_frames = o.blend;
      stages::concat(clips, o.ref, policy, o.out);
    } else if (*refine) {
      stage = "refine";
      auto generator = make_http_video_generator(endpoints.generator);
      auto extractor = make_http_pose_extractor(endpoints.pose_extractor);
      stages::refine(o.clip, o.ref, *generator, *extractor, o.out);
    } else if (*render) {
      stage = "render";
      std::optional<FrameSize> size;
      if (!o.size.empty()) size = parse_size(o.size);
      stages::render(o.clip, RenderStyle{}, size, o.out);
    } else if (*score) {
      stage = "score";
      const PipelineServices services = PipelineServices::from_endpoints(endpoints);
      ScoreOptions options;
      options.sample_count = o.samples;
      options.seed = o.seed;
      stages::score(o.frames, o.text, o.reference_frame, services.describer.get(), services.embedder.get(), options,
                    o.out);
    } else if (*pipeline) {
      stage = "config";
      PipelineConfig config;
      config.text = o.text;
      config.reference = o.ref;
      config.motion3d.assign(o.motion3d.begin(), o.motion3d.end());
      config.out = o.out;
      config.geometry = parse_geometry(o.geometry);
      config.align = parse_fit_source(o.fit_source);
      config.boundary.blend_frames = o.blend;
      config.hand_mode = parse_hand_mode(o.mode);
      config.hand_template = o.hand_template;
      config.seed = o.seed;
      config.jobs = o.jobs;
      config.refine = o.refine;
      config.synthetic_frames = o.frame_count;
      config.score.sample_count = o.samples;
      const PipelineResult result = run_pipeline(config, PipelineServices::from_endpoints(endpoints));
      std::cout << (config.out / "manifest.json").string() << '\n';
      (void)result;
    }
  } catch (const StageError& e) {
    std::cerr << "motionrig: " << e.what() << '\n';
    // Stage names in the pipeline carry a "(seg_NN)" suffix.
    const std::string family = e.stage().substr(0, e.stage().find(' '));
    return exit_code_for(family, e.code());
  } catch (const Error& e) {
    std::cerr << "motionrig " << stage << ": " << e.what() << '\n';
    return exit_code_for(stage, e.code());
  } catch (const std::exception& e) {
    std::cerr << "motionrig " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
