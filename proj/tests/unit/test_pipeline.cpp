#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "motionrig/errors.hpp"
#include "motionrig/hashing.hpp"
#include "motionrig/pipeline.hpp"
#include "motionrig/pose_io.hpp"
#include "motionrig/planner.hpp"
#include "motionrig/synthetic.hpp"

using namespace motionrig;
namespace fs = std::filesystem;

namespace {

const char* kText = "A person walks forward, then waves the right hand";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "motionrig_pipeline_test" / name;
  fs::remove_all(p);
  return p;
}

PipelineConfig offline_config(const fs::path& out) {
  PipelineConfig c;
  c.text = kText;
  c.out = out;
  c.synthetic_frames = 24;
  return c;
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = sha256_file(e.path());
  }
  return out;
}

class EchoService final : public VideoGenerator, public PoseExtractor {
 public:
  std::string generate(const MotionClip& skeleton, const ReferencePose&) override {
    clips_.push_back(skeleton);
    return std::to_string(clips_.size() - 1);
  }
  MotionClip extract(const std::string& id) override { return clips_.at(std::stoul(id)); }

 private:
  std::vector<MotionClip> clips_;
};

#ifdef MOTIONRIG_CLI
int run(const std::string& args) {
  const std::string cmd = "env -u LLM_ENDPOINT -u ADAPTER_ENDPOINT -u DESCRIBER_ENDPOINT -u EMBEDDER_ENDPOINT "
                          "-u GENERATOR_ENDPOINT -u POSE_EXTRACTOR_ENDPOINT " MOTIONRIG_CLI " " +
                          args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }
#endif

}  // namespace

TEST(Pipeline, OfflineRunProducesFullTree) {
  const auto out = scratch("offline");
  std::vector<std::string> notices;
  const auto result = run_pipeline(offline_config(out), {}, [&](const std::string& n) { notices.push_back(n); });
  for (const char* f : {"plan.json", "reference.json", "concat.json", "metrics.json", "manifest.json",
                        "frames/index.json", "frames/poses.json", "frames/frame_0000.ppm",
                        "reference_frames/frame_0000.ppm", "segments/seg_00/hands.json",
                        "segments/seg_01/align_params.json"}) {
    EXPECT_TRUE(fs::is_regular_file(out / f)) << f;
  }
  EXPECT_EQ(result.final_clip, out / "concat.json");
  // Two 24-frame segments joined once.
  EXPECT_TRUE(fs::is_regular_file(out / "frames" / "frame_0046.ppm"));
  EXPECT_FALSE(fs::exists(out / "frames" / "frame_0047.ppm"));
  const auto metrics = nlohmann::json::parse(read_file(out / "metrics.json"));
  EXPECT_EQ(metrics["metadata"]["describer"], "pose-heuristic");
  EXPECT_EQ(metrics["metadata"]["embedder"], "bag-of-words");
  EXPECT_TRUE(metrics["rows"][0][7].is_number());
  EXPECT_TRUE(std::any_of(notices.begin(), notices.end(),
                          [](const std::string& n) { return n.find("refinement skipped") != std::string::npos; }));
}

TEST(Pipeline, ManifestListsEveryFileWithItsHash) {
  const auto out = scratch("manifest");
  run_pipeline(offline_config(out), {}, [](const std::string&) {});
  const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
  std::map<std::string, std::string> listed;
  for (const auto& stage : manifest["stages"])
    for (const auto& f : stage["outputs"]) listed[f["path"]] = f["sha256"];
  auto actual = tree_hashes(out);
  actual.erase("manifest.json");
  EXPECT_EQ(listed, actual);
  for (const auto& stage : manifest["stages"])
    for (const auto& f : stage["inputs"]) EXPECT_EQ(f["sha256"], sha256_file(out / f["path"].get<std::string>()));
}

TEST(Pipeline, DeterministicAcrossRunsAndJobCounts) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_pipeline(offline_config(a), {}, [](const std::string&) {});
  auto cb = offline_config(b);
  cb.jobs = 3;
  run_pipeline(cb, {}, [](const std::string&) {});
  EXPECT_EQ(read_file(a / "manifest.json"), read_file(b / "manifest.json"));
  EXPECT_EQ(tree_hashes(a), tree_hashes(b));
}

TEST(Pipeline, EchoRefinementIsAFixedPoint) {
  const auto a = scratch("refine0"), b = scratch("refine1");
  auto ca = offline_config(a);
  ca.refine = 0;
  run_pipeline(ca, {}, [](const std::string&) {});
  auto echo = std::make_shared<EchoService>();
  PipelineServices services;
  services.generator = echo;
  services.extractor = echo;
  auto cb = offline_config(b);
  cb.refine = 1;
  const auto result = run_pipeline(cb, services, [](const std::string&) {});
  EXPECT_EQ(result.final_clip, b / "refined_1.json");
  EXPECT_EQ(read_file(a / "concat.json"), read_file(b / "refined_1.json"));
  EXPECT_EQ(tree_hashes(a / "frames"), tree_hashes(b / "frames"));
}

TEST(Pipeline, StageErrorNamesStageAndKeepsArtifacts) {
  const auto out = scratch("broken_ref");
  const auto bad = scratch("inputs") / "ref.json";
  write_file(bad, "{\"people\": []}");
  auto c = offline_config(out);
  c.reference = bad;
  try {
    run_pipeline(c, {}, [](const std::string&) {});
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "reference");
    EXPECT_EQ(e.code(), Errc::ParseError);
  }
  EXPECT_TRUE(fs::is_regular_file(out / "plan.json"));
}

TEST(Pipeline, ExternalHandsWithoutAdapter) {
  auto c = offline_config(scratch("no_adapter"));
  c.hand_mode = HandMode::External;
  try {
    run_pipeline(c, {}, [](const std::string&) {});
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "hands (seg_00)");
    EXPECT_EQ(e.code(), Errc::ServiceUnreachable);
  }
}

TEST(Pipeline, ConfigValidation) {
  auto c = offline_config(scratch("cfg"));
  c.refine = -1;
  EXPECT_THROW(run_pipeline(c, {}, [](const std::string&) {}), StageError);
  c = offline_config(scratch("cfg"));
  c.motion3d = {"/nonexistent/motion.json"};
  EXPECT_THROW(run_pipeline(c, {}, [](const std::string&) {}), StageError);
  EXPECT_EQ(parse_geometry("1024x576:720x1280"), (FrameGeometry{1024, 576, 720, 1280}));
  EXPECT_THROW(parse_geometry("1024x576"), Error);
  EXPECT_THROW(parse_geometry("0x576:1x1"), Error);
}

TEST(Pipeline, SuppliedMotionFilesDefineSegments) {
  const auto in = scratch("m3d_inputs");
  write_file(in / "a.json", write_motion3d(synthetic::generate_motion("wave", 1, 18)));
  auto c = offline_config(scratch("m3d"));
  c.motion3d = {in / "a.json"};
  run_pipeline(c, {}, [](const std::string&) {});
  EXPECT_TRUE(fs::is_regular_file(c.out / "segments/seg_00/hands.json"));
  EXPECT_FALSE(fs::exists(c.out / "segments/seg_01"));
}

#ifdef MOTIONRIG_CLI
TEST(Cli, StageByStageMatchesPipeline) {
  const auto whole = scratch("cli_whole"), manual = scratch("cli_manual");
  ASSERT_EQ(run("pipeline --text '" + std::string(kText) + "' --out " + q(whole)), 0);

  ASSERT_EQ(run("plan --text '" + std::string(kText) + "' --out " + q(manual / "plan.json")), 0);
  ASSERT_EQ(run("reference --out " + q(manual / "reference.json")), 0);
  const auto plan = read_plan(read_file(manual / "plan.json"));
  std::string hands;
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const fs::path d = manual / "segments" / stages::segment_dir(i);
    const std::string ref = " --ref-keypoints " + q(manual / "reference.json");
    ASSERT_EQ(run("synth --text '" + plan.segments[i] + "' --index " + std::to_string(i) + " --out " +
                  q(d / "motion3d.json")),
              0);
    ASSERT_EQ(run("project --motion3d " + q(d / "motion3d.json") + " --out " + q(d / "projected.json")), 0);
    ASSERT_EQ(run("align --clip " + q(d / "projected.json") + ref + " --out " + q(d / "aligned.json") +
                  " --params " + q(d / "align_params.json")),
              0);
    ASSERT_EQ(run("retarget --clip " + q(d / "aligned.json") + ref + " --out " + q(d / "retargeted.json")), 0);
    ASSERT_EQ(run("hands --clip " + q(d / "retargeted.json") + ref + " --out " + q(d / "hands.json")), 0);
    hands += " " + q(d / "hands.json");
  }
  ASSERT_EQ(run("concat --clips" + hands + " --ref-keypoints " + q(manual / "reference.json") + " --out " +
                q(manual / "concat.json")),
            0);
  ASSERT_EQ(run("render --clip " + q(manual / "concat.json") + " --out " + q(manual / "frames")), 0);
  ASSERT_EQ(run("render --clip " + q(manual / "reference.json") + " --size 1024x576 --out " +
                q(manual / "reference_frames")),
            0);
  ASSERT_EQ(run("score --frames " + q(manual / "frames") + " --text '" + std::string(kText) +
                "' --reference-frame " + q(manual / "reference_frames" / "frame_0000.ppm") + " --out " +
                q(manual / "metrics.json")),
            0);

  auto expected = tree_hashes(whole);
  expected.erase("manifest.json");
  EXPECT_EQ(tree_hashes(manual), expected);
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("cli_codes");
  EXPECT_EQ(run("pipeline"), 2);
  write_file(out / "garbage.json", "not json");
  EXPECT_EQ(run("retarget --clip " + q(out / "garbage.json") + " --ref-keypoints " + q(out / "garbage.json") +
                " --out " + q(out / "x.json")),
            3);
  EXPECT_EQ(run("plan --text '   ' --out " + q(out / "plan.json")), 4);
  EXPECT_EQ(run("pipeline --text walk --mode external --out " + q(out / "ext")), 10);
}
#endif
