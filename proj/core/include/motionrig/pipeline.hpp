#pragma once

/// \file pipeline.hpp
/// \brief File-to-file pipeline stages and the end-to-end orchestrator.
///
/// Every stage reads its inputs from files and writes canonical bytes, so a
/// run composed stage by stage produces the same artifacts as `run_pipeline`.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionrig/alignment.hpp"
#include "motionrig/errors.hpp"
#include "motionrig/hands.hpp"
#include "motionrig/metrics.hpp"
#include "motionrig/planner.hpp"
#include "motionrig/pose_io.hpp"
#include "motionrig/projection.hpp"
#include "motionrig/render.hpp"
#include "motionrig/services.hpp"

namespace motionrig {

/// Submits a skeleton clip plus reference to a pose-guided video generator.
class VideoGenerator {
 public:
  virtual ~VideoGenerator() = default;
  /// Returns an opaque id of the generated video.
  virtual std::string generate(const MotionClip& skeleton, const ReferencePose& reference) = 0;
};

/// Extracts the pose track of a generated video.
class PoseExtractor {
 public:
  virtual ~PoseExtractor() = default;
  virtual MotionClip extract(const std::string& video_id) = 0;
};

std::unique_ptr<VideoGenerator> make_http_video_generator(const std::string& endpoint = {});
std::unique_ptr<PoseExtractor> make_http_pose_extractor(const std::string& endpoint = {});

enum class HandMode { Template, External };

/// "template" or "external"; throws `Error(InvalidArgument)`.
HandMode parse_hand_mode(std::string_view text);

/// Parses "HxW:HxW" (frame, then reference). Throws `Error(InvalidArgument)`.
FrameGeometry parse_geometry(std::string_view text);

/// Providers used by a run. Null members are either unavailable (llm,
/// adapter, generator, extractor) or replaced by offline fallbacks
/// (describer, embedder).
struct PipelineServices {
  std::shared_ptr<LlmClient> llm;
  std::shared_ptr<HandAdapter> adapter;
  std::shared_ptr<VideoGenerator> generator;
  std::shared_ptr<PoseExtractor> extractor;
  std::shared_ptr<DescriptionProvider> describer;
  std::shared_ptr<EmbeddingProvider> embedder;

  /// HTTP clients for every configured endpoint.
  static PipelineServices from_endpoints(const ServiceEndpoints& endpoints);
};

struct PipelineConfig {
  std::string text;
  /// Reference skeleton (pose clip or detector JSON); empty selects the
  /// built-in reference.
  std::filesystem::path reference;
  /// One 3D clip per segment; empty selects the synthetic generator.
  std::vector<std::filesystem::path> motion3d;
  std::filesystem::path out;
  FrameGeometry geometry;
  ProjectionConfig projection;
  AlignOptions align;
  BoundaryPolicy boundary;
  RenderStyle style;
  HandMode hand_mode = HandMode::Template;
  std::string hand_template = "default";
  int refine = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::size_t synthetic_frames = 40;
  ScoreOptions score;

  /// Throws `Error(InvalidArgument)` for a negative refine count, jobs < 1,
  /// bad geometry or empty text, and `Error(Io)` for missing input files.
  void validate() const;
};

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct StageRecord {
  std::string stage;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

struct Manifest {
  std::vector<StageRecord> stages;
  std::vector<std::string> notices;
};

/// Canonical JSON; paths inside the output tree are relative to it.
std::string write_manifest(const Manifest& manifest, const PipelineConfig& config);

struct PipelineResult {
  Manifest manifest;
  std::filesystem::path final_clip;
};

/// A stage failure: the wrapped error's code plus the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), "stage '" + stage + "' failed: " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Process exit code for a failure in `stage`, or for `code` when it names
/// an input or service problem regardless of stage. See docs/cli.md.
int exit_code_for(std::string_view stage, Errc code);

/// Diagnostic sink; defaults to standard error.
using NoticeSink = std::function<void(const std::string&)>;

/// Runs every stage into `config.out`. Artifacts written before a failure are
/// kept; the failure surfaces as `StageError`.
PipelineResult run_pipeline(const PipelineConfig& config, PipelineServices services, NoticeSink notice = {});

namespace stages {

/// Segment directory name, "seg_00" style.
std::string segment_dir(std::size_t index);

MotionPlan plan(std::string_view text, LlmClient* llm, const std::filesystem::path& out);
void synth(std::string_view text, std::uint64_t seed, std::size_t frames, const std::filesystem::path& out);
void reference(const std::filesystem::path& input, FrameSize default_size, const std::filesystem::path& out);
void project(const std::filesystem::path& motion3d, const ProjectionConfig& config, FrameSize size,
             const std::filesystem::path& out);
/// Writes the aligned clip to `out_clip` and the fitted parameters to `out_params`.
void align(const std::filesystem::path& clip, const std::filesystem::path& reference, const FrameGeometry& geometry,
           const AlignOptions& options, const std::filesystem::path& out_clip,
           const std::filesystem::path& out_params);
void retarget(const std::filesystem::path& clip, const std::filesystem::path& reference,
              const std::filesystem::path& out);
/// Template mode ignores `adapter`; external mode requires it.
void hands(const std::filesystem::path& clip, const std::filesystem::path& reference, HandMode mode,
           std::string_view hand_template, HandAdapter* adapter, const std::filesystem::path& out);
void concat(const std::vector<std::filesystem::path>& clips, const std::filesystem::path& reference,
            const BoundaryPolicy& policy, const std::filesystem::path& out);
/// One generate + extract round trip of the refinement loop.
void refine(const std::filesystem::path& clip, const std::filesystem::path& reference, VideoGenerator& generator,
            PoseExtractor& extractor, const std::filesystem::path& out);
std::vector<std::filesystem::path> render(const std::filesystem::path& clip, const RenderStyle& style,
                                          std::optional<FrameSize> size, const std::filesystem::path& out_dir);
/// `reference_frame` may be empty (PSNR / SSIM omitted). Null providers
/// fall back to the pose-heuristic describer and the bag-of-words embedder.
void score(const std::filesystem::path& frames_dir, std::string_view text,
           const std::filesystem::path& reference_frame, DescriptionProvider* describer,
           EmbeddingProvider* embedder, const ScoreOptions& options, const std::filesystem::path& out);

}  // namespace stages

}  // namespace motionrig
