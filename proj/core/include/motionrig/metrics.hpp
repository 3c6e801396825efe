#pragma once

/// \file metrics.hpp
/// \brief MotionScore over pluggable describer / embedder providers, and the
/// classical frame metrics PSNR and SSIM.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionrig/image.hpp"
#include "motionrig/skeleton.hpp"

namespace motionrig {

using Embedding = std::vector<double>;

/// u.v / (|u| |v|). Throws `Error(DimensionMismatch)` or `Error(ZeroVector)`.
double cosine(std::span<const double> u, std::span<const double> v);

/// Maps texts to vectors. One call embeds a batch; all vectors of a batch
/// share one dimension and equal texts get equal vectors.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;
  virtual std::string name() const = 0;
};

/// Lowercased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Offline fallback: raw term-frequency vectors over the sorted union
/// vocabulary of the batch.
class BagOfWordsEmbedder final : public EmbeddingProvider {
 public:
  std::vector<Embedding> embed(std::span<const std::string> texts) override;
  std::string name() const override { return "bag-of-words"; }
};

/// A rendered video on disk: the frame files in order plus, when available,
/// the pose clip they were rendered from.
struct VideoRef {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> frames;
  std::optional<MotionClip> poses;
};

/// Loads a frames directory written by `render_clip`.
VideoRef load_video(const std::filesystem::path& dir);

/// Produces a text description of the motion in a video.
class DescriptionProvider {
 public:
  virtual ~DescriptionProvider() = default;
  virtual std::string describe(const VideoRef& video) = 0;
  virtual std::string name() const = 0;
};

/// Replays recorded descriptions keyed by the video directory's file name.
/// A "*" entry matches any video.
class ReplayDescriber final : public DescriptionProvider {
 public:
  explicit ReplayDescriber(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}
  /// Fixture: {"entries": [{"video": "...", "description": "..."}, ...]}.
  static ReplayDescriber from_fixture(std::string_view bytes);

  std::string describe(const VideoRef& video) override;
  std::string name() const override { return "replay"; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Offline describer reading the video's pose track: reports whole-body
/// travel, vertical bouncing and the most active limbs in a short sentence.
/// Requires `VideoRef::poses`.
class PoseHeuristicDescriber final : public DescriptionProvider {
 public:
  std::string describe(const VideoRef& video) override;
  std::string name() const override { return "pose-heuristic"; }
};

/// Prompt sent to describer services.
inline constexpr std::string_view kDescribePrompt = "Describe the motion in the video.";

std::unique_ptr<DescriptionProvider> make_http_describer(const std::string& endpoint = {}, int max_in_flight = 4);
std::unique_ptr<EmbeddingProvider> make_http_embedder(const std::string& endpoint = {}, int max_in_flight = 4);

/// cosine(embed(describe(video)), embed(motion_text)). Provider errors are
/// rethrown with the provider name prepended.
double motion_score(const VideoRef& video, std::string_view motion_text, DescriptionProvider& describer,
                    EmbeddingProvider& embedder);

/// Returned by `psnr` for identical images.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(255^2 / MSE) over all channels; `kPsnrCap` when MSE is zero.
double psnr(const Image& a, const Image& b);

/// ITU-R BT.601 luma, 0.299 R + 0.587 G + 0.114 B, unrounded.
std::vector<double> to_luma(const Image& image);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

struct SsimComponents {
  double ssim = 0.0;
  double luminance = 0.0;          ///< mean (2 mu_a mu_b + C1) / (mu_a^2 + mu_b^2 + C1)
  double contrast_structure = 0.0; ///< mean (2 s_ab + C2) / (s_a^2 + s_b^2 + C2)
};

/// Mean SSIM over every fully contained 11x11 window of the luma images,
/// C1 = (0.01 * 255)^2, C2 = (0.03 * 255)^2. Throws
/// `Error(DimensionMismatch)` or `Error(ImageTooSmall)`.
SsimComponents ssim_components(const Image& a, const Image& b);
double ssim(const Image& a, const Image& b);

/// Table columns of a metrics report, in order.
inline constexpr std::array<std::string_view, 8> kReportColumns = {
    "video", "PSNR", "SSIM", "LPIPS", "DreamSim", "FID", "FVD", "MotionScore"};

struct MetricsRow {
  std::string video;
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<double> motion_score;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  /// Provider identities and other run metadata.
  std::map<std::string, std::string> metadata;
  std::vector<std::size_t> sampled_frames;
};

/// JSON table; neural-metric columns are emitted as "external".
std::string write_metrics_report(const MetricsReport& report);

/// Deterministic choice of min(count, frame_count) distinct frame indices,
/// returned sorted.
std::vector<std::size_t> sample_frames(std::size_t frame_count, std::size_t count, std::uint64_t seed);

struct ScoreOptions {
  std::size_t sample_count = 10;
  std::uint64_t seed = 0;
};

/// Averages PSNR / SSIM of sampled frames against `reference` (when given)
/// and computes MotionScore (when both providers are given).
MetricsReport score_video(const VideoRef& video, std::string_view motion_text, const Image* reference,
                          DescriptionProvider* describer, EmbeddingProvider* embedder,
                          const ScoreOptions& options = {});

}  // namespace motionrig
