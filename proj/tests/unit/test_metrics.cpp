#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "motionrig/errors.hpp"
#include "motionrig/metrics.hpp"
#include "motionrig/pose_io.hpp"

using namespace motionrig;

namespace {

Image pattern(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>((x * 16 + y * 3) % 256),
                     static_cast<std::uint8_t>(rng() % 64)});
  return img;
}

// Direct windowed SSIM: full 2D Gaussian weights, explicit centered moments.
double ssim_oracle(const Image& a, const Image& b) {
  const int n = 11;
  const double sigma = 1.5;
  double w[11][11];
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
      total += w[i][j];
    }
  for (auto& row : w)
    for (double& v : row) v /= total;
  auto luma = [](Rgb c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; };
  const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
  double sum = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + n <= a.height(); ++y0) {
    for (int x0 = 0; x0 + n <= a.width(); ++x0) {
      double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          ma += w[i][j] * luma(a.at(x0 + j, y0 + i));
          mb += w[i][j] * luma(b.at(x0 + j, y0 + i));
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double da = luma(a.at(x0 + j, y0 + i)) - ma, db = luma(b.at(x0 + j, y0 + i)) - mb;
          va += w[i][j] * da * da;
          vb += w[i][j] * db * db;
          cov += w[i][j] * da * db;
        }
      sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return sum / count;
}

class FixedDescriber final : public DescriptionProvider {
 public:
  explicit FixedDescriber(std::string text) : text_(std::move(text)) {}
  std::string describe(const VideoRef&) override { return text_; }
  std::string name() const override { return "fixed"; }

 private:
  std::string text_;
};

class FailingDescriber final : public DescriptionProvider {
 public:
  std::string describe(const VideoRef&) override { throw Error(Errc::ServiceUnreachable, "connection refused"); }
  std::string name() const override { return "flaky-describer"; }
};

class RecordedEmbedder final : public EmbeddingProvider {
 public:
  explicit RecordedEmbedder(std::map<std::string, Embedding> v) : vectors_(std::move(v)) {}
  std::vector<Embedding> embed(std::span<const std::string> texts) override {
    std::vector<Embedding> out;
    for (const auto& t : texts) out.push_back(vectors_.at(t));
    return out;
  }
  std::string name() const override { return "recorded"; }

 private:
  std::map<std::string, Embedding> vectors_;
};

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Cosine, Examples) {
  const std::vector<double> u{1, 2}, v{2, 1}, x{1, 0}, y{0, 1};
  EXPECT_DOUBLE_EQ(cosine(u, u), 1.0);
  EXPECT_EQ(cosine(x, y), 0.0);
  EXPECT_NEAR(cosine(u, v), 0.8, 1e-15);
}

TEST(Cosine, Errors) {
  const std::vector<double> z{0, 0}, u{1, 2}, w{1, 2, 3};
  EXPECT_EQ(code_of([&] { cosine(z, u); }), Errc::ZeroVector);
  EXPECT_EQ(code_of([&] { cosine(u, w); }), Errc::DimensionMismatch);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u(8), v(8), su(8);
    const double alpha = 0.01 + 10 * std::abs(d(rng));
    for (int i = 0; i < 8; ++i) {
      u[i] = d(rng);
      v[i] = d(rng);
      su[i] = alpha * u[i];
    }
    EXPECT_NEAR(cosine(u, v), cosine(v, u), 1e-12);
    EXPECT_NEAR(cosine(su, v), cosine(u, v), 1e-12);
    EXPECT_LE(std::abs(cosine(u, v)), 1.0);
  }
}

TEST(BagOfWords, UnionVocabulary) {
  BagOfWordsEmbedder e;
  const std::vector<std::string> texts{"Walk, walk!", "wave walk"};
  const auto v = e.embed(texts);
  // Vocabulary: [walk, wave]
  EXPECT_EQ(v[0], (Embedding{2, 0}));
  EXPECT_EQ(v[1], (Embedding{1, 1}));
  EXPECT_EQ(tokenize("A-man's JUMP"), (std::vector<std::string>{"a", "man", "s", "jump"}));
}

TEST(MotionScore, VerbatimDescriberScoresOne) {
  const std::string text = "a person walks forward then waves";
  FixedDescriber describer(text);
  BagOfWordsEmbedder embedder;
  EXPECT_DOUBLE_EQ(motion_score(VideoRef{}, text, describer, embedder), 1.0);
}

TEST(MotionScore, DisjointVocabularyScoresZero) {
  FixedDescriber describer("someone jumps high");
  BagOfWordsEmbedder embedder;
  EXPECT_EQ(motion_score(VideoRef{}, "a man waves slowly", describer, embedder), 0.0);
}

TEST(MotionScore, RecordedTranscriptsMatchOfflineCosine) {
  const auto emb = nlohmann::json::parse(read_file(MOTIONRIG_FIXTURES "/embedder_transcript.json"));
  std::map<std::string, Embedding> vectors;
  for (const auto& [k, v] : emb.at("vectors").items()) vectors[k] = v.get<Embedding>();
  RecordedEmbedder embedder(vectors);
  auto describer = ReplayDescriber::from_fixture(read_file(MOTIONRIG_FIXTURES "/describer_transcript.json"));
  VideoRef video;
  video.dir = "runs/walk_wave";
  const std::string text = emb.at("motion_text");
  const double score = motion_score(video, text, describer, embedder);

  const auto& a = vectors.at(emb.at("description").get<std::string>());
  const auto& b = vectors.at(text);
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  EXPECT_NEAR(score, ab / std::sqrt(aa * bb), 1e-12);
  EXPECT_EQ(score, motion_score(video, text, describer, embedder));
}

TEST(MotionScore, ProviderErrorsCarryProvenance) {
  FailingDescriber describer;
  BagOfWordsEmbedder embedder;
  try {
    motion_score(VideoRef{}, "walk", describer, embedder);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ServiceUnreachable);
    EXPECT_NE(std::string(e.what()).find("flaky-describer"), std::string::npos);
  }
}

TEST(ReplayDescriber, WildcardAndMissing) {
  auto d = ReplayDescriber::from_fixture(R"({"entries": [{"video": "*", "description": "spins"}]})");
  VideoRef v;
  v.dir = "anything";
  EXPECT_EQ(d.describe(v), "spins");
  ReplayDescriber none({});
  EXPECT_THROW(none.describe(v), Error);
}

TEST(Psnr, CapAndExamples) {
  const Image a = pattern(8, 8, 1);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
  EXPECT_NEAR(psnr(Image(4, 4, {0, 0, 0}), Image(4, 4, {255, 255, 255})), 0.0, 1e-12);
  const double db = psnr(Image(1, 1, {100, 100, 100}), Image(1, 1, {116, 116, 116}));
  EXPECT_NEAR(db, 10 * std::log10(255.0 * 255.0 / 256.0), 1e-12);
  EXPECT_NEAR(db, 24.05, 0.01);
  EXPECT_EQ(code_of([] { psnr(Image(2, 2), Image(3, 2)); }), Errc::DimensionMismatch);
}

TEST(Psnr, Symmetric) {
  const Image a = pattern(9, 7, 2), b = pattern(9, 7, 3);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
}

TEST(Ssim, IdenticalIsExactlyOne) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Image a = pattern(16 + static_cast<int>(s), 20, s);
    EXPECT_EQ(ssim(a, a), 1.0);
  }
}

TEST(Ssim, ConstantShiftDecomposition) {
  const auto c = ssim_components(Image(16, 16, {80, 80, 80}), Image(16, 16, {120, 120, 120}));
  EXPECT_LT(c.luminance, 1.0);
  EXPECT_NEAR(c.contrast_structure, 1.0, 1e-12);
}

TEST(Ssim, MatchesWindowedOracle) {
  for (std::uint64_t s = 10; s < 20; ++s) {
    const Image a = pattern(16, 16, s), b = pattern(16, 16, s + 100);
    EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-9);
    EXPECT_EQ(ssim(a, b), ssim(b, a));
  }
}

TEST(Ssim, Errors) {
  EXPECT_EQ(code_of([] { ssim(Image(10, 10), Image(10, 10)); }), Errc::ImageTooSmall);
  EXPECT_EQ(code_of([] { ssim(Image(12, 12), Image(12, 13)); }), Errc::DimensionMismatch);
}

TEST(SampleFrames, DeterministicDistinctSorted) {
  const auto a = sample_frames(100, 10, 7);
  EXPECT_EQ(a, sample_frames(100, 10, 7));
  EXPECT_EQ(a.size(), 10u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(sample_frames(4, 10, 0), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Report, ColumnsAndExternalMarkers) {
  MetricsReport r;
  r.rows.push_back({"clip", 20.5, 0.75, 0.5});
  r.metadata["embedder"] = "bag-of-words";
  const auto doc = nlohmann::json::parse(write_metrics_report(r));
  EXPECT_EQ(doc["columns"], (std::vector<std::string>{"video", "PSNR", "SSIM", "LPIPS", "DreamSim", "FID", "FVD",
                                                      "MotionScore"}));
  EXPECT_EQ(doc["rows"][0][3], "external");
  EXPECT_EQ(doc["rows"][0][6], "external");
  EXPECT_EQ(doc["rows"][0][7], 0.5);
  EXPECT_EQ(doc["metadata"]["embedder"], "bag-of-words");
}
