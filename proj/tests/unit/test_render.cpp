#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "motionrig/errors.hpp"
#include "motionrig/hashing.hpp"
#include "motionrig/render.hpp"

using namespace motionrig;
namespace fs = std::filesystem;

namespace {

const SkeletonTopology& body() { return *topologies::body18(); }

// Set of pixels within `r` of the segment (a, b); endpoints are pixel centers.
std::vector<std::pair<int, int>> segment_oracle(int w, int h, int ax, int ay, int bx, int by, int r) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = bx - ax, dy = by - ay;
      const double len2 = dx * dx + dy * dy;
      double t = len2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double px = ax + t * dx - x, py = ay + t * dy - y;
      if (px * px + py * py <= static_cast<double>(r) * r) out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> lit(const Image& img, Rgb bg) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (!(img.at(x, y) == bg)) out.emplace_back(x, y);
  return out;
}

KeypointFrame two_point_frame(std::size_t a, Vec2 pa, std::size_t b, Vec2 pb) {
  auto f = KeypointFrame::absent(18);
  f.positions[a] = pa;
  f.positions[b] = pb;
  f.confidence[a] = f.confidence[b] = 1.0;
  return f;
}

KeypointFrame random_frame(std::mt19937_64& rng, const SkeletonTopology& t) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto f = KeypointFrame::absent(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    f.positions[k] = {u(rng), u(rng)};
    f.confidence[k] = u(rng);
  }
  return f;
}

}  // namespace

TEST(Pixel, FloorAndClamp) {
  EXPECT_EQ(to_pixel(0.0, 100), 0);
  EXPECT_EQ(to_pixel(0.499, 100), 49);
  EXPECT_EQ(to_pixel(1.0, 100), 99);
  EXPECT_EQ(to_pixel(-0.3, 100), 0);
  EXPECT_EQ(to_pixel(7.0, 100), 99);
}

TEST(Bresenham, EndpointsAndConnectivity) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int x0 = rng() % 50, y0 = rng() % 50, x1 = rng() % 50, y1 = rng() % 50;
    const auto pts = bresenham_line(x0, y0, x1, y1);
    ASSERT_FALSE(pts.empty());
    EXPECT_EQ(pts.front(), std::make_pair(x0, y0));
    EXPECT_EQ(pts.back(), std::make_pair(x1, y1));
    EXPECT_EQ(pts.size(), static_cast<std::size_t>(std::max(std::abs(x1 - x0), std::abs(y1 - y0)) + 1));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_LE(std::abs(pts[i].first - pts[i - 1].first), 1);
      EXPECT_LE(std::abs(pts[i].second - pts[i - 1].second), 1);
    }
  }
}

TEST(RenderFrame, EmptyFrameIsBackground) {
  RenderStyle style;
  style.background = {10, 20, 30};
  const Image img = render_frame(KeypointFrame::absent(18), body(), style, {64, 48});
  EXPECT_EQ(img.width(), 48);
  EXPECT_EQ(img.height(), 64);
  EXPECT_EQ(img, Image(48, 64, style.background));
}

TEST(RenderFrame, Deterministic) {
  std::mt19937_64 rng(52);
  const auto f = random_frame(rng, *topologies::full());
  const FrameSize size{128, 72};
  EXPECT_EQ(encode_ppm(render_frame(f, *topologies::full(), RenderStyle{}, size)),
            encode_ppm(render_frame(f, *topologies::full(), RenderStyle{}, size)));
}

TEST(RenderFrame, AxisAlignedBoneMatchesDistanceOracle) {
  RenderStyle style;
  style.keypoint_radius = 2;  // within the bone's half width, so the union is the segment neighbourhood
  const int w = 40, h = 30;
  const std::size_t neck = body().require("neck"), nose = body().require("nose");
  struct Case {
    Vec2 a, b;
  };
  for (const auto& c : {Case{{0.2, 0.5}, {0.8, 0.5}}, Case{{0.5, 0.1}, {0.5, 0.9}}}) {
    const auto f = two_point_frame(neck, c.a, nose, c.b);
    const Image img = render_frame(f, body(), style, {h, w});
    const auto expected = segment_oracle(w, h, to_pixel(c.a.x, w), to_pixel(c.a.y, h), to_pixel(c.b.x, w),
                                         to_pixel(c.b.y, h), style.thickness / 2);
    EXPECT_EQ(lit(img, style.background), expected);
  }
}

TEST(RenderFrame, BelowThresholdNotDrawn) {
  RenderStyle style;
  const std::size_t neck = body().require("neck"), nose = body().require("nose");
  auto f = two_point_frame(neck, {0.2, 0.2}, nose, {0.7, 0.7});
  f.confidence[nose] = style.threshold;
  const Image img = render_frame(f, body(), style, {50, 50});
  const auto px = lit(img, style.background);
  // Only the neck disc remains.
  EXPECT_EQ(px, segment_oracle(50, 50, 10, 10, 10, 10, style.keypoint_radius));
}

TEST(RenderFrame, ThresholdMonotone) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_frame(rng, *topologies::full());
    RenderStyle lo, hi;
    lo.threshold = 0.2;
    hi.threshold = 0.6;
    auto a = lit(render_frame(f, *topologies::full(), lo, {96, 64}), lo.background);
    auto b = lit(render_frame(f, *topologies::full(), hi, {96, 64}), hi.background);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_TRUE(std::includes(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST(RenderStyle, Validation) {
  RenderStyle s;
  s.thickness = 0;
  EXPECT_THROW(validate_style(s), Error);
  s = RenderStyle{};
  s.threshold = 1.5;
  EXPECT_THROW(validate_style(s), Error);
  EXPECT_NO_THROW(validate_style(RenderStyle{}));
}

TEST(RenderClip, FilesNamingAndHashes) {
  std::mt19937_64 rng(54);
  std::vector<KeypointFrame> frames;
  for (int i = 0; i < 14; ++i) frames.push_back(random_frame(rng, body()));
  const MotionClip clip(topologies::body18(), frames, Fps{});
  const fs::path dir = fs::temp_directory_path() / "motionrig_render_test";
  fs::remove_all(dir);
  const auto a = render_clip(clip, RenderStyle{}, FrameSize{}, dir / "a");
  const auto b = render_clip(clip, RenderStyle{}, FrameSize{}, dir / "b");
  ASSERT_EQ(a.size(), 16u);
  EXPECT_EQ(a.front().filename(), "frame_0000.ppm");
  EXPECT_EQ(a[13].filename(), "frame_0013.ppm");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(sha256_file(a[i]), sha256_file(b[i]));
  const Image first = read_ppm(a.front());
  EXPECT_EQ(first.width(), 576);
  EXPECT_EQ(first.height(), 1024);
  const auto index = read_frame_index(dir / "a");
  EXPECT_EQ(index.frames.size(), 14u);
  EXPECT_EQ(index.size, (FrameSize{1024, 576}));
  fs::remove_all(dir);
}

TEST(Ppm, RoundTripAndGrayscale) {
  Image img(3, 2, {1, 2, 3});
  img.set(2, 1, {200, 100, 50});
  EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
  const std::string p5 = std::string("P5\n2 1\n255\n") + '\x10' + '\x20';
  const Image g = decode_ppm(p5);
  EXPECT_EQ(g.at(1, 0), (Rgb{0x20, 0x20, 0x20}));
  EXPECT_THROW(decode_ppm("P3\n1 1\n255\n0 0 0"), Error);
}
