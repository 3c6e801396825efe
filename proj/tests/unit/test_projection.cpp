#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "motionrig/errors.hpp"
#include "motionrig/projection.hpp"

using namespace motionrig;

namespace {

MotionClip3D single_joint_clip(std::vector<Vec3> frames_of_joint0) {
  std::vector<std::vector<Vec3>> frames;
  for (const auto& v : frames_of_joint0) {
    std::vector<Vec3> f(18, v);
    frames.push_back(f);
  }
  return MotionClip3D(std::move(frames), Fps{});
}

MotionClip3D random_clip(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<Vec3>> frames(n, std::vector<Vec3>(18));
  for (auto& f : frames)
    for (auto& v : f) v = {u(rng), u(rng), u(rng)};
  return MotionClip3D(std::move(frames), Fps{});
}

}  // namespace

TEST(Project, DropsZ) {
  ProjectionConfig cfg{false, std::nullopt};
  const auto clip = project(single_joint_clip({{1, 2, 3}}), cfg, topologies::body18());
  EXPECT_EQ(clip.frame(0).positions[0], (Vec2{1, 2}));
  EXPECT_EQ(clip.frame(0).confidence[0], 1.0);
}

TEST(Project, OriginStaysAtOrigin) {
  for (bool flip : {false, true}) {
    ProjectionConfig cfg{flip, std::nullopt};
    const auto clip = project(single_joint_clip({{0, 0, 7}}), cfg, topologies::body18());
    EXPECT_EQ(clip.frame(0).positions[0].x, 0.0);
    EXPECT_EQ(clip.frame(0).positions[0].y, 0.0);
  }
}

TEST(Project, UniformFitScale) {
  std::vector<std::vector<Vec3>> frames{std::vector<Vec3>(18, Vec3{0, 0, 0}), std::vector<Vec3>(18, Vec3{0, 0, 0})};
  frames[1][3] = {2, 4, 0};
  ProjectionConfig cfg{false, FitBox{0.5, 0.5, 0.25, 0.5}};
  const auto clip = project(MotionClip3D(frames, Fps{}), cfg, topologies::body18());
  // Union box [0,2]x[0,4]: scale min(0.5/2, 1/4) = 0.25, centered in the box.
  EXPECT_NEAR(clip.frame(1).positions[3].x, 0.75, 1e-15);
  EXPECT_NEAR(clip.frame(1).positions[3].y, 1.0, 1e-15);
  EXPECT_NEAR(clip.frame(0).positions[0].x, 0.25, 1e-15);
  EXPECT_NEAR(clip.frame(0).positions[0].y, 0.0, 1e-15);
}

TEST(Project, Errors) {
  try {
    project(MotionClip3D({}, Fps{}), {}, topologies::body18());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyClip);
  }
  try {
    project(MotionClip3D({std::vector<Vec3>(17)}, Fps{}), {}, topologies::body18());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::JointCountMismatch);
  }
}

TEST(Project, NonBodyKeypointsAbsentOnFullTopology) {
  const auto clip = project(single_joint_clip({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}}), {}, topologies::full());
  const auto& t = clip.topology();
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_EQ(clip.frame(0).present(k), t.group(k) == KeypointGroup::Body);
  }
}

TEST(Project, ZTranslationInvariant) {
  std::mt19937_64 rng(7);
  const auto a = random_clip(rng, 5);
  std::vector<std::vector<Vec3>> shifted(a.frames().begin(), a.frames().end());
  for (auto& f : shifted)
    for (auto& v : f) v.z += 3.25;
  EXPECT_EQ(project(a, {}, topologies::body18()), project(MotionClip3D(shifted, a.fps()), {}, topologies::body18()));
}

TEST(Project, StaysInsideFitBox) {
  std::mt19937_64 rng(11);
  const FitBox box{0.5, 0.5, 0.35, 0.4};
  for (int trial = 0; trial < 20; ++trial) {
    const auto clip = project(random_clip(rng, 8), ProjectionConfig{true, box}, topologies::body18());
    for (const auto& f : clip.frames()) {
      for (const auto& p : f.positions) {
        EXPECT_GE(p.x, box.cx - box.half_width - 1e-12);
        EXPECT_LE(p.x, box.cx + box.half_width + 1e-12);
        EXPECT_GE(p.y, box.cy - box.half_height - 1e-12);
        EXPECT_LE(p.y, box.cy + box.half_height + 1e-12);
      }
    }
  }
}

TEST(Project, RefitIsIdempotent) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto once = project(random_clip(rng, 6), {}, topologies::body18());
    std::vector<std::vector<Vec3>> lifted;
    for (const auto& f : once.frames()) {
      std::vector<Vec3> v;
      for (const auto& p : f.positions) v.push_back({p.x, p.y, 0.0});
      lifted.push_back(v);
    }
    const auto twice = project(MotionClip3D(lifted, once.fps()), ProjectionConfig{false, FitBox{}}, topologies::body18());
    for (std::size_t i = 0; i < once.size(); ++i) {
      for (std::size_t k = 0; k < 18; ++k) {
        EXPECT_NEAR(twice.frame(i).positions[k].x, once.frame(i).positions[k].x, 1e-12);
        EXPECT_NEAR(twice.frame(i).positions[k].y, once.frame(i).positions[k].y, 1e-12);
      }
    }
  }
}

TEST(Project, CollinearStaysCollinear) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 a{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    const double t1 = u(rng), t2 = u(rng);
    std::vector<Vec3> f(18, a);
    f[1] = {a.x + t1 * d.x, a.y + t1 * d.y, a.z + t1 * d.z};
    f[2] = {a.x + t2 * d.x, a.y + t2 * d.y, a.z + t2 * d.z};
    f[3] = {u(rng), u(rng), u(rng)};
    const auto clip = project(MotionClip3D({f}, Fps{}), {}, topologies::body18());
    const auto& p = clip.frame(0).positions;
    const double cross = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x);
    EXPECT_NEAR(cross, 0.0, 1e-12);
  }
}
