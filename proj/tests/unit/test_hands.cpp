#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "motionrig/errors.hpp"
#include "motionrig/hands.hpp"

using namespace motionrig;

namespace {

const SkeletonTopology& body() { return *topologies::body18(); }

KeypointFrame arm_frame(Vec2 elbow, Vec2 wrist) {
  auto f = KeypointFrame::absent(18);
  f.positions[1] = {0.5, 0.2};
  f.confidence[1] = 1.0;
  for (const char* side : {"right", "left"}) {
    const std::size_t e = body().require(std::string(side) + "_elbow");
    const std::size_t w = body().require(std::string(side) + "_wrist");
    const std::size_t s = body().require(std::string(side) + "_shoulder");
    f.positions[s] = {0.5, 0.25};
    f.positions[e] = elbow;
    f.positions[w] = wrist;
    f.confidence[s] = f.confidence[e] = f.confidence[w] = 1.0;
  }
  return f;
}

KeypointFrame random_frame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  auto f = KeypointFrame::absent(18);
  for (std::size_t k = 0; k < 18; ++k) {
    f.positions[k] = {u(rng), u(rng)};
    f.confidence[k] = 1.0;
  }
  return f;
}

HandTemplate tip_template() {
  HandTemplate t = HandTemplate::named("default");
  t.offsets[8] = {0.5, 0.0};
  return t;
}

class FakeAdapter final : public HandAdapter {
 public:
  std::function<MotionClip(const MotionClip&)> respond;
  MotionClip complete(const MotionClip& clip, const KeypointFrame&, const SkeletonTopology&) override {
    return respond(clip);
  }
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

TEST(HandTemplate, Invariants) {
  for (const char* name : {"default", "relaxed-open"}) {
    const auto t = HandTemplate::named(name);
    EXPECT_EQ(t.offsets[0], (Vec2{0, 0}));
    for (const auto& o : t.offsets) EXPECT_LE(norm(o), 1.2);
  }
  EXPECT_THROW(HandTemplate::named("fist"), Error);
}

TEST(TemplateCompletion, AlongForearm) {
  const MotionClip clip(topologies::body18(), {arm_frame({0, 0}, {0.1, 0})}, Fps{});
  const auto done = complete_hands_template(clip, tip_template());
  const auto& t = done.clip.topology();
  const Vec2 tip = done.clip.frame(0).positions[t.require("right_hand_8")];
  EXPECT_NEAR(tip.x, 0.15, 1e-15);
  EXPECT_NEAR(tip.y, 0.0, 1e-15);
  EXPECT_EQ(done.clip.frame(0).confidence[t.require("right_hand_8")], kTemplateHandConfidence);
}

TEST(TemplateCompletion, RotatedForearm) {
  const MotionClip clip(topologies::body18(), {arm_frame({0, 0}, {0, 0.1})}, Fps{});
  const auto done = complete_hands_template(clip, tip_template());
  const Vec2 tip = done.clip.frame(0).positions[done.clip.topology().require("right_hand_8")];
  EXPECT_NEAR(tip.x, 0.0, 1e-15);
  EXPECT_NEAR(tip.y, 0.15, 1e-15);
}

TEST(TemplateCompletion, LeftHandMirrorsAcross) {
  HandTemplate t = HandTemplate::named("default");
  t.offsets[4] = {0.2, 0.3};
  const MotionClip clip(topologies::body18(), {arm_frame({0.2, 0.2}, {0.3, 0.2})}, Fps{});
  const auto done = complete_hands_template(clip, t);
  const auto& topo = done.clip.topology();
  const Vec2 r = done.clip.frame(0).positions[topo.require("right_hand_4")];
  const Vec2 l = done.clip.frame(0).positions[topo.require("left_hand_4")];
  EXPECT_NEAR(r.x, l.x, 1e-15);
  EXPECT_NEAR(r.y - 0.2, -(l.y - 0.2), 1e-15);
}

TEST(TemplateCompletion, AbsentElbowLeavesHandAbsent) {
  auto f = arm_frame({0, 0}, {0.1, 0});
  f.confidence[body().require("left_elbow")] = 0.0;
  const MotionClip clip(topologies::body18(), {f}, Fps{});
  const auto done = complete_hands_template(clip, HandTemplate::named("default"));
  const auto& t = done.clip.topology();
  for (std::size_t k : t.indices_of(KeypointGroup::HandLeft)) EXPECT_FALSE(done.clip.frame(0).present(k));
  for (std::size_t k : t.indices_of(KeypointGroup::HandRight)) EXPECT_TRUE(done.clip.frame(0).present(k));
  ASSERT_EQ(done.missing.size(), 1u);
  EXPECT_EQ(done.missing[0].hand, Hand::Left);
  EXPECT_EQ(done.missing[0].frame, 0u);
}

TEST(TemplateCompletion, BodyUntouchedAndHandRigid) {
  std::mt19937_64 rng(21);
  std::vector<KeypointFrame> frames;
  for (int i = 0; i < 30; ++i) frames.push_back(random_frame(rng));
  const MotionClip clip(topologies::body18(), frames, Fps{});
  const auto done = complete_hands_template(clip, HandTemplate::named("relaxed-open"));
  const auto& t = done.clip.topology();
  ASSERT_EQ(t.name(), "body18_hands");
  const auto hand = t.indices_of(KeypointGroup::HandRight);
  const std::size_t e = t.require("right_elbow"), w = t.require("right_wrist");
  std::vector<double> first;
  for (std::size_t i = 0; i < clip.size(); ++i) {
    const auto& in = clip.frame(i);
    const auto& out = done.clip.frame(i);
    for (std::size_t k = 0; k < 18; ++k) {
      EXPECT_EQ(out.positions[k], in.positions[k]);
      EXPECT_EQ(out.confidence[k], in.confidence[k]);
    }
    EXPECT_NEAR(out.positions[hand[0]].x, out.positions[w].x, 1e-12);
    EXPECT_NEAR(out.positions[hand[0]].y, out.positions[w].y, 1e-12);
    const double forearm = distance(out.positions[e], out.positions[w]);
    std::vector<double> d;
    for (std::size_t a = 0; a < hand.size(); ++a)
      for (std::size_t b = a + 1; b < hand.size(); ++b)
        d.push_back(distance(out.positions[hand[a]], out.positions[hand[b]]) / forearm);
    if (first.empty()) first = d;
    for (std::size_t j = 0; j < d.size(); ++j) EXPECT_NEAR(d[j], first[j], 1e-9);
  }
}

TEST(ExternalCompletion, EchoOfTemplateIsAccepted) {
  std::mt19937_64 rng(22);
  const MotionClip clip(topologies::body18(), {random_frame(rng), random_frame(rng)}, Fps{});
  FakeAdapter adapter;
  adapter.respond = [](const MotionClip& c) { return complete_hands_template(c, HandTemplate::named("default")).clip; };
  const auto ref = random_frame(rng);
  EXPECT_EQ(complete_hands_external(clip, ref, body(), adapter),
            complete_hands_template(clip, HandTemplate::named("default")).clip);
}

TEST(ExternalCompletion, FrameCountMismatchRejected) {
  std::mt19937_64 rng(23);
  std::vector<KeypointFrame> frames;
  for (int i = 0; i < 14; ++i) frames.push_back(random_frame(rng));
  const MotionClip clip(topologies::body18(), frames, Fps{});
  FakeAdapter adapter;
  adapter.respond = [](const MotionClip& c) {
    auto full = complete_hands_template(c, HandTemplate::named("default")).clip;
    std::vector<KeypointFrame> f(full.frames().begin(), full.frames().end() - 1);
    return MotionClip(full.topology_ptr(), f, full.fps());
  };
  EXPECT_EQ(code_of([&] { complete_hands_external(clip, frames[0], body(), adapter); }), Errc::ContractViolation);
}

TEST(ExternalCompletion, BodyDriftRejected) {
  std::mt19937_64 rng(24);
  const MotionClip clip(topologies::body18(), {random_frame(rng)}, Fps{});
  FakeAdapter adapter;
  adapter.respond = [](const MotionClip& c) {
    auto full = complete_hands_template(c, HandTemplate::named("default")).clip;
    std::vector<KeypointFrame> f(full.frames().begin(), full.frames().end());
    f[0].positions[f[0].positions.size() > 2 ? 2 : 0].x += 0.2;
    return MotionClip(full.topology_ptr(), f, full.fps());
  };
  EXPECT_EQ(code_of([&] { complete_hands_external(clip, clip.frame(0), body(), adapter); }), Errc::ContractViolation);
}

TEST(ExternalCompletion, SmallDriftTolerated) {
  std::mt19937_64 rng(25);
  const MotionClip clip(topologies::body18(), {random_frame(rng)}, Fps{});
  auto full = complete_hands_template(clip, HandTemplate::named("default")).clip;
  std::vector<KeypointFrame> f(full.frames().begin(), full.frames().end());
  f[0].positions[2].x += 0.005;
  EXPECT_NO_THROW(validate_adapter_response(clip, MotionClip(full.topology_ptr(), f, full.fps())));
}

TEST(ExternalCompletion, ResponseWithoutHandsRejected) {
  std::mt19937_64 rng(26);
  const MotionClip clip(topologies::body18(), {random_frame(rng)}, Fps{});
  EXPECT_EQ(code_of([&] { validate_adapter_response(clip, clip); }), Errc::ContractViolation);
}

TEST(ExternalCompletion, FpsMismatchRejected) {
  std::mt19937_64 rng(27);
  const MotionClip clip(topologies::body18(), {random_frame(rng)}, Fps{20, 1});
  auto full = complete_hands_template(clip, HandTemplate::named("default")).clip;
  const MotionClip other(full.topology_ptr(), {full.frame(0)}, Fps{25, 1});
  EXPECT_EQ(code_of([&] { validate_adapter_response(clip, other); }), Errc::ContractViolation);
}
