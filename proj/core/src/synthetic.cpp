#include "motionrig/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "motionrig/hands.hpp"
#include "motionrig/metrics.hpp"

namespace motionrig::synthetic {
namespace {

enum J : std::size_t {
  Nose, Neck, RShoulder, RElbow, RWrist, LShoulder, LElbow, LWrist, RHip, RKnee, RAnkle,
  LHip, LKnee, LAnkle, REye, LEye, REar, LEar
};

using Pose = std::array<Vec3, topologies::kBodyCount>;

// Facing the camera (+z), so the subject's right side is at negative x.
constexpr Pose kRest = {{
    {0.0, 1.60, 0.08},     {0.0, 1.45, 0.0},     {-0.18, 1.42, 0.0},  {-0.22, 1.15, 0.0},
    {-0.24, 0.90, 0.0},    {0.18, 1.42, 0.0},    {0.22, 1.15, 0.0},   {0.24, 0.90, 0.0},
    {-0.10, 0.95, 0.0},    {-0.11, 0.52, 0.0},   {-0.12, 0.08, 0.0},  {0.10, 0.95, 0.0},
    {0.11, 0.52, 0.0},     {0.12, 0.08, 0.0},    {-0.035, 1.64, 0.07}, {0.035, 1.64, 0.07},
    {-0.075, 1.62, 0.0},   {0.075, 1.62, 0.0},
}};

constexpr double kPi = std::numbers::pi;

// Uniform [0, 1) from raw engine output; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void shift(Pose& p, std::initializer_list<J> joints, Vec3 d) {
  for (J j : joints) {
    p[j].x += d.x;
    p[j].y += d.y;
    p[j].z += d.z;
  }
}

void shift_all(Pose& p, Vec3 d) {
  for (auto& v : p) {
    v.x += d.x;
    v.y += d.y;
    v.z += d.z;
  }
}

bool has(const std::vector<std::string>& tokens, std::initializer_list<std::string_view> words) {
  for (const auto& t : tokens) {
    for (auto w : words) {
      if (t.rfind(w, 0) == 0) return true;
    }
  }
  return false;
}

// Rotates an arm (elbow, wrist) about its shoulder in the image plane.
void swing_arm(Pose& p, J shoulder, J elbow, J wrist, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (J j : {elbow, wrist}) {
    const double dx = p[j].x - p[shoulder].x, dy = p[j].y - p[shoulder].y;
    p[j].x = p[shoulder].x + c * dx - s * dy;
    p[j].y = p[shoulder].y + s * dx + c * dy;
  }
}

}  // namespace

std::uint64_t segment_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MotionClip3D generate_motion(std::string_view text, std::uint64_t seed, std::size_t frames, Fps fps) {
  const auto tokens = tokenize(text);
  std::mt19937_64 rng(seed);
  const double amp = 0.9 + 0.2 * unit(rng);
  const double phase = 2.0 * kPi * unit(rng);
  const double tempo = 0.9 + 0.2 * unit(rng);

  const bool walk = has(tokens, {"walk", "step", "stroll", "march"});
  const bool run = has(tokens, {"run", "jog", "sprint"});
  const bool jump = has(tokens, {"jump", "hop", "leap"});
  const bool wave = has(tokens, {"wave", "waving", "greet"});
  const bool raise = has(tokens, {"raise", "lift", "cheer"});
  const bool squat = has(tokens, {"squat", "crouch", "sit", "bend"});
  const bool kick = has(tokens, {"kick"});
  const bool turn = has(tokens, {"turn", "spin", "rotate"});
  const bool left = has(tokens, {"left"});
  const bool idle = !(walk || run || jump || wave || raise || squat || kick || turn);

  const double seconds_per_frame = 1.0 / fps.value();
  std::vector<std::vector<Vec3>> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double u = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0.0;
    const double t = static_cast<double>(f) * seconds_per_frame * tempo;
    const double env = std::sin(kPi * u) * std::sin(kPi * u);  // 0 at both ends
    Pose p = kRest;

    if (walk || run) {
      const double cadence = run ? 2.6 : 1.6;
      const double lift = (run ? 0.22 : 0.12) * amp * env;
      const double s = std::sin(2.0 * kPi * cadence * t + phase);
      shift(p, {LKnee}, {0.0, lift * std::max(0.0, s), 0.0});
      shift(p, {LAnkle}, {0.0, 1.6 * lift * std::max(0.0, s), 0.0});
      shift(p, {RKnee}, {0.0, lift * std::max(0.0, -s), 0.0});
      shift(p, {RAnkle}, {0.0, 1.6 * lift * std::max(0.0, -s), 0.0});
      swing_arm(p, LShoulder, LElbow, LWrist, (run ? 0.6 : 0.3) * amp * env * s);
      swing_arm(p, RShoulder, RElbow, RWrist, (run ? 0.6 : 0.3) * amp * env * s);
      const double dir = left ? -1.0 : 1.0;
      shift_all(p, {dir * (run ? 0.9 : 0.45) * amp * (u - 0.5), 0.03 * env * std::abs(s), 0.0});
    }
    if (jump) {
      const double s = std::sin(2.0 * kPi * 1.2 * t + phase);
      const double crouch = 0.12 * amp * env * std::max(0.0, -s);
      const double air = 0.30 * amp * env * std::max(0.0, s);
      shift(p, {Nose, Neck, RShoulder, RElbow, RWrist, LShoulder, LElbow, LWrist, RHip, LHip, REye, LEye, REar, LEar},
            {0.0, -crouch, 0.0});
      shift(p, {RKnee, LKnee}, {0.0, -0.5 * crouch, 0.0});
      shift_all(p, {0.0, air, 0.0});
      swing_arm(p, LShoulder, LElbow, LWrist, 1.2 * amp * env * std::max(0.0, s));
      swing_arm(p, RShoulder, RElbow, RWrist, -1.2 * amp * env * std::max(0.0, s));
    }
    if (wave) {
      const bool use_left = left;
      const J shoulder = use_left ? LShoulder : RShoulder;
      const J elbow = use_left ? LElbow : RElbow;
      const J wrist = use_left ? LWrist : RWrist;
      const double side = use_left ? 1.0 : -1.0;
      // Upper arm out to the side, forearm up, oscillating about the elbow.
      const Vec3 raised_elbow{p[shoulder].x + side * 0.26, p[shoulder].y + 0.02, 0.0};
      const double a = 0.45 * amp * std::sin(2.0 * kPi * 1.5 * t + phase);
      const Vec3 raised_wrist{raised_elbow.x + side * 0.25 * std::sin(a), raised_elbow.y + 0.25 * std::cos(a), 0.0};
      p[elbow] = {p[elbow].x + env * (raised_elbow.x - p[elbow].x), p[elbow].y + env * (raised_elbow.y - p[elbow].y), 0.0};
      p[wrist] = {p[wrist].x + env * (raised_wrist.x - p[wrist].x), p[wrist].y + env * (raised_wrist.y - p[wrist].y), 0.0};
    }
    if (raise) {
      swing_arm(p, LShoulder, LElbow, LWrist, 2.6 * amp * env);
      swing_arm(p, RShoulder, RElbow, RWrist, -2.6 * amp * env);
    }
    if (squat) {
      const double d = 0.35 * amp * env;
      shift(p, {Nose, Neck, RShoulder, RElbow, RWrist, LShoulder, LElbow, LWrist, RHip, LHip, REye, LEye, REar, LEar},
            {0.0, -d, 0.0});
      shift(p, {RKnee, LKnee}, {0.0, -0.35 * d, 0.0});
      shift(p, {RKnee}, {-0.08 * env, 0.0, 0.0});
      shift(p, {LKnee}, {0.08 * env, 0.0, 0.0});
      swing_arm(p, LShoulder, LElbow, LWrist, 1.3 * env);
      swing_arm(p, RShoulder, RElbow, RWrist, -1.3 * env);
    }
    if (kick) {
      const double k = amp * env * std::max(0.0, std::sin(2.0 * kPi * 1.0 * t + phase));
      const J knee = left ? LKnee : RKnee;
      const J ankle = left ? LAnkle : RAnkle;
      const double side = left ? 1.0 : -1.0;
      shift(p, {knee}, {side * 0.10 * k, 0.20 * k, 0.0});
      shift(p, {ankle}, {side * 0.35 * k, 0.55 * k, 0.0});
    }
    if (turn) {
      // Narrowing of the shoulders and hips as the body turns away.
      const double c = std::cos(kPi * env * amp);
      for (auto& v : p) v.x *= 0.35 + 0.65 * std::abs(c);
    }
    if (idle) {
      const double s = std::sin(2.0 * kPi * 0.5 * t + phase);
      shift(p, {Nose, Neck, REye, LEye, REar, LEar}, {0.02 * amp * env * s, 0.0, 0.0});
      swing_arm(p, LShoulder, LElbow, LWrist, 0.08 * amp * env * s);
      swing_arm(p, RShoulder, RElbow, RWrist, 0.08 * amp * env * s);
    }
    out.emplace_back(p.begin(), p.end());
  }
  return MotionClip3D(std::move(out), fps);
}

ReferencePose reference_pose(FrameSize size) {
  const TopologyPtr& topo = topologies::full();
  KeypointFrame frame = KeypointFrame::absent(topo->size());

  // Longer legs and neck, shorter forearms than the rest pose, slight A-pose.
  Pose body = kRest;
  body[Nose].y += 0.03;
  body[REye].y += 0.03;
  body[LEye].y += 0.03;
  body[REar].y += 0.03;
  body[LEar].y += 0.03;
  body[RWrist] = {-0.27, 0.98, 0.0};
  body[LWrist] = {0.27, 0.98, 0.0};
  body[RKnee].y = 0.50;
  body[LKnee].y = 0.50;
  body[RAnkle].y = 0.02;
  body[LAnkle].y = 0.02;

  const double px_per_m = 0.8 * size.height / 1.7;
  auto to_norm = [&](const Vec3& v) {
    return Vec2{0.5 + v.x * px_per_m / size.width, 0.08 + (1.7 - v.y) * px_per_m / size.height};
  };
  for (std::size_t j = 0; j < body.size(); ++j) {
    frame.positions[j] = to_norm(body[j]);
    frame.confidence[j] = 0.95;
  }

  // Face: 68 points on an ellipse around the nose.
  const auto face = topo->indices_of(KeypointGroup::Face);
  const Vec2 nose = frame.positions[Nose];
  const double rx = 0.07 * px_per_m / size.width;
  const double ry = 0.10 * px_per_m / size.height;
  for (std::size_t i = 0; i < face.size(); ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(face.size());
    frame.positions[face[i]] = {nose.x + rx * std::cos(a), nose.y + ry * std::sin(a)};
    frame.confidence[face[i]] = 0.9;
  }

  MotionClip body_only(topo, {frame}, Fps{1, 1});
  const HandCompletion hands = complete_hands_template(body_only, HandTemplate::named("relaxed-open"));
  KeypointFrame with_hands = hands.clip.frame(0);
  return {topo, std::move(with_hands), size};
}

}  // namespace motionrig::synthetic
