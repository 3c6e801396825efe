#pragma once

/// \file synthetic.hpp
/// \brief Parametric stand-ins for model outputs so the pipeline runs offline.

#include <cstdint>
#include <string_view>

#include "motionrig/pose_io.hpp"
#include "motionrig/skeleton.hpp"

namespace motionrig::synthetic {

/// Seed for segment `index` derived from a run seed (splitmix64 mix).
std::uint64_t segment_seed(std::uint64_t seed, std::size_t index);

/// 18-joint 3D clip (COCO-18 joint order, y up, meters) driven by keywords
/// in `text`: walk, run, jump, wave, raise, squat, kick, turn; anything else
/// idles. Motion ramps in and out so both ends sit near a rest pose.
/// Deterministic for a given (text, seed, frames, fps).
MotionClip3D generate_motion(std::string_view text, std::uint64_t seed, std::size_t frames = 40, Fps fps = {20, 1});

/// Built-in reference skeleton in the "full" topology (body, face and hands)
/// standing centered in a frame of `size`, with proportions that differ
/// from the generated motion's rest pose.
ReferencePose reference_pose(FrameSize size = {});

}  // namespace motionrig::synthetic
