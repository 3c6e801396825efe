#pragma once

#include <json.hpp>

#include "motionrig/pose_io.hpp"

namespace motionrig::detail {

using Json = nlohmann::json;

/// Parses `bytes`, translating parser failures into Error(ParseError).
Json parse_json(std::string_view bytes, std::string_view what);

PoseClipDocument clip_from_json(const Json& doc);
inline Json clip_to_json(const MotionClip& clip, FrameSize size) { return Json::parse(write_clip(clip, size)); }

}  // namespace motionrig::detail
