#include "motionrig/pose_io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "detail/json_io.hpp"
#include "motionrig/errors.hpp"

namespace motionrig {
namespace {

constexpr std::string_view kClipFormat = "motionrig.pose-clip";
constexpr std::string_view kMotion3dFormat = "motionrig.motion3d";

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "cannot serialize non-finite number");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_fps(std::string& out, Fps fps) {
  out += "[" + std::to_string(fps.num) + ", " + std::to_string(fps.den) + "]";
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::ParseError, what); }

template <typename T>
T get_field(const detail::Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

Fps read_fps(const detail::Json& doc) {
  const auto v = get_field<std::vector<std::int64_t>>(doc, "fps");
  if (v.size() != 2 || v[0] <= 0 || v[1] <= 0) parse_fail("fps must be [num, den] with positive entries");
  return {v[0], v[1]};
}

double checked_confidence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) parse_fail("confidence " + std::to_string(c) + " outside [0, 1]");
  return c;
}

}  // namespace

namespace detail {

Json parse_json(std::string_view bytes, std::string_view what) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

PoseClipDocument clip_from_json(const Json& doc) {
  if (get_field<std::string>(doc, "format") != kClipFormat) parse_fail("not a pose clip document");
  const int version = get_field<int>(doc, "version");
  if (version != kPoseClipVersion) parse_fail("unsupported pose clip version " + std::to_string(version));
  const TopologyPtr& topology = topologies::by_name(get_field<std::string>(doc, "topology"));
  const Fps fps = read_fps(doc);
  const auto frame_count = get_field<std::size_t>(doc, "frame_count");
  const auto& size = doc.contains("frame_size") ? doc.at("frame_size") : Json();
  FrameSize frame_size{get_field<int>(size, "height"), get_field<int>(size, "width")};
  if (frame_size.height <= 0 || frame_size.width <= 0) parse_fail("frame_size must be positive");

  const auto raw = get_field<std::vector<std::vector<std::vector<double>>>>(doc, "frames");
  if (raw.size() != frame_count)
    parse_fail("frame_count is " + std::to_string(frame_count) + " but " + std::to_string(raw.size()) +
               " frames are present");
  std::vector<KeypointFrame> frames;
  frames.reserve(raw.size());
  for (std::size_t f = 0; f < raw.size(); ++f) {
    if (raw[f].size() != topology->size())
      parse_fail("frame " + std::to_string(f) + " has " + std::to_string(raw[f].size()) + " keypoints, expected " +
                 std::to_string(topology->size()));
    KeypointFrame kf = KeypointFrame::absent(topology->size());
    for (std::size_t k = 0; k < raw[f].size(); ++k) {
      const auto& t = raw[f][k];
      if (t.size() != 3) parse_fail("keypoints must be [x, y, confidence]");
      kf.positions[k] = {t[0], t[1]};
      kf.confidence[k] = checked_confidence(t[2]);
    }
    frames.push_back(std::move(kf));
  }
  return {MotionClip(topology, std::move(frames), fps), frame_size};
}

}  // namespace detail

std::string write_clip(const MotionClip& clip, FrameSize size) {
  std::string out;
  out += "{\n  \"format\": \"";
  out += kClipFormat;
  out += "\",\n  \"version\": " + std::to_string(kPoseClipVersion);
  out += ",\n  \"topology\": \"" + clip.topology().name() + "\"";
  out += ",\n  \"fps\": ";
  append_fps(out, clip.fps());
  out += ",\n  \"frame_count\": " + std::to_string(clip.size());
  out += ",\n  \"frame_size\": {\"height\": " + std::to_string(size.height) +
         ", \"width\": " + std::to_string(size.width) + "}";
  out += ",\n  \"frames\": [";
  for (std::size_t f = 0; f < clip.size(); ++f) {
    const KeypointFrame& frame = clip.frame(f);
    out += f == 0 ? "\n    [" : ",\n    [";
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (k) out += ", ";
      out += '[';
      append_number(out, frame.positions[k].x);
      out += ", ";
      append_number(out, frame.positions[k].y);
      out += ", ";
      append_number(out, frame.confidence[k]);
      out += ']';
    }
    out += ']';
  }
  out += clip.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

PoseClipDocument read_clip(std::string_view bytes) {
  return detail::clip_from_json(detail::parse_json(bytes, "pose clip"));
}

namespace {

// Fills `frame` entries for `indices` from a flat [x, y, c, ...] array.
void read_flat_keypoints(const detail::Json& person, const char* key, const std::vector<std::size_t>& indices,
                         double sx, double sy, KeypointFrame& frame) {
  if (!person.contains(key)) return;
  const auto flat = get_field<std::vector<double>>(person, key);
  if (flat.empty()) return;
  if (flat.size() != 3 * indices.size())
    parse_fail(std::string(key) + " has " + std::to_string(flat.size()) + " values, expected " +
               std::to_string(3 * indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double c = checked_confidence(flat[3 * i + 2]);
    frame.positions[indices[i]] = {flat[3 * i] * sx, flat[3 * i + 1] * sy};
    frame.confidence[indices[i]] = c;
  }
}

bool has_values(const detail::Json& person, const char* key) {
  return person.contains(key) && person.at(key).is_array() && !person.at(key).empty();
}

}  // namespace

ReferencePose read_reference(std::string_view bytes) {
  const detail::Json doc = detail::parse_json(bytes, "reference keypoints");
  if (doc.is_object() && doc.contains("format")) {
    PoseClipDocument clip = detail::clip_from_json(doc);
    if (clip.clip.size() != 1)
      parse_fail("reference clip must contain exactly one frame, found " + std::to_string(clip.clip.size()));
    return {clip.clip.topology_ptr(), clip.clip.frame(0), clip.frame_size};
  }

  const auto people = get_field<std::vector<detail::Json>>(doc, "people");
  if (people.empty()) parse_fail("detector output contains no people");
  const detail::Json& person = people.front();
  FrameSize size{1, 1};
  double sx = 1.0, sy = 1.0;
  if (doc.contains("canvas_width") || doc.contains("canvas_height")) {
    size = {get_field<int>(doc, "canvas_height"), get_field<int>(doc, "canvas_width")};
    if (size.height <= 0 || size.width <= 0) parse_fail("canvas dimensions must be positive");
    sx = 1.0 / size.width;
    sy = 1.0 / size.height;
  }
  const bool detailed = has_values(person, "face_keypoints_2d") || has_values(person, "hand_left_keypoints_2d") ||
                        has_values(person, "hand_right_keypoints_2d");
  const TopologyPtr& topology = detailed ? topologies::full() : topologies::body18();
  KeypointFrame frame = KeypointFrame::absent(topology->size());
  if (!has_values(person, "pose_keypoints_2d")) parse_fail("detector output has no pose_keypoints_2d");
  read_flat_keypoints(person, "pose_keypoints_2d", topology->indices_of(KeypointGroup::Body), sx, sy, frame);
  if (detailed) {
    read_flat_keypoints(person, "face_keypoints_2d", topology->indices_of(KeypointGroup::Face), sx, sy, frame);
    read_flat_keypoints(person, "hand_left_keypoints_2d", topology->indices_of(KeypointGroup::HandLeft), sx, sy,
                        frame);
    read_flat_keypoints(person, "hand_right_keypoints_2d", topology->indices_of(KeypointGroup::HandRight), sx, sy,
                        frame);
  }
  return {topology, std::move(frame), size};
}

std::string write_reference(const ReferencePose& reference) {
  return write_clip(MotionClip(reference.topology, {reference.frame}, Fps{1, 1}), reference.image_size);
}

std::string write_motion3d(const MotionClip3D& clip) {
  std::string out;
  out += "{\n  \"format\": \"";
  out += kMotion3dFormat;
  out += "\",\n  \"version\": " + std::to_string(kMotion3dVersion);
  out += ",\n  \"fps\": ";
  append_fps(out, clip.fps());
  out += ",\n  \"joint_count\": " + std::to_string(clip.joint_count());
  out += ",\n  \"frames\": [";
  for (std::size_t f = 0; f < clip.size(); ++f) {
    out += f == 0 ? "\n    [" : ",\n    [";
    const auto& joints = clip.frames()[f];
    for (std::size_t j = 0; j < joints.size(); ++j) {
      if (j) out += ", ";
      out += '[';
      append_number(out, joints[j].x);
      out += ", ";
      append_number(out, joints[j].y);
      out += ", ";
      append_number(out, joints[j].z);
      out += ']';
    }
    out += ']';
  }
  out += clip.size() == 0 ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

MotionClip3D read_motion3d(std::string_view bytes) {
  const detail::Json doc = detail::parse_json(bytes, "3D motion");
  if (get_field<std::string>(doc, "format") != kMotion3dFormat) parse_fail("not a 3D motion document");
  const int version = get_field<int>(doc, "version");
  if (version != kMotion3dVersion) parse_fail("unsupported 3D motion version " + std::to_string(version));
  const Fps fps = read_fps(doc);
  const auto joint_count = get_field<std::size_t>(doc, "joint_count");
  const auto raw = get_field<std::vector<std::vector<std::vector<double>>>>(doc, "frames");
  std::vector<std::vector<Vec3>> frames;
  frames.reserve(raw.size());
  for (const auto& f : raw) {
    if (f.size() != joint_count) parse_fail("frame joint count disagrees with joint_count");
    std::vector<Vec3> joints;
    joints.reserve(f.size());
    for (const auto& j : f) {
      if (j.size() != 3) parse_fail("joints must be [x, y, z]");
      joints.push_back({j[0], j[1], j[2]});
    }
    frames.push_back(std::move(joints));
  }
  return MotionClip3D(std::move(frames), fps);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "failed writing '" + path.string() + "'");
}

}  // namespace motionrig
