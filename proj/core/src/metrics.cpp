#include "motionrig/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "detail/http.hpp"
#include "motionrig/errors.hpp"
#include "motionrig/pose_io.hpp"
#include "motionrig/render.hpp"
#include "motionrig/services.hpp"

namespace motionrig {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(Errc::DimensionMismatch,
                "vectors have dimensions " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector is undefined");
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<Embedding> BagOfWordsEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<std::string>> tokens;
  std::map<std::string, std::size_t> vocab;
  for (const auto& t : texts) {
    tokens.push_back(tokenize(t));
    for (const auto& w : tokens.back()) vocab.emplace(w, 0);
  }
  std::size_t next = 0;
  for (auto& [word, slot] : vocab) slot = next++;
  std::vector<Embedding> out;
  for (const auto& toks : tokens) {
    Embedding v(vocab.size(), 0.0);
    for (const auto& w : toks) v[vocab.at(w)] += 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

VideoRef load_video(const std::filesystem::path& dir) {
  const FrameIndex idx = read_frame_index(dir);
  VideoRef video{dir, idx.frames, std::nullopt};
  if (!idx.poses.empty() && std::filesystem::exists(idx.poses)) video.poses = read_clip(read_file(idx.poses)).clip;
  return video;
}

ReplayDescriber ReplayDescriber::from_fixture(std::string_view bytes) {
  const detail::Json doc = detail::parse_json(bytes, "describer fixture");
  std::map<std::string, std::string> entries;
  try {
    for (const auto& e : doc.at("entries")) entries[e.at("video").get<std::string>()] = e.at("description").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("describer fixture: ") + e.what());
  }
  return ReplayDescriber(std::move(entries));
}

std::string ReplayDescriber::describe(const VideoRef& video) {
  const std::string key = video.dir.filename().string();
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (auto it = entries_.find("*"); it != entries_.end()) return it->second;
  throw Error(Errc::ContractViolation, "no recorded description for video '" + key + "'");
}

namespace {

struct Track {
  std::vector<std::optional<Vec2>> points;
};

Track track(const MotionClip& clip, std::string_view name) {
  Track t;
  const auto idx = clip.topology().index_of(name);
  for (const auto& f : clip.frames()) {
    if (idx && f.present(*idx)) {
      t.points.push_back(f.positions[*idx]);
    } else {
      t.points.push_back(std::nullopt);
    }
  }
  return t;
}

// Path length of `limb` relative to `base`, summed over consecutive frames.
double relative_activity(const Track& limb, const Track& base) {
  double total = 0.0;
  for (std::size_t i = 1; i < limb.points.size(); ++i) {
    if (!limb.points[i] || !limb.points[i - 1] || !base.points[i] || !base.points[i - 1]) continue;
    total += distance(*limb.points[i] - *base.points[i], *limb.points[i - 1] - *base.points[i - 1]);
  }
  return total;
}

double raised_fraction(const Track& wrist, const Track& shoulder) {
  std::size_t n = 0, up = 0;
  for (std::size_t i = 0; i < wrist.points.size(); ++i) {
    if (!wrist.points[i] || !shoulder.points[i]) continue;
    ++n;
    if (wrist.points[i]->y < shoulder.points[i]->y) ++up;
  }
  return n ? static_cast<double>(up) / static_cast<double>(n) : 0.0;
}

}  // namespace

std::string PoseHeuristicDescriber::describe(const VideoRef& video) {
  if (!video.poses) throw Error(Errc::InvalidArgument, "pose-heuristic describer needs the video's pose track");
  const MotionClip& clip = *video.poses;
  if (clip.empty()) return "a person stands still";

  double height_sum = 0.0;
  std::size_t height_n = 0;
  for (const auto& f : clip.frames()) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t k : clip.topology().indices_of(KeypointGroup::Body)) {
      if (!f.present(k)) continue;
      lo = std::min(lo, f.positions[k].y);
      hi = std::max(hi, f.positions[k].y);
    }
    if (hi > lo) {
      height_sum += hi - lo;
      ++height_n;
    }
  }
  const double body = height_n ? height_sum / static_cast<double>(height_n) : 1.0;
  const double seconds = static_cast<double>(clip.size()) / clip.fps().value();

  const Track neck = track(clip, "neck");
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const auto& p : neck.points) {
    if (!p) continue;
    min_x = std::min(min_x, p->x);
    max_x = std::max(max_x, p->x);
    min_y = std::min(min_y, p->y);
    max_y = std::max(max_y, p->y);
  }
  const double travel = max_x > min_x ? (max_x - min_x) / body : 0.0;
  const double bounce = max_y > min_y ? (max_y - min_y) / body : 0.0;
  const double legs = std::max(relative_activity(track(clip, "left_ankle"), neck),
                               relative_activity(track(clip, "right_ankle"), neck)) / body;
  const double left_arm = relative_activity(track(clip, "left_wrist"), neck) / body;
  const double right_arm = relative_activity(track(clip, "right_wrist"), neck) / body;

  std::vector<std::string> phrases;
  if (travel > 0.25 && legs > 0.3) {
    phrases.push_back(travel / std::max(seconds, 1e-9) > 0.6 ? "runs" : "walks");
  } else if (bounce > 0.12) {
    phrases.push_back("jumps");
  } else if (legs > 0.6) {
    phrases.push_back("moves the legs");
  }
  const bool la = left_arm > 0.5, ra = right_arm > 0.5;
  const bool l_up = raised_fraction(track(clip, "left_wrist"), track(clip, "left_shoulder")) > 0.4;
  const bool r_up = raised_fraction(track(clip, "right_wrist"), track(clip, "right_shoulder")) > 0.4;
  if (la && ra) {
    phrases.push_back(l_up || r_up ? "waves both arms" : "swings both arms");
  } else if (la) {
    phrases.push_back(l_up ? "waves the left hand" : "moves the left arm");
  } else if (ra) {
    phrases.push_back(r_up ? "waves the right hand" : "moves the right arm");
  }
  if (phrases.empty()) return "a person stands still";
  std::string out = "a person";
  for (std::size_t i = 0; i < phrases.size(); ++i) out += (i ? " and " : " ") + phrases[i];
  return out;
}

namespace {

class HttpDescriber final : public DescriptionProvider {
 public:
  HttpDescriber(std::string endpoint, int limit) : client_(std::move(endpoint), limit) {}

  std::string describe(const VideoRef& video) override {
    std::vector<std::string> frames;
    for (const auto& f : video.frames) frames.push_back(std::filesystem::absolute(f).string());
    detail::Json request{{"prompt", kDescribePrompt},
                         {"frames_dir", std::filesystem::absolute(video.dir).string()},
                         {"frames", frames}};
    const detail::Json response = client_.post_json(request);
    if (!response.is_object() || !response.contains("description") || !response["description"].is_string())
      throw Error(Errc::ContractViolation, "describer response lacks a 'description' string");
    return response["description"].get<std::string>();
  }
  std::string name() const override { return "http:" + client_.endpoint(); }

 private:
  mutable detail::HttpJsonClient client_;
};

class HttpEmbedder final : public EmbeddingProvider {
 public:
  HttpEmbedder(std::string endpoint, int limit) : client_(std::move(endpoint), limit) {}

  std::vector<Embedding> embed(std::span<const std::string> texts) override {
    detail::Json request{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    const detail::Json response = client_.post_json(request);
    std::vector<Embedding> out;
    try {
      out = response.at("embeddings").get<std::vector<Embedding>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ContractViolation, std::string("embedder response: ") + e.what());
    }
    if (out.size() != texts.size())
      throw Error(Errc::ContractViolation, "embedder returned " + std::to_string(out.size()) + " vectors for " +
                                               std::to_string(texts.size()) + " texts");
    for (const auto& v : out) {
      if (v.size() != out.front().size()) throw Error(Errc::ContractViolation, "embedder dimensions disagree");
    }
    if (response.contains("model") && response["model"].is_string()) model_ = response["model"].get<std::string>();
    return out;
  }
  std::string name() const override {
    return "http:" + client_.endpoint() + (model_.empty() ? "" : " (" + model_ + ")");
  }

 private:
  mutable detail::HttpJsonClient client_;
  std::string model_;
};

std::string resolve(const std::string& endpoint, const char* var) {
  std::string url = endpoint.empty() ? env_or_empty(var) : endpoint;
  if (url.empty()) throw Error(Errc::ServiceUnreachable, std::string("no endpoint configured (") + var + ")");
  return url;
}

}  // namespace

std::unique_ptr<DescriptionProvider> make_http_describer(const std::string& endpoint, int max_in_flight) {
  return std::make_unique<HttpDescriber>(resolve(endpoint, "DESCRIBER_ENDPOINT"), max_in_flight);
}

std::unique_ptr<EmbeddingProvider> make_http_embedder(const std::string& endpoint, int max_in_flight) {
  return std::make_unique<HttpEmbedder>(resolve(endpoint, "EMBEDDER_ENDPOINT"), max_in_flight);
}

double motion_score(const VideoRef& video, std::string_view motion_text, DescriptionProvider& describer,
                    EmbeddingProvider& embedder) {
  std::string description;
  try {
    description = describer.describe(video);
  } catch (const Error& e) {
    throw Error(e.code(), "describer '" + describer.name() + "': " + e.what());
  }
  std::vector<Embedding> vectors;
  try {
    const std::string texts[] = {description, std::string(motion_text)};
    vectors = embedder.embed(texts);
  } catch (const Error& e) {
    throw Error(e.code(), "embedder '" + embedder.name() + "': " + e.what());
  }
  if (vectors.size() != 2) throw Error(Errc::ContractViolation, "embedder returned the wrong number of vectors");
  return cosine(vectors[0], vectors[1]);
}

double psnr(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.empty())
    throw Error(Errc::DimensionMismatch, "psnr needs equally sized non-empty images");
  double sse = 0.0;
  const auto& pa = a.bytes();
  const auto& pb = b.bytes();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrCap;
  const double mse = sse / static_cast<double>(pa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<double> to_luma(const Image& image) {
  std::vector<double> out(static_cast<std::size_t>(image.width()) * image.height());
  const auto& px = image.bytes();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
  }
  return out;
}

namespace {

// Valid-region separable filtering with the normalized 1D Gaussian.
std::vector<double> filter_valid(const std::vector<double>& img, int width, int height, const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int ow = width - k + 1;
  const int oh = height - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += g[i] * img[static_cast<std::size_t>(y) * width + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += g[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

SsimComponents ssim_components(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(Errc::DimensionMismatch, "ssim needs equally sized images");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow)
    throw Error(Errc::ImageTooSmall, "ssim needs images of at least 11x11 pixels");
  const int w = a.width(), h = a.height();
  const auto la = to_luma(a);
  const auto lb = to_luma(b);
  std::vector<double> aa(la.size()), bb(la.size()), ab(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    aa[i] = la[i] * la[i];
    bb[i] = lb[i] * lb[i];
    ab[i] = la[i] * lb[i];
  }
  std::vector<double> g(kSsimWindow);
  {
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double d = i - half;
      g[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
  }
  const auto mu_a = filter_valid(la, w, h, g);
  const auto mu_b = filter_valid(lb, w, h, g);
  const auto e_aa = filter_valid(aa, w, h, g);
  const auto e_bb = filter_valid(bb, w, h, g);
  const auto e_ab = filter_valid(ab, w, h, g);

  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  SsimComponents out;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    const double cs = (2.0 * cov + c2) / (va + vb + c2);
    out.ssim += lum * cs;
    out.luminance += lum;
    out.contrast_structure += cs;
  }
  const double n = static_cast<double>(mu_a.size());
  out.ssim /= n;
  out.luminance /= n;
  out.contrast_structure /= n;
  return out;
}

double ssim(const Image& a, const Image& b) { return ssim_components(a, b).ssim; }

std::string write_metrics_report(const MetricsReport& report) {
  detail::Json rows = detail::Json::array();
  auto cell = [](const std::optional<double>& v) { return v ? detail::Json(*v) : detail::Json(nullptr); };
  for (const auto& r : report.rows) {
    rows.push_back({r.video, cell(r.psnr), cell(r.ssim), "external", "external", "external", "external",
                    cell(r.motion_score)});
  }
  detail::Json doc{{"format", "motionrig.metrics"},
                   {"version", 1},
                   {"columns", std::vector<std::string>(kReportColumns.begin(), kReportColumns.end())},
                   {"rows", rows},
                   {"metadata", report.metadata},
                   {"sampled_frames", report.sampled_frames}};
  return doc.dump(2) + "\n";
}

std::vector<std::size_t> sample_frames(std::size_t frame_count, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(frame_count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t m = std::min(count, frame_count);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (frame_count - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

MetricsReport score_video(const VideoRef& video, std::string_view motion_text, const Image* reference,
                          DescriptionProvider* describer, EmbeddingProvider* embedder, const ScoreOptions& options) {
  MetricsReport report;
  MetricsRow row{video.dir.filename().string(), std::nullopt, std::nullopt, std::nullopt};
  if (reference && !video.frames.empty()) {
    report.sampled_frames = sample_frames(video.frames.size(), options.sample_count, options.seed);
    double p = 0.0, s = 0.0;
    for (std::size_t i : report.sampled_frames) {
      const Image frame = read_ppm(video.frames[i]);
      p += psnr(frame, *reference);
      s += ssim(frame, *reference);
    }
    const double n = static_cast<double>(report.sampled_frames.size());
    row.psnr = p / n;
    row.ssim = s / n;
  }
  if (describer && embedder) {
    row.motion_score = motion_score(video, motion_text, *describer, *embedder);
    report.metadata["describer"] = describer->name();
    report.metadata["embedder"] = embedder->name();
  }
  report.metadata["motion_text"] = std::string(motion_text);
  report.rows.push_back(std::move(row));
  return report;
}

}  // namespace motionrig
