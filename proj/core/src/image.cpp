#include "motionrig/image.hpp"

#include <cctype>
#include <string>

#include "motionrig/errors.hpp"
#include "motionrig/pose_io.hpp"

namespace motionrig {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArgument, "image dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  if (!contains(x, y)) throw Error(Errc::InvalidArgument, "pixel out of bounds");
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (!contains(x, y)) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.bytes().data()), image.bytes().size());
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view s) : s_(s) {}

  long number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 9) throw Error(Errc::ParseError, "PPM header: bad number");
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  std::size_t data_start() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_])))
      throw Error(Errc::ParseError, "PPM header: missing separator before pixel data");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 2;
};

}  // namespace

Image decode_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '5'))
    throw Error(Errc::ParseError, "not a binary PPM/PGM image");
  const bool gray = bytes[1] == '5';
  HeaderReader header(bytes);
  const long w = header.number();
  const long h = header.number();
  const long maxval = header.number();
  if (w <= 0 || h <= 0 || maxval != 255) throw Error(Errc::ParseError, "unsupported PPM dimensions or depth");
  const std::size_t start = header.data_start();
  const std::size_t channels = gray ? 1 : 3;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - start < need) throw Error(Errc::ParseError, "PPM pixel data truncated");
  Image img(static_cast<int>(w), static_cast<int>(h));
  auto& px = img.bytes();
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      px[i * 3 + c] = static_cast<std::uint8_t>(bytes[start + i * channels + (gray ? 0 : c)]);
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& image) { write_file(path, encode_ppm(image)); }

Image read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

}  // namespace motionrig
