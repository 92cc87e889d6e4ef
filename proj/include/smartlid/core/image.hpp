#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smartlid/core/types.hpp"

namespace smartlid {

class ImageError : public Error {
 public:
  using Error::Error;
};

enum class Colorspace { kBGR, kRGB, kYUV, kHSV };

inline std::string_view to_string(Colorspace c) {
  switch (c) {
    case Colorspace::kBGR: return "BGR";
    case Colorspace::kRGB: return "RGB";
    case Colorspace::kYUV: return "YUV";
    case Colorspace::kHSV: return "HSV";
  }
  return "RGB";
}

inline std::optional<Colorspace> parse_colorspace(std::string_view s) {
  if (s == "BGR") return Colorspace::kBGR;
  if (s == "RGB") return Colorspace::kRGB;
  if (s == "YUV") return Colorspace::kYUV;
  if (s == "HSV") return Colorspace::kHSV;
  return std::nullopt;
}

struct GrayImage {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> data;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw InvariantError("image dimensions must be ≥ 0");
  }

  std::size_t size() const { return data.size(); }
  std::uint8_t& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct ColorImage {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> data;  // row-major triplets
  Colorspace colorspace{Colorspace::kRGB};

  ColorImage() = default;
  ColorImage(int w, int h, Colorspace cs = Colorspace::kRGB)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0), colorspace(cs) {
    if (w < 0 || h < 0) throw InvariantError("image dimensions must be ≥ 0");
  }

  std::uint8_t* px(int row, int col) { return &data[(static_cast<std::size_t>(row) * width + col) * 3]; }
  const std::uint8_t* px(int row, int col) const {
    return &data[(static_cast<std::size_t>(row) * width + col) * 3];
  }

  friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

using AnyImage = std::variant<GrayImage, ColorImage>;

// Binary PGM (P5) / PPM (P6), maxval 255. Color images carry their colorspace
// in a header comment ("# colorspace: HSV") so tags survive a round trip; a P6
// without that comment is read as RGB.
inline std::string encode_pnm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline std::string encode_pnm(const ColorImage& img) {
  std::string out = "P6\n# colorspace: " + std::string(to_string(img.colorspace)) + "\n" +
                    std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline AnyImage decode_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  std::optional<Colorspace> tag;

  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        const auto eol = bytes.find('\n', pos);
        std::string_view comment = bytes.substr(pos + 1, eol == std::string_view::npos ? std::string_view::npos
                                                                                        : eol - pos - 1);
        constexpr std::string_view key = " colorspace: ";
        if (comment.substr(0, key.size()) == key) {
          std::string_view name = comment.substr(key.size());
          while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.remove_suffix(1);
          tag = parse_colorspace(name);
        }
        pos = eol == std::string_view::npos ? bytes.size() : eol + 1;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> long {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000L) throw ImageError(std::string("malformed header: ") + what + " too large");
      ++pos;
      ++digits;
    }
    if (digits == 0) throw ImageError(std::string("malformed header: missing ") + what);
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw ImageError("malformed header: expected P5 or P6 magic");
  const bool color = bytes[1] == '6';
  pos = 2;
  const long w = read_uint("width");
  const long h = read_uint("height");
  const long maxval = read_uint("maxval");
  if (w < 1 || h < 1) throw ImageError("malformed header: image must be at least 1x1");
  if (maxval != 255) throw ImageError("unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  if (pos >= bytes.size() || !(bytes[pos] == ' ' || bytes[pos] == '\n' || bytes[pos] == '\r' || bytes[pos] == '\t'))
    throw ImageError("malformed header: missing separator before pixel data");
  ++pos;
  const std::size_t channels = color ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - pos < need) throw ImageError("truncated pixel data");
  const auto* first = reinterpret_cast<const std::uint8_t*>(bytes.data() + pos);
  if (color) {
    ColorImage img(static_cast<int>(w), static_cast<int>(h), tag.value_or(Colorspace::kRGB));
    img.data.assign(first, first + need);
    return img;
  }
  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  img.data.assign(first, first + need);
  return img;
}

inline AnyImage read_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ImageError(path + ": cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_pnm(ss.str());
}

inline GrayImage read_gray(const std::string& path) {
  AnyImage img = read_image(path);
  if (auto* g = std::get_if<GrayImage>(&img)) return std::move(*g);
  throw ImageError(path + ": expected a grayscale (P5) image");
}

template <typename Image>
void write_image(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ImageError(path + ": cannot open for writing");
  const std::string bytes = encode_pnm(img);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ImageError(path + ": write failed");
}

inline void write_image(const AnyImage& img, const std::string& path) {
  std::visit([&](const auto& i) { write_image(i, path); }, img);
}

}  // namespace smartlid
