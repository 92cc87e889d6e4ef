#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "smartlid/core/image.hpp"

// 8-bit colorspace conversions.
//
// HSV: V = max(R,G,B); S = round(255·(V−min)/V), 0 when V = 0; hue in degrees
// h ∈ [0, 360) is stored as round(h·256/360) mod 256, so 0–360° spans the full
// byte range. Achromatic pixels get H = 0.
//
// YUV: BT.601 luma Y = 0.299R + 0.587G + 0.114B,
// U = 0.492·(B − Y) + 128, V = 0.877·(R − Y) + 128; every channel is rounded
// half away from zero and clamped to 0..255.
namespace smartlid::vision {

class ColorspaceError : public Error {
 public:
  using Error::Error;
};

using Triplet = std::array<std::uint8_t, 3>;

inline std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

inline Triplet rgb_to_hsv_px(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int v = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int diff = v - mn;
  const std::uint8_t s = v == 0 ? 0 : clamp_byte(255.0 * diff / v);
  if (diff == 0) return {0, s, static_cast<std::uint8_t>(v)};
  double h = 0.0;
  if (v == r) h = 60.0 * (g - b) / diff;
  else if (v == g) h = 120.0 + 60.0 * (b - r) / diff;
  else h = 240.0 + 60.0 * (r - g) / diff;
  if (h < 0.0) h += 360.0;
  const long hb = std::lround(h * 256.0 / 360.0) % 256;
  return {static_cast<std::uint8_t>(hb), s, static_cast<std::uint8_t>(v)};
}

inline Triplet rgb_to_yuv_px(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return {clamp_byte(y), clamp_byte(0.492 * (b - y) + 128.0), clamp_byte(0.877 * (r - y) + 128.0)};
}

namespace detail {

template <typename PixelFn>
ColorImage convert_from_rgb(const ColorImage& in, Colorspace out_tag, PixelFn fn) {
  if (in.colorspace != Colorspace::kRGB && in.colorspace != Colorspace::kBGR)
    throw ColorspaceError("expected an RGB or BGR image, got " + std::string(to_string(in.colorspace)));
  const bool bgr = in.colorspace == Colorspace::kBGR;
  ColorImage out(in.width, in.height, out_tag);
  for (std::size_t i = 0; i < in.data.size(); i += 3) {
    const std::uint8_t r = in.data[i + (bgr ? 2 : 0)];
    const std::uint8_t g = in.data[i + 1];
    const std::uint8_t b = in.data[i + (bgr ? 0 : 2)];
    const Triplet t = fn(r, g, b);
    out.data[i] = t[0];
    out.data[i + 1] = t[1];
    out.data[i + 2] = t[2];
  }
  return out;
}

}  // namespace detail

inline ColorImage rgb_to_hsv(const ColorImage& c) { return detail::convert_from_rgb(c, Colorspace::kHSV, rgb_to_hsv_px); }

inline ColorImage rgb_to_yuv(const ColorImage& c) { return detail::convert_from_rgb(c, Colorspace::kYUV, rgb_to_yuv_px); }

// RGB <-> BGR channel swap.
inline ColorImage swap_rb(const ColorImage& c) {
  if (c.colorspace != Colorspace::kRGB && c.colorspace != Colorspace::kBGR)
    throw ColorspaceError("channel swap needs an RGB or BGR image");
  ColorImage out = c;
  for (std::size_t i = 0; i < out.data.size(); i += 3) std::swap(out.data[i], out.data[i + 2]);
  out.colorspace = c.colorspace == Colorspace::kRGB ? Colorspace::kBGR : Colorspace::kRGB;
  return out;
}

inline ColorImage gray_to_rgb(const GrayImage& g) {
  ColorImage out(g.width, g.height, Colorspace::kRGB);
  for (std::size_t i = 0; i < g.data.size(); ++i) out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g.data[i];
  return out;
}

}  // namespace smartlid::vision
