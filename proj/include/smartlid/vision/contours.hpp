#pragma once

#include <vector>

#include "smartlid/vision/colorspace.hpp"
#include "smartlid/vision/components.hpp"
#include "smartlid/vision/inferno_table.hpp"

namespace smartlid::vision {

struct Pixel {
  int row{0};
  int col{0};
  friend constexpr bool operator==(const Pixel&, const Pixel&) = default;
};

// Closed polygon of border pixels; the first pixel is not repeated at the end.
using Contour = std::vector<Pixel>;

namespace detail {

// Clockwise on screen (rows grow downward), starting west.
inline constexpr int kDirRow[8] = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr int kDirCol[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline int direction_of(Pixel from, Pixel to) {
  for (int d = 0; d < 8; ++d)
    if (from.row + kDirRow[d] == to.row && from.col + kDirCol[d] == to.col) return d;
  return 0;
}

// Moore-neighbor tracing of the component `label`, starting at `start` (its
// topmost-leftmost pixel) with Jacob's stopping criterion: stop on re-entering
// the start pixel from the original backtrack position.
inline Contour trace_outer(const LabelImage& labels, std::int32_t label, Pixel start) {
  auto fg = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < labels.height && c < labels.width && labels.at(r, c) == label;
  };
  Contour out{start};
  const Pixel start_back{start.row, start.col - 1};
  Pixel cur = start;
  Pixel back = start_back;
  const std::size_t limit = 4 * static_cast<std::size_t>(labels.width) * labels.height + 8;
  for (std::size_t guard = 0; guard < limit; ++guard) {
    const int bdir = direction_of(cur, back);
    bool found = false;
    Pixel prev = back;
    for (int k = 1; k <= 8; ++k) {
      const int d = (bdir + k) % 8;
      const Pixel cand{cur.row + kDirRow[d], cur.col + kDirCol[d]};
      if (fg(cand.row, cand.col)) {
        back = prev;
        cur = cand;
        found = true;
        break;
      }
      prev = cand;
    }
    if (!found) return out;  // isolated pixel
    if (cur == start && back == start_back) return out;
    out.push_back(cur);
  }
  return out;
}

}  // namespace detail

// Outer border of every component, in label order, each traced clockwise from
// the component's topmost-leftmost pixel. Holes are not traced.
inline std::vector<Contour> extract_contours(const Labeling& lab) {
  std::vector<Contour> out;
  out.reserve(lab.components.size());
  for (const auto& c : lab.components.components) {
    // bbox.min_row is the top row; the first pixel of the label there is the start
    Pixel start{c.bbox.min_row, c.bbox.min_col};
    for (int col = c.bbox.min_col; col <= c.bbox.max_col; ++col) {
      if (lab.labels.at(c.bbox.min_row, col) == c.label) {
        start.col = col;
        break;
      }
    }
    out.push_back(detail::trace_outer(lab.labels, c.label, start));
  }
  return out;
}

inline std::vector<Contour> extract_contours(const Mask& mask) { return extract_contours(connected_components(mask)); }

inline constexpr Rgb8 kContourRed{255, 0, 0};

// Paints contour pixels onto a copy of `base`. `color` is given in RGB and
// converted to the base image's colorspace.
inline ColorImage overlay_contours(const ColorImage& base, const std::vector<Contour>& contours,
                                   Rgb8 color = kContourRed) {
  Triplet paint{color.r, color.g, color.b};
  switch (base.colorspace) {
    case Colorspace::kRGB: break;
    case Colorspace::kBGR: paint = {color.b, color.g, color.r}; break;
    case Colorspace::kHSV: paint = rgb_to_hsv_px(color.r, color.g, color.b); break;
    case Colorspace::kYUV: paint = rgb_to_yuv_px(color.r, color.g, color.b); break;
  }
  for (const auto& contour : contours)
    for (const auto& p : contour)
      if (p.row < 0 || p.col < 0 || p.row >= base.height || p.col >= base.width)
        throw Error("contour pixel outside image bounds");
  ColorImage out = base;
  for (const auto& contour : contours) {
    for (const auto& p : contour) {
      std::uint8_t* px = out.px(p.row, p.col);
      px[0] = paint[0];
      px[1] = paint[1];
      px[2] = paint[2];
    }
  }
  return out;
}

}  // namespace smartlid::vision
