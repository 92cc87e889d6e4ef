#pragma once

#include <cstdint>
#include <algorithm>
#include <numeric>
#include <vector>

#include "smartlid/core/image.hpp"

namespace smartlid::vision {

// Binary foreground mask, row-major, 1 = foreground.
struct Mask {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v = true) { bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }
  bool inside(int row, int col) const { return row >= 0 && col >= 0 && row < height && col < width; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

  friend bool operator==(const Mask&, const Mask&) = default;
};

// 0 = background, components numbered 1..K.
struct LabelImage {
  int width{0};
  int height{0};
  std::vector<std::int32_t> labels;

  std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

struct BoundingBox {
  int min_row{0};
  int min_col{0};
  int max_row{0};
  int max_col{0};
  friend constexpr bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Component {
  std::int32_t label{0};
  std::int64_t area{0};
  double centroid_row{0.0};
  double centroid_col{0.0};
  BoundingBox bbox{};
};

struct ComponentSet {
  std::vector<Component> components;

  std::size_t size() const { return components.size(); }
  bool empty() const { return components.empty(); }
  std::int64_t total_area() const {
    std::int64_t a = 0;
    for (const auto& c : components) a += c.area;
    return a;
  }
};

// Foreground iff intensity > threshold.
inline Mask segment(const GrayImage& g, int threshold) {
  Mask m(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) m.bits[i] = g.data[i] > threshold ? 1 : 0;
  return m;
}

struct Labeling {
  LabelImage labels;
  ComponentSet components;
};

namespace detail {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace detail

// Two-pass union-find labeling with 8-connectivity. Labels are numbered in
// order of each component's first pixel in a row-major scan.
inline Labeling connected_components(const Mask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<std::int32_t> provisional(static_cast<std::size_t>(w) * h, -1);
  detail::DisjointSet sets;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      std::int32_t label = -1;
      // already-visited neighbors: W, NW, N, NE
      constexpr int dr[4] = {0, -1, -1, -1};
      constexpr int dc[4] = {-1, -1, 0, 1};
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k], cc = c + dc[k];
        if (!mask.inside(rr, cc)) continue;
        const std::int32_t n = provisional[static_cast<std::size_t>(rr) * w + cc];
        if (n < 0) continue;
        if (label < 0) label = n;
        else sets.unite(label, n);
      }
      if (label < 0) label = sets.make();
      provisional[static_cast<std::size_t>(r) * w + c] = label;
    }
  }

  Labeling out;
  out.labels = LabelImage{w, h, std::vector<std::int32_t>(provisional.size(), 0)};
  std::vector<std::int32_t> final_of_root;
  struct Accum {
    std::int64_t area{0};
    double sum_r{0.0};
    double sum_c{0.0};
    BoundingBox bbox{};
  };
  std::vector<Accum> acc;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (provisional[i] < 0) continue;
      const std::int32_t root = sets.find(provisional[i]);
      if (static_cast<std::size_t>(root) >= final_of_root.size()) final_of_root.resize(root + 1, 0);
      std::int32_t& lab = final_of_root[root];
      if (lab == 0) {
        acc.push_back({});
        lab = static_cast<std::int32_t>(acc.size());
        acc.back().bbox = {r, c, r, c};
      }
      out.labels.labels[i] = lab;
      Accum& a = acc[lab - 1];
      ++a.area;
      a.sum_r += r;
      a.sum_c += c;
      a.bbox.min_row = std::min(a.bbox.min_row, r);
      a.bbox.min_col = std::min(a.bbox.min_col, c);
      a.bbox.max_row = std::max(a.bbox.max_row, r);
      a.bbox.max_col = std::max(a.bbox.max_col, c);
    }
  }

  out.components.components.reserve(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const Accum& a = acc[k];
    out.components.components.push_back({static_cast<std::int32_t>(k + 1), a.area,
                                         a.sum_r / static_cast<double>(a.area),
                                         a.sum_c / static_cast<double>(a.area), a.bbox});
  }
  return out;
}

// Drops components smaller than `min_area` pixels (sensor speckle). Labels of
// the survivors are kept as-is.
inline ComponentSet filter_components(const ComponentSet& cs, std::int64_t min_area) {
  ComponentSet out;
  for (const auto& c : cs.components)
    if (c.area >= min_area) out.components.push_back(c);
  return out;
}

// Mask of the pixels whose label survives in `kept`.
inline Mask mask_of(const LabelImage& labels, const ComponentSet& kept) {
  std::vector<std::uint8_t> keep;
  for (const auto& c : kept.components) {
    if (static_cast<std::size_t>(c.label) >= keep.size()) keep.resize(c.label + 1, 0);
    keep[c.label] = 1;
  }
  Mask m(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto l = labels.labels[i];
    m.bits[i] = (l > 0 && static_cast<std::size_t>(l) < keep.size() && keep[l]) ? 1 : 0;
  }
  return m;
}

// Pixel-mass proxy for larvae biomass: total area of the segmented clusters.
inline std::int64_t growth_proxy(const ComponentSet& cs) { return cs.total_area(); }

}  // namespace smartlid::vision
