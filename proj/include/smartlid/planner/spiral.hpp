#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "smartlid/planner/toolpath.hpp"
#include "smartlid/vision/components.hpp"

namespace smartlid::planner {

inline constexpr double kSpiralStepDeg = 10.0;

// Archimedean spiral polyline from `center` outward to `radius` over `turns`
// revolutions, one segment per 10°. Errors if the enclosing circle leaves the
// working area; the path is never clipped.
inline ToolPath plan_spiral(Point2 center, double radius, int turns, const BinGeometry& g,
                            const ToolSettings& tool = {}) {
  if (!(radius > 0.0)) throw PlanError("degenerate spiral: radius must be > 0");
  if (turns < 1) throw PlanError("degenerate spiral: turns must be ≥ 1");
  constexpr double tol = 1e-9;
  if (center.x - radius < g.work_x_min() - tol || center.x + radius > g.work_x_max() + tol ||
      center.y - radius < g.work_y_min() - tol || center.y + radius > g.work_y_max() + tol)
    throw PlanError("spiral exits working area");
  const int steps = static_cast<int>(std::lround(360.0 / kSpiralStepDeg)) * turns;
  const double total_angle = 2.0 * std::numbers::pi * turns;
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double theta = total_angle * k / steps;
    const double r = radius * k / steps;
    pts.push_back({center.x + r * std::cos(theta), center.y + r * std::sin(theta)});
  }
  return make_path(std::move(pts), tool);
}

// Affine map from image pixel (row, col) to bin coordinates, pixel centers at
// half-integer offsets: x = origin_x + (col + 0.5)·scale_x, y = origin_y + (row + 0.5)·scale_y.
struct ImageToBin {
  double origin_x{0.0};
  double origin_y{0.0};
  double scale_x{1.0};  // m per pixel column
  double scale_y{1.0};  // m per pixel row (negative when rows run downward)

  Point2 map(double row, double col) const { return {origin_x + (col + 0.5) * scale_x, origin_y + (row + 0.5) * scale_y}; }
  double pixel_pitch() const { return std::sqrt(std::abs(scale_x * scale_y)); }

  // Whole frame covers the bin interior, image row 0 at the far wall (y = y_len).
  static ImageToBin fit(int width, int height, const BinGeometry& g) {
    return {0.0, g.y_len, g.x_len / width, -g.y_len / height};
  }
};

struct SpiralTarget {
  Point2 center{};
  double radius{0.0};
  std::int64_t area{0};
};

// One spiral per cluster, largest cluster first, radius = k·sqrt(area)·pixel pitch.
// Radii are capped to fit the working area and centers are pulled inward just
// enough for the whole spiral to stay inside.
inline std::vector<SpiralTarget> targeted_spirals(const vision::ComponentSet& clusters, const BinGeometry& g,
                                                  const ImageToBin& image_to_bin, double k = 1.0) {
  if (clusters.empty()) throw PlanError("nothing to target");
  std::vector<vision::Component> sorted = clusters.components;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.area > b.area; });
  const double max_radius = 0.5 * std::min(g.work_width(), g.work_height());
  std::vector<SpiralTarget> out;
  for (const auto& c : sorted) {
    SpiralTarget t;
    t.area = c.area;
    t.radius = std::min(k * std::sqrt(static_cast<double>(c.area)) * image_to_bin.pixel_pitch(), max_radius);
    const Point2 p = image_to_bin.map(c.centroid_row, c.centroid_col);
    t.center.x = std::clamp(p.x, g.work_x_min() + t.radius, g.work_x_max() - t.radius);
    t.center.y = std::clamp(p.y, g.work_y_min() + t.radius, g.work_y_max() - t.radius);
    out.push_back(t);
  }
  return out;
}

// Spirals joined by straight transit moves, in descending cluster area.
inline ToolPath plan_targeted(const vision::ComponentSet& clusters, const BinGeometry& g,
                              const ImageToBin& image_to_bin, int turns = 3, double k = 1.0,
                              const ToolSettings& tool = {}) {
  std::vector<Point2> pts;
  for (const auto& t : targeted_spirals(clusters, g, image_to_bin, k)) {
    const ToolPath s = plan_spiral(t.center, t.radius, turns, g, tool);
    pts.insert(pts.end(), s.waypoints.begin(), s.waypoints.end());
  }
  return make_path(std::move(pts), tool);
}

}  // namespace smartlid::planner
