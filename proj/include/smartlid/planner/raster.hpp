#pragma once

#include <cmath>
#include <vector>

#include "smartlid/planner/toolpath.hpp"

namespace smartlid::planner {

// Lane layout of a boustrophedon pass.
struct RasterLayout {
  bool lanes_along_x{true};
  int lanes{0};
  double lane_length{0.0};
  double spacing{0.0};  // actual distance between adjacent lanes, ≤ requested pitch
};

// Lanes run along the longer working-area axis (X on ties). If the pitch does
// not divide the cross-lane span exactly, the lane count is rounded up and
// lanes are spread evenly, so the actual spacing is the largest value ≤ pitch
// that keeps the first and last lane on the working-area edges.
inline RasterLayout raster_layout(const BinGeometry& g, double pitch) {
  RasterLayout l;
  l.lanes_along_x = g.work_width() >= g.work_height();
  l.lane_length = l.lanes_along_x ? g.work_width() : g.work_height();
  const double span = l.lanes_along_x ? g.work_height() : g.work_width();
  if (!(pitch > 0.0)) throw PlanError("pitch must be > 0");
  if (pitch > span * (1.0 + 1e-12)) throw PlanError("pitch too large for geometry");
  const double ratio = span / pitch;
  const double nearest = std::round(ratio);
  const int gaps = std::abs(ratio - nearest) < 1e-9 ? static_cast<int>(nearest) : static_cast<int>(std::ceil(ratio));
  l.lanes = std::max(gaps, 1) + 1;
  l.spacing = span / (l.lanes - 1);
  return l;
}

// Serpentine raster starting at the home corner (margin, margin).
inline ToolPath plan_raster(const BinGeometry& g, double pitch, const ToolSettings& tool = {}) {
  g.validate();
  const RasterLayout l = raster_layout(g, pitch);
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(l.lanes) * 2);
  const double x0 = g.work_x_min(), x1 = g.work_x_max();
  const double y0 = g.work_y_min(), y1 = g.work_y_max();
  for (int i = 0; i < l.lanes; ++i) {
    const bool forward = i % 2 == 0;
    if (l.lanes_along_x) {
      const double y = i == l.lanes - 1 ? y1 : y0 + i * l.spacing;
      pts.push_back({forward ? x0 : x1, y});
      pts.push_back({forward ? x1 : x0, y});
    } else {
      const double x = i == l.lanes - 1 ? x1 : x0 + i * l.spacing;
      pts.push_back({x, forward ? y0 : y1});
      pts.push_back({x, forward ? y1 : y0});
    }
  }
  return make_path(std::move(pts), tool);
}

// n lanes of length L joined by n-1 connectors.
inline double raster_length_closed_form(const RasterLayout& l) {
  return l.lanes * l.lane_length + (l.lanes - 1) * l.spacing;
}

}  // namespace smartlid::planner
