#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "smartlid/core/types.hpp"

namespace smartlid::planner {

class PlanError : public Error {
 public:
  using Error::Error;
};

// Tool parameters attached to every generated path.
struct ToolSettings {
  double plunge_depth{0.05};
  double travel_speed{0.032};
  double spin_rate{1.0};
};

// Ordered waypoints the spindle follows while plunged.
struct ToolPath {
  std::vector<Point2> waypoints;
  double plunge_depth{0.05};
  double travel_speed{0.032};
  double spindle_spin_rate{1.0};

  friend bool operator==(const ToolPath&, const ToolPath&) = default;
};

inline ToolPath make_path(std::vector<Point2> waypoints, const ToolSettings& tool) {
  return ToolPath{std::move(waypoints), tool.plunge_depth, tool.travel_speed, tool.spin_rate};
}

inline void validate(const ToolPath& p, const BinGeometry& g) {
  if (p.waypoints.size() < 2) throw PlanError("tool path needs at least 2 waypoints");
  if (!(p.travel_speed > 0.0)) throw PlanError("travel_speed must be > 0");
  if (!(p.plunge_depth > 0.0) || p.plunge_depth > g.z_depth) throw PlanError("plunge_depth outside (0, z_depth]");
  for (const auto& w : p.waypoints)
    if (!g.contains(w)) throw PlanError("waypoint outside working area");
}

inline double path_length(const ToolPath& p) {
  double total = 0.0;
  for (std::size_t i = 1; i < p.waypoints.size(); ++i) total += distance(p.waypoints[i - 1], p.waypoints[i]);
  return total;
}

inline double min_speed(double length, double time_budget) {
  if (!(length > 0.0) || !std::isfinite(length)) throw PlanError("length must be positive and finite");
  if (!(time_budget > 0.0) || !std::isfinite(time_budget)) throw PlanError("time budget must be positive and finite");
  return length / time_budget;
}

// Plain-text export: one "x y" line per waypoint, meters, 6 decimals.
inline std::string export_waypoints(const ToolPath& p) {
  std::string out;
  char buf[64];
  for (const auto& w : p.waypoints) {
    std::snprintf(buf, sizeof buf, "%.6f %.6f\n", w.x, w.y);
    out += buf;
  }
  return out;
}

inline std::vector<Point2> import_waypoints(const std::string& text) {
  std::vector<Point2> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Point2 p;
    std::string extra;
    if (!(ls >> p.x >> p.y) || (ls >> extra)) throw PlanError("waypoint line " + std::to_string(lineno) + ": expected 'x y'");
    out.push_back(p);
  }
  return out;
}

}  // namespace smartlid::planner
