#pragma once

#include <numbers>
#include <string>

#include "smartlid/core/types.hpp"
#include "smartlid/planner/toolpath.hpp"

namespace smartlid::planner {

// Stokes drag on the spindle fingers, each treated as a sphere of the finger
// radius moving at the carriage speed.
struct DragEstimate {
  double per_finger_force{0.0};  // N
  double total_force{0.0};       // N
  double required_torque{0.0};   // N·m, sum of finger force × radial offset
};

inline DragEstimate stokes_drag(const SubstrateRheology& r, const SpindleSpec& s, double speed) {
  if (!(speed >= 0.0)) throw PlanError("speed must be ≥ 0");
  DragEstimate d;
  d.per_finger_force = 6.0 * std::numbers::pi * r.dynamic_viscosity * s.finger_radius * speed;
  d.total_force = s.finger_count * d.per_finger_force;
  for (double offset : s.finger_offsets) d.required_torque += d.per_finger_force * offset;
  return d;
}

struct FeasibilityReport {
  bool pass{false};
  double required_torque{0.0};
  double available_torque{0.0};  // safety_factor × holding torque
  double margin() const { return available_torque - required_torque; }
};

inline FeasibilityReport motor_feasibility(const DragEstimate& d, double holding_torque, double safety_factor = 0.5) {
  FeasibilityReport r;
  r.required_torque = d.required_torque;
  r.available_torque = safety_factor * holding_torque;
  r.pass = r.required_torque <= r.available_torque;
  return r;
}

}  // namespace smartlid::planner
