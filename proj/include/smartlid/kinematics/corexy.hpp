#pragma once

#include <cmath>
#include <cstdint>

#include "smartlid/core/types.hpp"

// CoreXY belt/Cartesian transforms and stepper quantization.
//
// The two motors are stationary; each drives one belt. A carriage displacement
// needs both belts to move:
//
//   dX = (dA + dB) / 2        dA = dX + dY
//   dY = (dA - dB) / 2        dB = dX - dY
//
// Z is a lead screw. Body-frame Z points down into the substrate, so plunge
// depths are positive.
namespace smartlid::kinematics {

struct BeltDelta {
  double delta_a{0.0};
  double delta_b{0.0};
  friend constexpr bool operator==(const BeltDelta&, const BeltDelta&) = default;
};

struct CartesianDelta {
  double delta_x{0.0};
  double delta_y{0.0};
  friend constexpr bool operator==(const CartesianDelta&, const CartesianDelta&) = default;
};

struct MotorSpec {
  int steps_per_rev{200};
  double pulley_circumference{0.040};  // GT2, 20 teeth x 2 mm
  double lead_screw_pitch{0.008};      // m per rev
  double holding_torque{0.20};         // N·m

  friend bool operator==(const MotorSpec&, const MotorSpec&) = default;

  double step_length() const { return pulley_circumference / steps_per_rev; }

  void validate() const {
    if (steps_per_rev <= 0) throw InvariantError("steps_per_rev must be > 0");
    if (!(pulley_circumference > 0.0)) throw InvariantError("pulley_circumference must be > 0");
    if (!(lead_screw_pitch > 0.0)) throw InvariantError("lead_screw_pitch must be > 0");
    if (!(holding_torque > 0.0)) throw InvariantError("holding_torque must be > 0");
  }
};

constexpr CartesianDelta belts_to_cartesian(const BeltDelta& b) {
  return {0.5 * (b.delta_a + b.delta_b), 0.5 * (b.delta_a - b.delta_b)};
}

constexpr BeltDelta cartesian_to_belts(const CartesianDelta& c) {
  return {c.delta_x + c.delta_y, c.delta_x - c.delta_y};
}

struct StepCommand {
  std::int64_t steps_a{0};
  std::int64_t steps_b{0};
  CartesianDelta residual{};  // commanded travel the integer steps could not represent
};

// Rounds each belt's travel to whole steps, half away from zero. The residual
// is at most half a step per belt; callers that chain moves should carry it
// into the next move (see StepQuantizer).
inline StepCommand cartesian_to_steps(const CartesianDelta& c, const MotorSpec& m) {
  const double step = m.step_length();
  const BeltDelta belts = cartesian_to_belts(c);
  StepCommand out;
  out.steps_a = static_cast<std::int64_t>(std::round(belts.delta_a / step));
  out.steps_b = static_cast<std::int64_t>(std::round(belts.delta_b / step));
  const BeltDelta left{belts.delta_a - static_cast<double>(out.steps_a) * step,
                       belts.delta_b - static_cast<double>(out.steps_b) * step};
  out.residual = belts_to_cartesian(left);
  return out;
}

// Streams Cartesian moves into step counts, carrying the quantization residual
// so that emitted steps plus the carried residual always equal the total
// commanded travel.
class StepQuantizer {
 public:
  explicit StepQuantizer(MotorSpec motor) : motor_(motor) {}

  StepCommand move(const CartesianDelta& c) {
    const CartesianDelta want{c.delta_x + carry_.delta_x, c.delta_y + carry_.delta_y};
    StepCommand cmd = cartesian_to_steps(want, motor_);
    carry_ = cmd.residual;
    total_a_ += cmd.steps_a;
    total_b_ += cmd.steps_b;
    return cmd;
  }

  const CartesianDelta& carry() const { return carry_; }
  std::int64_t total_steps_a() const { return total_a_; }
  std::int64_t total_steps_b() const { return total_b_; }

  // Carriage displacement represented by all steps emitted so far.
  CartesianDelta emitted_travel() const {
    const double step = motor_.step_length();
    return belts_to_cartesian({static_cast<double>(total_a_) * step, static_cast<double>(total_b_) * step});
  }

 private:
  MotorSpec motor_;
  CartesianDelta carry_{};
  std::int64_t total_a_{0};
  std::int64_t total_b_{0};
};

inline double z_to_turns(double depth, const MotorSpec& m) {
  if (!(depth >= 0.0)) throw InvariantError("depth must be ≥ 0");
  return depth / m.lead_screw_pitch;
}

}  // namespace smartlid::kinematics
