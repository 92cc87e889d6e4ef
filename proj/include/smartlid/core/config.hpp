#pragma once

#include <string>
#include <string_view>

#include "smartlid/core/keyvalue.hpp"
#include "smartlid/core/time.hpp"
#include "smartlid/core/types.hpp"
#include "smartlid/kinematics/corexy.hpp"

namespace smartlid {

enum class PathMode { kRaster, kSpiral, kTargeted };

inline std::string_view to_string(PathMode m) {
  switch (m) {
    case PathMode::kRaster: return "raster";
    case PathMode::kSpiral: return "spiral";
    case PathMode::kTargeted: return "targeted";
  }
  return "raster";
}

inline std::optional<PathMode> parse_path_mode(std::string_view s) {
  if (s == "raster") return PathMode::kRaster;
  if (s == "spiral") return PathMode::kSpiral;
  if (s == "targeted") return PathMode::kTargeted;
  return std::nullopt;
}

struct ScheduleSettings {
  TimeOfDay aeration_time{11, 0};
  int utc_offset_minutes{0};       // local time = UTC + offset
  double sample_interval_s{300.0};  // one SensorFrame per interval while idle
  double endstop_timeout_s{120.0};
  double rapid_speed{0.05};  // m/s, retracted travel (homing / returning)
  double z_speed{0.008};     // m/s, lead screw plunge / retract

  friend bool operator==(const ScheduleSettings&, const ScheduleSettings&) = default;
};

struct PlannerSettings {
  PathMode path_mode{PathMode::kRaster};
  double raster_pitch{0.08};
  double time_budget_s{60.0};
  double travel_speed{0.032};  // m/s while mixing
  double spiral_radius{0.05};
  int spiral_turns{3};
  double targeted_k{1.0};  // spiral radius = k * sqrt(area_px) * pixel pitch
  double safety_factor{0.5};

  friend bool operator==(const PlannerSettings&, const PlannerSettings&) = default;
};

struct VisionSettings {
  double t_lo{20.0};  // °C mapped to 0
  double t_hi{45.0};  // °C mapped to 255
  int min_component_area{25};
  int mix_delta{20};  // intensity change (of 255) that marks a pixel as mixed

  friend bool operator==(const VisionSettings&, const VisionSettings&) = default;
};

struct Config {
  BinGeometry bin{};
  SpindleSpec spindle{};
  SubstrateRheology substrate{};
  kinematics::MotorSpec motor{};
  ScheduleSettings schedule{};
  PlannerSettings planner{};
  VisionSettings vision{};

  friend bool operator==(const Config&, const Config&) = default;

  void validate() const {
    bin.validate();
    spindle.validate(bin);
    substrate.validate();
    motor.validate();
    if (!(planner.raster_pitch > 0.0)) throw InvariantError("raster_pitch must be > 0");
    if (!(planner.time_budget_s > 0.0)) throw InvariantError("time_budget must be > 0");
    if (!(planner.travel_speed > 0.0)) throw InvariantError("travel_speed must be > 0");
    if (!(planner.spiral_radius > 0.0)) throw InvariantError("spiral_radius must be > 0");
    if (planner.spiral_turns < 1) throw InvariantError("spiral_turns must be ≥ 1");
    if (!(planner.targeted_k > 0.0)) throw InvariantError("targeted_k must be > 0");
    if (!(planner.safety_factor > 0.0)) throw InvariantError("safety_factor must be > 0");
    if (!(schedule.sample_interval_s > 0.0)) throw InvariantError("sample_interval must be > 0");
    if (!(schedule.endstop_timeout_s > 0.0)) throw InvariantError("endstop_timeout must be > 0");
    if (!(schedule.rapid_speed > 0.0) || !(schedule.z_speed > 0.0))
      throw InvariantError("rapid_speed and z_speed must be > 0");
    if (!(vision.t_lo < vision.t_hi)) throw InvariantError("t_lo must be < t_hi");
    if (vision.min_component_area < 0) throw InvariantError("min_component_area must be ≥ 0");
    if (vision.mix_delta < 0 || vision.mix_delta > 255) throw InvariantError("mix_delta must be in [0, 255]");
  }
};

// Reads every known field from `doc`; anything missing keeps its default.
// Unknown fields and invariant violations raise ConfigError naming the field.
inline Config config_from_doc(const KeyValueDoc& doc) {
  Config c;
  auto& b = c.bin;
  b.x_len = doc.get_number("bin.x_len", b.x_len, Dimension::kLength);
  b.y_len = doc.get_number("bin.y_len", b.y_len, Dimension::kLength);
  b.z_depth = doc.get_number("bin.z_depth", b.z_depth, Dimension::kLength);
  b.margin = doc.get_number("bin.margin", b.margin, Dimension::kLength);

  auto& s = c.spindle;
  s.finger_count = static_cast<int>(doc.get_int("spindle.finger_count", s.finger_count));
  s.finger_radius = doc.get_number("spindle.finger_radius", s.finger_radius, Dimension::kLength);
  s.finger_offsets = doc.get_list("spindle.finger_offsets", s.finger_offsets, Dimension::kLength);
  s.spin_rate = doc.get_number("spindle.spin_rate", s.spin_rate, Dimension::kRate);
  s.plunge_depth = doc.get_number("spindle.plunge_depth", s.plunge_depth, Dimension::kLength);

  c.substrate.dynamic_viscosity =
      doc.get_number("substrate.viscosity", c.substrate.dynamic_viscosity, Dimension::kViscosity);

  auto& m = c.motor;
  m.steps_per_rev = static_cast<int>(doc.get_int("motor.steps_per_rev", m.steps_per_rev));
  m.pulley_circumference = doc.get_number("motor.pulley_circumference", m.pulley_circumference, Dimension::kLength);
  m.lead_screw_pitch = doc.get_number("motor.lead_screw_pitch", m.lead_screw_pitch, Dimension::kLength);
  m.holding_torque = doc.get_number("motor.holding_torque", m.holding_torque, Dimension::kTorque);

  auto& p = c.planner;
  if (doc.has("planner.path_mode")) {
    const auto mode = parse_path_mode(doc.get_string("planner.path_mode", ""));
    if (!mode) doc.field_error("planner.path_mode", "expected raster, spiral or targeted");
    p.path_mode = *mode;
  }
  p.raster_pitch = doc.get_number("planner.raster_pitch", p.raster_pitch, Dimension::kLength);
  p.time_budget_s = doc.get_number("planner.time_budget", p.time_budget_s, Dimension::kTime);
  p.travel_speed = doc.get_number("planner.travel_speed", p.travel_speed, Dimension::kSpeed);
  p.spiral_radius = doc.get_number("planner.spiral_radius", p.spiral_radius, Dimension::kLength);
  p.spiral_turns = static_cast<int>(doc.get_int("planner.spiral_turns", p.spiral_turns));
  p.targeted_k = doc.get_number("planner.targeted_k", p.targeted_k);
  p.safety_factor = doc.get_number("planner.safety_factor", p.safety_factor);

  auto& sc = c.schedule;
  if (doc.has("schedule.aeration_time")) {
    const auto t = TimeOfDay::parse(doc.get_string("schedule.aeration_time", ""));
    if (!t) doc.field_error("schedule.aeration_time", "expected HH:MM");
    sc.aeration_time = *t;
  }
  sc.utc_offset_minutes = static_cast<int>(doc.get_int("schedule.utc_offset_minutes", sc.utc_offset_minutes));
  sc.sample_interval_s = doc.get_number("schedule.sample_interval", sc.sample_interval_s, Dimension::kTime);
  sc.endstop_timeout_s = doc.get_number("schedule.endstop_timeout", sc.endstop_timeout_s, Dimension::kTime);
  sc.rapid_speed = doc.get_number("schedule.rapid_speed", sc.rapid_speed, Dimension::kSpeed);
  sc.z_speed = doc.get_number("schedule.z_speed", sc.z_speed, Dimension::kSpeed);

  auto& v = c.vision;
  v.t_lo = doc.get_number("vision.t_lo", v.t_lo, Dimension::kTemperature);
  v.t_hi = doc.get_number("vision.t_hi", v.t_hi, Dimension::kTemperature);
  v.min_component_area = static_cast<int>(doc.get_int("vision.min_component_area", v.min_component_area));
  v.mix_delta = static_cast<int>(doc.get_int("vision.mix_delta", v.mix_delta));

  doc.check_all_used();
  try {
    c.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(doc.source() + ": " + e.what());
  }
  return c;
}

inline Config parse_config(std::string_view text, std::string source = "<string>") {
  return config_from_doc(KeyValueDoc::parse(text, std::move(source)));
}

inline Config load_config(const std::string& path) { return config_from_doc(KeyValueDoc::load(path)); }

}  // namespace smartlid
