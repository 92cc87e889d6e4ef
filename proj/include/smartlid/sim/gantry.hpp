#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "smartlid/core/types.hpp"
#include "smartlid/kinematics/corexy.hpp"
#include "smartlid/planner/toolpath.hpp"

namespace smartlid::sim {

class GantryError : public Error {
 public:
  using Error::Error;
};

struct Pose {
  double x{0.0};
  double y{0.0};
  double z{0.0};  // plunge depth, positive down
  friend constexpr bool operator==(const Pose&, const Pose&) = default;
};

enum class GantryEventKind { kPlunge, kSpinOn, kMove, kSpinOff, kRetract, kEndStop, kHome };

inline std::string_view to_string(GantryEventKind k) {
  switch (k) {
    case GantryEventKind::kPlunge: return "PLUNGE";
    case GantryEventKind::kSpinOn: return "SPIN_ON";
    case GantryEventKind::kMove: return "MOVE";
    case GantryEventKind::kSpinOff: return "SPIN_OFF";
    case GantryEventKind::kRetract: return "RETRACT";
    case GantryEventKind::kEndStop: return "ENDSTOP";
    case GantryEventKind::kHome: return "HOME";
  }
  return "?";
}

struct GantryEvent {
  double t{0.0};
  GantryEventKind kind{GantryEventKind::kMove};
  std::string args;
};

// "t_event EVENT args"
inline std::string format_event(const GantryEvent& e) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f ", e.t);
  std::string out = buf;
  out += to_string(e.kind);
  if (!e.args.empty()) out += " " + e.args;
  return out;
}

// What the controller needs from a three-axis gantry with a spindle and
// home-side end stops. Durations are returned so a caller driven by a clock
// knows when each motion completes.
class GantryDriver {
 public:
  virtual ~GantryDriver() = default;
  virtual Pose pose() const = 0;
  virtual bool spindle_spinning() const = 0;
  virtual bool end_stops_closed() const = 0;
  virtual double plunge(double now, double depth, double z_speed) = 0;
  virtual double retract(double now, double z_speed) = 0;
  virtual void spindle(double now, bool on, double rate) = 0;
  virtual void move_steps(double now, const kinematics::StepCommand& cmd) = 0;
  virtual double go_home(double now, double speed) = 0;  // retracted travel onto the end stops
  virtual void rehome(double now) = 0;                   // operator-assisted reset after a fault
};

// Simulated CoreXY gantry. Carriage limits are the bin's working area in X/Y
// and [0, z_depth] in Z; home is (margin, margin, 0) where all three end stops
// close.
class VirtualGantry final : public GantryDriver {
 public:
  VirtualGantry(BinGeometry bin, kinematics::MotorSpec motor)
      : bin_(bin), motor_(motor), pose_{bin.margin, bin.margin, 0.0} {}

  Pose pose() const override { return pose_; }
  Pose home() const { return {bin_.margin, bin_.margin, 0.0}; }
  bool spindle_spinning() const override { return spinning_; }

  bool end_stop_x() const { return !endstop_broken_ && std::abs(pose_.x - bin_.margin) <= kTol; }
  bool end_stop_y() const { return !endstop_broken_ && std::abs(pose_.y - bin_.margin) <= kTol; }
  bool end_stop_z() const { return !endstop_broken_ && std::abs(pose_.z) <= kTol; }
  bool end_stops_closed() const override { return end_stop_x() && end_stop_y() && end_stop_z(); }
  bool homed() const { return end_stops_closed() && !spinning_; }

  // Test hook: the end stops stop reporting once the carriage next leaves home.
  void inject_endstop_failure() { fail_on_departure_ = true; }

  const std::vector<GantryEvent>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

  double plunge(double now, double depth, double z_speed) override {
    if (!(depth > 0.0) || depth > bin_.z_depth) throw GantryError("plunge depth outside mechanical limits");
    const double dur = std::abs(depth - pose_.z) / z_speed;
    depart();
    pose_.z = depth;
    record(now, GantryEventKind::kPlunge, fmt("%.6f", depth));
    return dur;
  }

  double retract(double now, double z_speed) override {
    const double dur = pose_.z / z_speed;
    pose_.z = 0.0;
    record(now, GantryEventKind::kRetract, "");
    return dur;
  }

  void spindle(double now, bool on, double rate) override {
    if (on == spinning_) return;
    spinning_ = on;
    record(now, on ? GantryEventKind::kSpinOn : GantryEventKind::kSpinOff, on ? fmt("%.3f", rate) : "");
  }

  void move_steps(double now, const kinematics::StepCommand& cmd) override {
    const double step = motor_.step_length();
    const auto d = kinematics::belts_to_cartesian(
        {static_cast<double>(cmd.steps_a) * step, static_cast<double>(cmd.steps_b) * step});
    const Pose next{pose_.x + d.delta_x, pose_.y + d.delta_y, pose_.z};
    const double tol = step;
    if (next.x < bin_.work_x_min() - tol || next.x > bin_.work_x_max() + tol || next.y < bin_.work_y_min() - tol ||
        next.y > bin_.work_y_max() + tol)
      throw GantryError("move outside mechanical limits");
    if (cmd.steps_a != 0 || cmd.steps_b != 0) depart();
    pose_ = next;
    record(now, GantryEventKind::kMove, fmt("%.6f %.6f", pose_.x, pose_.y));
  }

  double go_home(double now, double speed) override {
    if (pose_.z > kTol) throw GantryError("cannot travel home while plunged");
    const double dur = std::hypot(pose_.x - bin_.margin, pose_.y - bin_.margin) / speed;
    pose_ = home();
    if (end_stops_closed()) {
      record(now + dur, GantryEventKind::kEndStop, "");
      record(now + dur, GantryEventKind::kHome, "");
    }
    return dur;
  }

  void rehome(double now) override {
    spinning_ = false;
    endstop_broken_ = false;
    fail_on_departure_ = false;
    pose_ = home();
    record(now, GantryEventKind::kEndStop, "");
    record(now, GantryEventKind::kHome, "");
  }

 private:
  static constexpr double kTol = 1e-9;

  void depart() {
    if (fail_on_departure_) endstop_broken_ = true;
  }

  void record(double t, GantryEventKind k, std::string args) { trace_.push_back({t, k, std::move(args)}); }

  template <typename... Args>
  static std::string fmt(const char* f, Args... args) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
  }

  BinGeometry bin_;
  kinematics::MotorSpec motor_;
  Pose pose_;
  bool spinning_{false};
  bool endstop_broken_{false};
  bool fail_on_departure_{false};
  std::vector<GantryEvent> trace_;
};

struct GantryTiming {
  double z_speed{0.008};
  double rapid_speed{0.05};
};

// Runs a whole aeration pass on a homed gantry and returns its event trace:
// PLUNGE, SPIN_ON, one MOVE per segment (plus one from home when the path does
// not start there), SPIN_OFF, RETRACT, then ENDSTOP and HOME on arrival.
inline std::vector<GantryEvent> gantry_execute(VirtualGantry& g, const planner::ToolPath& path,
                                               const BinGeometry& bin, const kinematics::MotorSpec& motor,
                                               const GantryTiming& timing = {}) {
  if (!g.homed()) throw GantryError("gantry not homed");
  try {
    planner::validate(path, bin);
  } catch (const planner::PlanError& e) {
    throw GantryError(std::string("path outside mechanical limits: ") + e.what());
  }
  const std::size_t first_event = g.trace().size();
  double t = 0.0;
  t += g.plunge(t, path.plunge_depth, timing.z_speed);
  g.spindle(t, true, path.spindle_spin_rate);
  kinematics::StepQuantizer q(motor);
  Point2 at{g.pose().x, g.pose().y};
  for (const auto& w : path.waypoints) {
    const double len = distance(at, w);
    if (len <= 1e-12) continue;
    g.move_steps(t, q.move({w.x - at.x, w.y - at.y}));
    t += len / path.travel_speed;
    at = w;
  }
  g.spindle(t, false, 0.0);
  t += g.retract(t, timing.z_speed);
  g.go_home(t, timing.rapid_speed);
  return {g.trace().begin() + static_cast<std::ptrdiff_t>(first_event), g.trace().end()};
}

}  // namespace smartlid::sim
