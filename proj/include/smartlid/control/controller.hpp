#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smartlid/control/schedule.hpp"
#include "smartlid/core/config.hpp"
#include "smartlid/kinematics/corexy.hpp"
#include "smartlid/planner/toolpath.hpp"
#include "smartlid/sim/gantry.hpp"

namespace smartlid::control {

enum class Mode { kIdle, kAerating, kSensing, kFault };
enum class Phase { kNone, kHoming, kPlunging, kMixing, kRetracting, kReturning };
enum class Action { kStartAeration, kLogFrame, kEmitTelemetry };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kIdle: return "IDLE";
    case Mode::kAerating: return "AERATING";
    case Mode::kSensing: return "SENSING";
    case Mode::kFault: return "FAULT";
  }
  return "IDLE";
}

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kNone: return "NONE";
    case Phase::kHoming: return "HOMING";
    case Phase::kPlunging: return "PLUNGING";
    case Phase::kMixing: return "MIXING";
    case Phase::kRetracting: return "RETRACTING";
    case Phase::kReturning: return "RETURNING";
  }
  return "NONE";
}

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::kStartAeration: return "START_AERATION";
    case Action::kLogFrame: return "LOG_FRAME";
    case Action::kEmitTelemetry: return "EMIT_TELEMETRY";
  }
  return "?";
}

enum class CommandKind { kAerateNow, kSetSchedule, kSetPathMode, kStop };

struct Command {
  CommandKind kind{CommandKind::kAerateNow};
  TimeOfDay schedule{};
  PathMode path_mode{PathMode::kRaster};

  static Command aerate_now() { return {CommandKind::kAerateNow, {}, {}}; }
  static Command stop() { return {CommandKind::kStop, {}, {}}; }
  static Command set_schedule(TimeOfDay t) { return {CommandKind::kSetSchedule, t, {}}; }
  static Command set_path_mode(PathMode m) { return {CommandKind::kSetPathMode, {}, m}; }
};

// The serialized boundary through which other threads reach the controller.
class CommandQueue {
 public:
  void push(Command c) {
    std::lock_guard lock(mu_);
    queue_.push_back(c);
  }
  std::optional<Command> try_pop() {
    std::lock_guard lock(mu_);
    if (queue_.empty()) return std::nullopt;
    Command c = queue_.front();
    queue_.pop_front();
    return c;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return queue_.size();
  }

 private:
  mutable std::mutex mu_;
  std::deque<Command> queue_;
};

struct ControllerState {
  Mode mode{Mode::kIdle};
  Phase phase{Phase::kNone};
  DailySchedule schedule{};
  PathMode path_mode{PathMode::kRaster};
  std::optional<double> last_aeration;
  std::optional<double> last_sample;
  double now{0.0};
  std::string fault_cause;
  std::string env_alert;  // out-of-range sensor readings; informational only
  std::size_t rejected_commands{0};
};

struct TickResult {
  bool transitioned{false};
  Mode mode{Mode::kIdle};
  Phase phase{Phase::kNone};
  std::vector<Action> actions;

  bool has(Action a) const { return std::find(actions.begin(), actions.end(), a) != actions.end(); }
};

// One entry per state-machine transition, for traces and tests.
struct Transition {
  double t{0.0};
  Mode mode{Mode::kIdle};
  Phase phase{Phase::kNone};
};

// Supplies the path for the next aeration in the requested mode.
using PathSource = std::function<planner::ToolPath(PathMode)>;

// Rearing state machine: scheduled and on-demand aeration, periodic sensing,
// fault handling. Advanced only by tick(); one transition at most per tick.
//
// IDLE --due/AERATE_NOW--> AERATING(HOMING → PLUNGING → MIXING → RETRACTING → RETURNING) --end stop--> IDLE
// IDLE --sample due--> SENSING --> IDLE
// any aeration phase --driver error / end-stop timeout--> FAULT --STOP + re-home--> IDLE
class Controller {
 public:
  Controller(const Config& config, sim::GantryDriver& gantry, PathSource paths)
      : config_(config), gantry_(gantry), paths_(std::move(paths)), quantizer_(config.motor) {
    state_.schedule = {config.schedule.aeration_time, config.schedule.utc_offset_minutes};
    state_.path_mode = config.planner.path_mode;
  }

  const ControllerState& state() const { return state_; }
  CommandQueue& commands() { return commands_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const planner::ToolPath& current_path() const { return path_; }
  // Points the spindle has actually been dragged through in the current (or last) aeration.
  const std::vector<Point2>& mixed_route() const { return mixed_; }

  TickResult tick(double now, const SensorFrame* latest = nullptr) {
    state_.now = std::max(state_.now, now);
    now = state_.now;
    TickResult r;
    if (latest) check_environment(*latest);

    if (auto cmd = commands_.try_pop()) {
      handle_command(*cmd, now, r);
      if (r.transitioned) return finish(r);
    }

    switch (state_.mode) {
      case Mode::kIdle:
        if (schedule_due(state_.schedule, state_.last_aeration, now)) {
          start_aeration(now, r);
        } else if (sample_due(now)) {
          state_.last_sample = now;
          enter(now, Mode::kSensing, Phase::kNone, r);
          r.actions.push_back(Action::kLogFrame);
        }
        break;
      case Mode::kSensing:
        enter(now, Mode::kIdle, Phase::kNone, r);
        break;
      case Mode::kAerating:
        advance_aeration(now, r);
        break;
      case Mode::kFault:
        break;
    }
    return finish(r);
  }

  // When the caller should tick next, assuming no commands arrive.
  double next_tick_hint() const {
    const double now = state_.now;
    if (state_.mode == Mode::kAerating || state_.mode == Mode::kSensing) return now + kActiveTick;
    const double interval = config_.schedule.sample_interval_s;
    double next = (std::floor(now / interval) + 1.0) * interval;
    double trigger = state_.schedule.trigger_on_day_of(now);
    if (trigger <= now) trigger = state_.schedule.trigger_on_day_of(now + kSecondsPerDay);
    if (state_.mode == Mode::kIdle) next = std::min(next, trigger);
    return next;
  }

  static constexpr double kActiveTick = 1.0;

 private:
  bool sample_due(double now) const {
    if (!state_.last_sample) return true;
    const double interval = config_.schedule.sample_interval_s;
    return std::floor(now / interval) > std::floor(*state_.last_sample / interval);
  }

  void check_environment(const SensorFrame& f) {
    std::string alert;
    if (f.temperature < 15.0 || f.temperature > 40.0) alert += "temperature ";
    if (f.moisture < 0.3) alert += "moisture ";
    if (f.ph < 6.0 || f.ph > 9.0) alert += "ph ";
    if (!alert.empty()) alert.pop_back();
    state_.env_alert = alert;
  }

  void handle_command(const Command& c, double now, TickResult& r) {
    switch (c.kind) {
      case CommandKind::kAerateNow:
        if (state_.mode == Mode::kIdle || state_.mode == Mode::kSensing) start_aeration(now, r);
        else ++state_.rejected_commands;
        break;
      case CommandKind::kSetSchedule:
        state_.schedule.time = c.schedule;
        r.actions.push_back(Action::kEmitTelemetry);
        break;
      case CommandKind::kSetPathMode:
        state_.path_mode = c.path_mode;
        r.actions.push_back(Action::kEmitTelemetry);
        break;
      case CommandKind::kStop:
        stop(now, r);
        break;
    }
  }

  void stop(double now, TickResult& r) {
    if (state_.mode == Mode::kFault) {
      try {
        gantry_.rehome(now);
      } catch (const Error& e) {
        state_.fault_cause = std::string("re-home failed: ") + e.what();
        return;
      }
      if (gantry_.end_stops_closed()) {
        state_.fault_cause.clear();
        enter(now, Mode::kIdle, Phase::kNone, r);
      }
      return;
    }
    if (state_.mode != Mode::kAerating) return;
    guarded(now, r, [&] {
      switch (state_.phase) {
        case Phase::kHoming:
          begin_returning(now, r);
          break;
        case Phase::kPlunging:
        case Phase::kMixing:
          begin_retracting(now, r);
          break;
        default:
          break;  // already on the way out
      }
    });
  }

  void start_aeration(double now, TickResult& r) {
    state_.last_aeration = now;
    path_ = paths_(state_.path_mode);
    mixed_.clear();
    quantizer_ = kinematics::StepQuantizer(config_.motor);
    r.actions.push_back(Action::kStartAeration);
    enter(now, Mode::kAerating, Phase::kHoming, r);
    guarded(now, r, [&] {
      phase_started_ = now;
      phase_ends_ = gantry_.end_stops_closed() ? now : now + gantry_.go_home(now, config_.schedule.rapid_speed);
    });
  }

  void advance_aeration(double now, TickResult& r) {
    guarded(now, r, [&] {
      switch (state_.phase) {
        case Phase::kHoming:
          if (now < phase_ends_) break;
          if (gantry_.end_stops_closed()) {
            enter(now, Mode::kAerating, Phase::kPlunging, r);
            phase_started_ = now;
            phase_ends_ = now + gantry_.plunge(now, path_.plunge_depth, config_.schedule.z_speed);
          } else if (now - phase_started_ >= config_.schedule.endstop_timeout_s) {
            fault(now, "end stop not reached while homing", r);
          }
          break;
        case Phase::kPlunging:
          if (now < phase_ends_) break;
          begin_mixing(now, r);
          break;
        case Phase::kMixing:
          stream(now);
          if (next_waypoint_ >= route_.size()) begin_retracting(now, r);
          break;
        case Phase::kRetracting:
          if (now >= phase_ends_) begin_returning(now, r);
          break;
        case Phase::kReturning:
          if (now >= phase_ends_ && gantry_.end_stops_closed()) {
            enter(now, Mode::kIdle, Phase::kNone, r);
          } else if (now - phase_started_ >= config_.schedule.endstop_timeout_s) {
            fault(now, "end stop not confirmed on return to home", r);
          }
          break;
        case Phase::kNone:
          break;
      }
    });
  }

  void begin_mixing(double now, TickResult& r) {
    enter(now, Mode::kAerating, Phase::kMixing, r);
    gantry_.spindle(now, true, path_.spindle_spin_rate);
    const sim::Pose p = gantry_.pose();
    route_.assign(1, Point2{p.x, p.y});
    route_.insert(route_.end(), path_.waypoints.begin(), path_.waypoints.end());
    arc_.assign(route_.size(), 0.0);
    for (std::size_t k = 1; k < route_.size(); ++k) arc_[k] = arc_[k - 1] + distance(route_[k - 1], route_[k]);
    mixed_.assign(1, route_.front());
    next_waypoint_ = 1;
    phase_started_ = now;
    stream(now);
  }

  // Sends every waypoint the carriage has reached by `now` through the
  // kinematics to the gantry as step commands.
  void stream(double now) {
    const double traveled = (now - phase_started_) * path_.travel_speed;
    while (next_waypoint_ < route_.size() && arc_[next_waypoint_] <= traveled + 1e-12) {
      const Point2& from = route_[next_waypoint_ - 1];
      const Point2& to = route_[next_waypoint_];
      if (distance(from, to) > 1e-12) {
        gantry_.move_steps(phase_started_ + arc_[next_waypoint_ - 1] / path_.travel_speed,
                           quantizer_.move({to.x - from.x, to.y - from.y}));
        mixed_.push_back(to);
      }
      ++next_waypoint_;
    }
  }

  void begin_retracting(double now, TickResult& r) {
    enter(now, Mode::kAerating, Phase::kRetracting, r);
    gantry_.spindle(now, false, 0.0);
    phase_started_ = now;
    phase_ends_ = now + gantry_.retract(now, config_.schedule.z_speed);
    next_waypoint_ = route_.size();
  }

  void begin_returning(double now, TickResult& r) {
    enter(now, Mode::kAerating, Phase::kReturning, r);
    phase_started_ = now;
    phase_ends_ = now + gantry_.go_home(now, config_.schedule.rapid_speed);
  }

  void fault(double now, std::string cause, TickResult& r) {
    state_.fault_cause = std::move(cause);
    enter(now, Mode::kFault, Phase::kNone, r);
  }

  template <typename Fn>
  void guarded(double now, TickResult& r, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      fault(now, e.what(), r);
    }
  }

  void enter(double now, Mode m, Phase p, TickResult& r) {
    state_.mode = m;
    state_.phase = p;
    r.transitioned = true;
    transitions_.push_back({now, m, p});
  }

  TickResult& finish(TickResult& r) {
    r.mode = state_.mode;
    r.phase = state_.phase;
    if (r.transitioned && !r.has(Action::kEmitTelemetry)) r.actions.push_back(Action::kEmitTelemetry);
    return r;
  }

  Config config_;
  sim::GantryDriver& gantry_;
  PathSource paths_;
  CommandQueue commands_;
  ControllerState state_;
  std::vector<Transition> transitions_;

  planner::ToolPath path_;
  kinematics::StepQuantizer quantizer_;
  std::vector<Point2> route_;
  std::vector<double> arc_;
  std::vector<Point2> mixed_;
  std::size_t next_waypoint_{0};
  double phase_started_{0.0};
  double phase_ends_{0.0};
};

}  // namespace smartlid::control
