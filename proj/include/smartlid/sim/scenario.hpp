#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smartlid/control/controller.hpp"
#include "smartlid/control/logger.hpp"
#include "smartlid/core/config.hpp"
#include "smartlid/core/keyvalue.hpp"
#include "smartlid/planner/raster.hpp"
#include "smartlid/planner/spiral.hpp"
#include "smartlid/sim/gantry.hpp"
#include "smartlid/sim/observe.hpp"
#include "smartlid/sim/substrate.hpp"
#include "smartlid/vision/pipeline.hpp"

// Closed-loop run: controller + virtual gantry + synthetic substrate + sensors.
namespace smartlid::sim {

// Scenario file (key/value, no sections):
//
//   initial_mass = 50        # grams of larvae at start
//   seed = 7
//   growth_per_day = 0.1919  # ln-rate; default gives ×10 over 12 days
//   days = 10
//   start = 2026-01-01T00:00:00Z
//   clusters = 4
//   cell = 5 mm
//   config = default.conf    # relative to the scenario file
struct Scenario {
  double initial_mass{50.0};
  std::uint64_t seed{1};
  double growth_per_day{std::log(10.0) / 12.0};
  int days{10};
  std::int64_t start{1767225600};  // 2026-01-01T00:00:00Z
  int clusters{4};
  double cell{0.005};
  std::string config_path;
};

inline Scenario scenario_from_doc(const KeyValueDoc& doc, const std::string& base_dir = {}) {
  Scenario s;
  s.initial_mass = doc.get_number("initial_mass", s.initial_mass);
  s.seed = static_cast<std::uint64_t>(doc.get_int("seed", static_cast<long long>(s.seed)));
  s.growth_per_day = doc.get_number("growth_per_day", s.growth_per_day);
  s.days = static_cast<int>(doc.get_int("days", s.days));
  if (doc.has("start")) {
    const auto t = parse_iso8601(doc.get_string("start", ""));
    if (!t) doc.field_error("start", "expected ISO-8601 UTC timestamp like 2026-01-01T00:00:00Z");
    s.start = *t;
  }
  s.clusters = static_cast<int>(doc.get_int("clusters", s.clusters));
  s.cell = doc.get_number("cell", s.cell, Dimension::kLength);
  if (doc.has("config")) {
    std::filesystem::path p = doc.get_string("config", "");
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    s.config_path = p.string();
  }
  doc.check_all_used();
  if (!(s.initial_mass > 0.0)) doc.field_error("initial_mass", "must be > 0");
  if (s.days < 0) doc.field_error("days", "must be ≥ 0");
  if (s.clusters < 0) doc.field_error("clusters", "must be ≥ 0");
  if (!(s.cell > 0.0)) doc.field_error("cell", "must be > 0");
  if (!(s.growth_per_day >= 0.0)) doc.field_error("growth_per_day", "must be ≥ 0");
  return s;
}

inline Scenario parse_scenario(std::string_view text, std::string source = "<string>") {
  return scenario_from_doc(KeyValueDoc::parse(text, std::move(source)));
}

inline Scenario load_scenario(const std::string& path) {
  return scenario_from_doc(KeyValueDoc::load(path), std::filesystem::path(path).parent_path().string());
}

struct AerationRecord {
  double started{0.0};
  double mixed_until{0.0};
  PathMode mode{PathMode::kRaster};
  double dispersal_before{0.0};
  double dispersal_after{0.0};
  double coverage{0.0};  // fraction of cells swept
  vision::MixReport mix{};
  bool completed{false};  // reached IDLE again
};

class ClosedLoop {
 public:
  ClosedLoop(Config config, Scenario scenario)
      : config_(std::move(config)),
        scenario_(std::move(scenario)),
        gantry_(config_.bin, config_.motor),
        controller_(config_, gantry_, [this](PathMode m) { return plan(m); }),
        substrate_(SubstrateState::clustered(config_.bin, scenario_.cell, scenario_.initial_mass, scenario_.clusters,
                                             scenario_.seed)),
        rng_(mix_seed(scenario_.seed, 0xB10)),
        now_(static_cast<double>(scenario_.start)),
        biology_time_(now_) {
    biology_.growth_per_hour = scenario_.growth_per_day / 24.0;
    refresh_vision();
  }

  ClosedLoop(const ClosedLoop&) = delete;
  ClosedLoop& operator=(const ClosedLoop&) = delete;

  // Routes the sensor log to a file; call before the first tick.
  void log_to(const std::string& path) { log_ = control::CsvLog(path); }

  double now() const { return now_; }
  double next_tick() const { return controller_.next_tick_hint(); }

  control::TickResult tick(double now) {
    now_ = std::max(now_, now);
    const control::Phase phase_before = controller_.state().phase;
    if (controller_.state().mode != control::Mode::kAerating) advance_biology(now_);

    const auto r = controller_.tick(now_, latest_frame_ ? &*latest_frame_ : nullptr);
    const auto& st = controller_.state();
    if (r.has(control::Action::kStartAeration)) begin_record();
    if (phase_before == control::Phase::kMixing && st.phase != control::Phase::kMixing) finish_mixing();
    if (r.transitioned) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3f ", now_);
      std::string line = buf;
      line += r.has(control::Action::kStartAeration) ? "START_AERATION" : "STATE";
      line += " ";
      line += control::to_string(st.mode);
      if (st.phase != control::Phase::kNone) line += " " + std::string(control::to_string(st.phase));
      if (st.mode == control::Mode::kFault) line += " " + st.fault_cause;
      events_.push_back(line);
      if (st.mode == control::Mode::kIdle && !records_.empty() && !records_.back().completed &&
          phase_before != control::Phase::kNone)
        records_.back().completed = true;
    }
    if (r.has(control::Action::kLogFrame)) {
      latest_frame_ = sample_sensors(substrate_, static_cast<std::int64_t>(std::floor(now_)), scenario_.seed);
      log_.log_frame(*latest_frame_, control::to_string(st.mode));
      refresh_vision();
    }
    ++ticks_;
    return r;
  }

  // Ticks at the controller's own cadence until `until` (exclusive).
  void run_until(double until) {
    double t = ticks_ == 0 ? now_ : next_tick();
    while (t < until) {
      tick(t);
      t = next_tick();
    }
  }

  void run_days(int days) { run_until(now_ + days * static_cast<double>(kSecondsPerDay)); }

  const Config& config() const { return config_; }
  const Scenario& scenario() const { return scenario_; }
  control::Controller& controller() { return controller_; }
  const control::Controller& controller() const { return controller_; }
  VirtualGantry& gantry() { return gantry_; }
  const VirtualGantry& gantry() const { return gantry_; }
  const SubstrateState& substrate() const { return substrate_; }
  const control::CsvLog& log() const { return log_; }
  const std::vector<std::string>& events() const { return events_; }
  const std::vector<AerationRecord>& aerations() const { return records_; }
  const std::optional<SensorFrame>& latest_frame() const { return latest_frame_; }
  const vision::RawThermal& thermal() const { return thermal_; }
  const GrayImage& thermal_gray() const { return thermal_gray_; }
  const vision::FrameAnalysis& analysis() const { return analysis_; }
  std::uint64_t ticks() const { return ticks_; }
  std::uint64_t frame_serial() const { return frame_serial_; }  // bumps whenever thermal()/analysis() change

  std::size_t start_aeration_count() const { return records_.size(); }

  std::string gantry_trace() const {
    std::string out;
    for (const auto& e : gantry_.trace()) out += format_event(e) + "\n";
    return out;
  }

  std::string event_trace() const {
    std::string out;
    for (const auto& e : events_) out += e + "\n";
    return out;
  }

 private:
  planner::ToolPath plan(PathMode mode) const {
    const auto& p = config_.planner;
    const planner::ToolSettings tool{config_.spindle.plunge_depth, p.travel_speed, config_.spindle.spin_rate};
    if (mode == PathMode::kSpiral) {
      const Point2 c{0.5 * config_.bin.x_len, 0.5 * config_.bin.y_len};
      return planner::plan_spiral(c, p.spiral_radius, p.spiral_turns, config_.bin, tool);
    }
    if (mode == PathMode::kTargeted && !analysis_.clusters.empty()) {
      const auto map = planner::ImageToBin::fit(thermal_gray_.width, thermal_gray_.height, config_.bin);
      return planner::plan_targeted(analysis_.clusters, config_.bin, map, p.spiral_turns, p.targeted_k, tool);
    }
    return planner::plan_raster(config_.bin, p.raster_pitch, tool);
  }

  void advance_biology(double now) {
    const double dt_hours = (now - biology_time_) / 3600.0;
    if (dt_hours > 0.0) substrate_ = step_biology(substrate_, dt_hours, biology_, rng_);
    biology_time_ = now;
  }

  void refresh_vision() {
    thermal_ = render_thermal(substrate_, mix_seed(scenario_.seed, static_cast<std::uint64_t>(now_)));
    thermal_gray_ = vision::normalize_thermal(thermal_, config_.vision.t_lo, config_.vision.t_hi);
    analysis_ = vision::analyze_frame(thermal_gray_, config_.vision.min_component_area);
    ++frame_serial_;
  }

  void begin_record() {
    AerationRecord rec;
    rec.started = now_;
    rec.mode = controller_.state().path_mode;
    rec.dispersal_before = dispersal_index(substrate_);
    before_frame_ = vision::normalize_thermal(render_thermal(substrate_, mix_seed(scenario_.seed, 0xBEF)),
                                              config_.vision.t_lo, config_.vision.t_hi);
    records_.push_back(rec);
  }

  void finish_mixing() {
    if (records_.empty()) return;
    auto& rec = records_.back();
    planner::ToolPath traversed = controller_.current_path();
    traversed.waypoints = controller_.mixed_route();
    const double radius = config_.spindle.sweep_radius();
    rec.coverage = swept_fraction(swept_cells(substrate_, traversed.waypoints, radius));
    substrate_ = apply_spindle(substrate_, traversed, config_.spindle);
    rec.mixed_until = now_;
    rec.dispersal_after = dispersal_index(substrate_);
    refresh_vision();
    const auto after = vision::normalize_thermal(render_thermal(substrate_, mix_seed(scenario_.seed, 0xBEF)),
                                                 config_.vision.t_lo, config_.vision.t_hi);
    rec.mix = vision::analyze_mixing(before_frame_, after, config_.vision.mix_delta);
  }

  Config config_;
  Scenario scenario_;
  VirtualGantry gantry_;
  control::Controller controller_;
  SubstrateState substrate_;
  BiologyParams biology_{};
  Rng rng_;
  double now_;
  double biology_time_;
  std::uint64_t ticks_{0};
  std::uint64_t frame_serial_{0};

  control::CsvLog log_;
  std::optional<SensorFrame> latest_frame_;
  std::vector<std::string> events_;
  std::vector<AerationRecord> records_;
  vision::RawThermal thermal_;
  GrayImage thermal_gray_;
  vision::FrameAnalysis analysis_;
  GrayImage before_frame_;
};

}  // namespace smartlid::sim
