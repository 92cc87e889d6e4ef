// smartlid: offline analysis, planning, sizing, simulation and the telemetry service.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI/CLI.hpp>

#include "smartlid/core/config.hpp"
#include "smartlid/core/image.hpp"
#include "smartlid/planner/raster.hpp"
#include "smartlid/planner/sizing.hpp"
#include "smartlid/planner/spiral.hpp"
#include "smartlid/sim/scenario.hpp"
#include "smartlid/telemetry/server.hpp"
#include "smartlid/vision/pipeline.hpp"

namespace fs = std::filesystem;
using namespace smartlid;

namespace {

Config config_or_default(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(p.string() + ": cannot open for writing");
  f << bytes;
  if (!f) throw Error(p.string() + ": write failed");
}

planner::ToolSettings tool_of(const Config& c) {
  return {c.spindle.plunge_depth, c.planner.travel_speed, c.spindle.spin_rate};
}

int cmd_plan(const std::string& config_path, const std::string& mode_name, const std::string& out,
             const std::string& thermal) {
  const Config c = load_config(config_path);
  const auto mode = parse_path_mode(mode_name);
  if (!mode) throw Error("--mode: expected raster, spiral or targeted");
  planner::ToolPath path;
  switch (*mode) {
    case PathMode::kRaster:
      path = planner::plan_raster(c.bin, c.planner.raster_pitch, tool_of(c));
      break;
    case PathMode::kSpiral:
      path = planner::plan_spiral({0.5 * c.bin.x_len, 0.5 * c.bin.y_len}, c.planner.spiral_radius,
                                  c.planner.spiral_turns, c.bin, tool_of(c));
      break;
    case PathMode::kTargeted: {
      if (thermal.empty()) throw Error("--mode targeted needs --thermal IMG (normalized P5 frame)");
      const GrayImage frame = read_gray(thermal);
      const auto a = vision::analyze_frame(frame, c.vision.min_component_area);
      const auto map = planner::ImageToBin::fit(frame.width, frame.height, c.bin);
      path = planner::plan_targeted(a.clusters, c.bin, map, c.planner.spiral_turns, c.planner.targeted_k, tool_of(c));
      break;
    }
  }
  planner::validate(path, c.bin);
  const double length = planner::path_length(path);
  if (!out.empty()) write_file(out, planner::export_waypoints(path));
  std::printf("mode: %s\n", std::string(to_string(*mode)).c_str());
  std::printf("waypoints: %zu\n", path.waypoints.size());
  std::printf("length: %.3f m\n", length);
  std::printf("min speed @%gs: %.3f m/s\n", c.planner.time_budget_s, planner::min_speed(length, c.planner.time_budget_s));
  return 0;
}

int cmd_size(const std::string& config_path, double speed) {
  const Config c = load_config(config_path);
  const auto d = planner::stokes_drag(c.substrate, c.spindle, speed);
  const auto f = planner::motor_feasibility(d, c.motor.holding_torque, c.planner.safety_factor);
  std::printf("per-finger %.3f N, total %.3f N\n", d.per_finger_force, d.total_force);
  std::printf("required torque %.4f N.m\n", d.required_torque);
  std::printf("available torque %.4f N.m (holding %.3f N.m x safety factor %.2f)\n", f.available_torque,
              c.motor.holding_torque, c.planner.safety_factor);
  std::printf("feasible: %s (margin %+.4f N.m)\n", f.pass ? "yes" : "no", f.margin());
  return 0;
}

int cmd_analyze(const std::string& before_path, const std::string& after_path, const std::string& baseline_path,
                const std::string& config_path, const std::string& overlay_out) {
  const Config c = config_or_default(config_path);
  const GrayImage before = read_gray(before_path);
  const GrayImage after = read_gray(after_path);
  std::optional<GrayImage> baseline;
  if (!baseline_path.empty()) baseline = read_gray(baseline_path);
  const auto r = vision::analyze_mixing(before, after, c.vision.mix_delta, baseline ? &*baseline : nullptr);
  std::printf("mixed pixels: %lld\n", static_cast<long long>(r.mixed_pixels));
  std::printf("unmixed pixels: %lld\n", static_cast<long long>(r.unmixed_pixels));
  std::printf("coverage: %.3f\n", r.coverage_fraction);
  if (r.efficacy_ratio) std::printf("efficacy: %.3f\n", *r.efficacy_ratio);
  for (const auto& [name, img] : {std::pair{"before", &before}, std::pair{"after", &after}}) {
    const auto a = vision::analyze_frame(*img, c.vision.min_component_area);
    std::printf("%s: threshold %d, clusters %zu, growth proxy %lld px\n", name, a.threshold, a.clusters.size(),
                static_cast<long long>(a.growth_proxy));
    if (!overlay_out.empty() && img == &after) write_image(a.overlay, overlay_out);
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_path, int days, const std::string& out_dir, const std::string& config_path) {
  const sim::Scenario s = sim::load_scenario(scenario_path);
  const std::string cfg = !config_path.empty() ? config_path : s.config_path;
  const Config c = config_or_default(cfg);
  if (days < 0) throw Error("--days must be ≥ 0");

  const fs::path out(out_dir);
  fs::create_directories(out);
  const fs::path log_path = out / "sensors.csv";
  fs::remove(log_path);

  sim::ClosedLoop loop(c, s);
  loop.log_to(log_path.string());
  loop.run_days(days);

  write_file(out / "events.trace", loop.event_trace());
  write_file(out / "gantry.trace", loop.gantry_trace());
  write_image(loop.thermal_gray(), (out / "thermal.pgm").string());
  write_image(loop.analysis().overlay, (out / "overlay.ppm").string());

  std::string table = "index,start,path_mode,dispersal_before,dispersal_after,swept_fraction,mixed_pixels,unmixed_pixels,"
                      "coverage,completed\n";
  int i = 0;
  for (const auto& a : loop.aerations()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6f,%.6f,%.4f,%lld,%lld,%.4f,%d\n", i++,
                  format_iso8601(static_cast<std::int64_t>(a.started)).c_str(), std::string(to_string(a.mode)).c_str(),
                  a.dispersal_before, a.dispersal_after, a.coverage, static_cast<long long>(a.mix.mixed_pixels),
                  static_cast<long long>(a.mix.unmixed_pixels), a.mix.coverage_fraction, a.completed ? 1 : 0);
    table += buf;
  }
  write_file(out / "aerations.csv", table);

  std::printf("simulated %d day(s) from %s\n", days, format_iso8601(s.start).c_str());
  std::printf("aerations: %zu\n", loop.start_aeration_count());
  std::printf("sensor rows: %zu\n", loop.log().rows());
  std::printf("final mass: %.3f g, dispersal %.4f\n", loop.substrate().total_mass, sim::dispersal_index(loop.substrate()));
  std::printf("final mode: %s\n", std::string(control::to_string(loop.controller().state().mode)).c_str());
  std::printf("outputs in %s\n", out.string().c_str());
  return 0;
}

telemetry::TelemetryServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& config_path, int port, const std::string& host, const std::string& scenario_path,
              double time_scale) {
  const Config c = load_config(config_path);
  const sim::Scenario s = scenario_path.empty() ? sim::Scenario{} : sim::load_scenario(scenario_path);
  telemetry::Runtime rt(c, s);
  telemetry::TelemetryServer server(rt);
  rt.start(time_scale);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::fprintf(stderr, "serving on http://%s:%d (simulated clock x%g)\n", host.c_str(), port, time_scale);
  server.serve(host, port);
  g_server = nullptr;
  rt.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartlid: automated larvae-bin aeration, vision and telemetry tools"};
  app.require_subcommand(1);

  std::string config, mode = "raster", out, thermal, scenario, before, after, baseline, overlay, host = "127.0.0.1";
  double speed = 0.032, time_scale = 1.0;
  int days = 10, port = 8080;

  auto* plan = app.add_subcommand("plan", "generate a tool path and report its length and minimum speed");
  plan->add_option("--config", config, "configuration file")->required();
  plan->add_option("--mode", mode, "raster, spiral or targeted")->check(CLI::IsMember({"raster", "spiral", "targeted"}));
  plan->add_option("--out", out, "write waypoints (x y per line, meters)");
  plan->add_option("--thermal", thermal, "normalized P5 thermal frame for --mode targeted");

  auto* size = app.add_subcommand("size", "Stokes-drag sizing and motor feasibility");
  size->add_option("--config", config, "configuration file")->required();
  size->add_option("--speed", speed, "carriage speed, m/s")->required();

  auto* analyze = app.add_subcommand("analyze", "mixing report between two thermal frames");
  analyze->add_option("--before", before, "P5 frame before aeration")->required();
  analyze->add_option("--after", after, "P5 frame after aeration")->required();
  analyze->add_option("--baseline", baseline, "P5 frame after manual mixing");
  analyze->add_option("--config", config, "configuration file (vision settings)");
  analyze->add_option("--overlay", overlay, "write the after-frame contour overlay (P6)");

  auto* simulate = app.add_subcommand("simulate", "run the closed loop against the substrate simulator");
  simulate->add_option("--scenario", scenario, "scenario file")->required();
  simulate->add_option("--days", days, "simulated days")->required();
  simulate->add_option("--out", out, "output directory")->required();
  simulate->add_option("--config", config, "configuration file (overrides the scenario's)");

  auto* serve = app.add_subcommand("serve", "HTTP+JSON telemetry service over a simulated bin");
  serve->add_option("--config", config, "configuration file")->required();
  serve->add_option("--port", port, "TCP port")->required();
  serve->add_option("--host", host, "bind address");
  serve->add_option("--scenario", scenario, "scenario file for the simulated bin");
  serve->add_option("--time-scale", time_scale, "simulated seconds per real second")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmd_plan(config, mode, out, thermal);
    if (*size) return cmd_size(config, speed);
    if (*analyze) return cmd_analyze(before, after, baseline, config, overlay);
    if (*simulate) return cmd_simulate(scenario, days, out, config);
    if (*serve) return cmd_serve(config, port, host, scenario, time_scale);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
