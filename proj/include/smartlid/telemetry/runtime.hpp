#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "smartlid/core/image.hpp"
#include "smartlid/sim/scenario.hpp"
#include "smartlid/telemetry/snapshot.hpp"

namespace smartlid::telemetry {

// Owns a closed-loop instance and publishes immutable snapshots of it.
// Exactly one thread advances the loop (the pump thread, or the caller of
// advance_to when no pump is running); readers only ever see published copies.
class Runtime {
 public:
  enum class Submit { kAccepted, kRejected };

  Runtime(Config config, sim::Scenario scenario) : loop_(std::move(config), std::move(scenario)) {
    std::lock_guard lock(loop_mu_);
    publish();
  }

  ~Runtime() { stop(); }

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // Ticks the controller through everything due up to `sim_time`; pending
  // commands are handled immediately, one per tick.
  void advance_to(double sim_time) {
    std::lock_guard lock(loop_mu_);
    for (;;) {
      double t = loop_.ticks() == 0 ? loop_.now() : loop_.next_tick();
      if (loop_.controller().commands().size() > 0) t = std::max(loop_.now(), std::min(t, sim_time));
      else if (t > sim_time) break;
      loop_.tick(t);
      publish();
    }
  }

  // Processes pending commands at the current simulated time.
  void pump_commands() { advance_to(now()); }

  double now() const {
    std::lock_guard lock(pub_mu_);
    return sim_now_;
  }

  // AERATE_NOW is refused while the controller is in FAULT.
  Submit submit(const control::Command& c) {
    if (c.kind == control::CommandKind::kAerateNow && snapshot()->mode == "FAULT") return Submit::kRejected;
    loop_.controller().commands().push(c);
    wake_.notify_all();
    return Submit::kAccepted;
  }

  std::shared_ptr<const StatusSnapshot> snapshot() const {
    std::lock_guard lock(pub_mu_);
    return snapshot_;
  }
  std::shared_ptr<const std::string> thermal_pnm() const {
    std::lock_guard lock(pub_mu_);
    return thermal_;
  }
  std::shared_ptr<const std::string> overlay_pnm() const {
    std::lock_guard lock(pub_mu_);
    return overlay_;
  }
  std::shared_ptr<const std::string> log_csv() const {
    std::lock_guard lock(pub_mu_);
    return log_;
  }

  // Blocks until a snapshot newer than `seq` is published or `timeout` passes.
  std::shared_ptr<const StatusSnapshot> wait_newer(std::uint64_t seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(pub_mu_);
    published_.wait_for(lock, timeout, [&] { return snapshot_->seq > seq; });
    return snapshot_;
  }

  // Runs the simulation against the wall clock, `time_scale` simulated
  // seconds per real second.
  void start(double time_scale = 1.0) {
    if (pump_.joinable()) return;
    running_ = true;
    pump_ = std::thread([this, time_scale] {
      const auto wall0 = std::chrono::steady_clock::now();
      const double sim0 = now();
      while (running_) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - wall0;
        advance_to(sim0 + elapsed.count() * time_scale);
        std::unique_lock lock(wake_mu_);
        wake_.wait_for(lock, std::chrono::milliseconds(100));
      }
    });
  }

  void stop() {
    running_ = false;
    wake_.notify_all();
    if (pump_.joinable()) pump_.join();
  }

  // Direct access for single-threaded use (tests, CLI) while no pump runs.
  sim::ClosedLoop& loop() { return loop_; }

 private:
  // Caller holds loop_mu_.
  void publish() {
    auto s = std::make_shared<StatusSnapshot>();
    const auto& st = loop_.controller().state();
    const auto& g = loop_.gantry();
    s->seq = loop_.ticks();
    s->time = static_cast<std::int64_t>(std::floor(loop_.now()));
    s->uptime_s = loop_.now() - static_cast<double>(loop_.scenario().start);
    s->mode = control::to_string(st.mode);
    s->aeration_phase = control::to_string(st.phase);
    s->gantry = g.pose();
    s->spindle_spinning = g.spindle_spinning();
    s->end_stops_closed = g.end_stops_closed();
    s->sensors = loop_.latest_frame();
    s->growth_proxy = loop_.analysis().growth_proxy;
    s->schedule = st.schedule.time.str();
    s->path_mode = to_string(st.path_mode);
    if (st.last_aeration) s->last_aeration = static_cast<std::int64_t>(std::floor(*st.last_aeration));
    s->fault = st.fault_cause;
    s->alert = st.env_alert;

    std::shared_ptr<const std::string> log, thermal, overlay;
    if (!log_ || log_rows_ != loop_.log().rows()) {
      log = std::make_shared<const std::string>(loop_.log().contents());
      log_rows_ = loop_.log().rows();
    }
    if (!thermal_ || frame_serial_ != loop_.frame_serial()) {
      thermal = std::make_shared<const std::string>(encode_pnm(loop_.thermal_gray()));
      overlay = std::make_shared<const std::string>(encode_pnm(loop_.analysis().overlay));
      frame_serial_ = loop_.frame_serial();
    }
    {
      std::lock_guard lock(pub_mu_);
      sim_now_ = loop_.now();
      snapshot_ = std::move(s);
      if (log) log_ = std::move(log);
      if (thermal) thermal_ = std::move(thermal);
      if (overlay) overlay_ = std::move(overlay);
    }
    published_.notify_all();
  }

  sim::ClosedLoop loop_;
  std::mutex loop_mu_;

  mutable std::mutex pub_mu_;
  mutable std::condition_variable published_;
  double sim_now_{0.0};
  std::shared_ptr<const StatusSnapshot> snapshot_;
  std::shared_ptr<const std::string> thermal_;
  std::shared_ptr<const std::string> overlay_;
  std::shared_ptr<const std::string> log_;
  std::size_t log_rows_{0};
  std::uint64_t frame_serial_{0};

  std::atomic<bool> running_{false};
  std::mutex wake_mu_;
  std::condition_variable wake_;
  std::thread pump_;
};

}  // namespace smartlid::telemetry
