#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "smartlid/control/logger.hpp"
#include "smartlid/telemetry/runtime.hpp"

// HTTP+JSON operator interface. No authentication: single-operator bench device.
//
//   GET  /status            StatusSnapshot JSON
//   GET  /frames/thermal    latest normalized thermal frame, P5
//   GET  /frames/overlay    latest inferno + contour overlay, P6
//   GET  /log?since=&until= CSV slice, ISO-8601 bounds, since ≤ t < until
//   POST /commands/aerate   202, or 409 in FAULT
//   POST /commands/stop     202
//   PUT  /schedule          {"time":"HH:MM"} → 202, 400 if malformed
//   PUT  /path_mode         {"mode":"raster|spiral|targeted"} → 202, 400 if malformed
//   GET  /events            text/event-stream of StatusSnapshots, at most 1 Hz
namespace smartlid::telemetry {

class TelemetryServer {
 public:
  explicit TelemetryServer(Runtime& rt, std::chrono::milliseconds event_period = std::chrono::seconds(1))
      : rt_(rt), event_period_(event_period) {
    routes();
  }

  ~TelemetryServer() { stop(); }

  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  // Serves on the calling thread until stop().
  void serve(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }

  void stop() {
    stopping_ = true;
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  static void json_reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error_reply(httplib::Response& res, int status, const std::string& what) {
    json_reply(res, status, {{"error", what}});
  }

  static std::optional<nlohmann::json> json_body(const httplib::Request& req) {
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  }

  void routes() {
    server_.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, 200, to_json(*rt_.snapshot()));
    });

    server_.Get("/frames/thermal", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(*rt_.thermal_pnm(), "image/x-portable-graymap");
    });

    server_.Get("/frames/overlay", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(*rt_.overlay_pnm(), "image/x-portable-pixmap");
    });

    server_.Get("/log", [this](const httplib::Request& req, httplib::Response& res) {
      std::optional<std::int64_t> since, until;
      for (auto [key, out] : {std::pair{"since", &since}, std::pair{"until", &until}}) {
        if (!req.has_param(key)) continue;
        const auto t = parse_iso8601(req.get_param_value(key));
        if (!t) return error_reply(res, 400, std::string(key) + ": expected ISO-8601 UTC timestamp");
        *out = *t;
      }
      res.set_content(control::slice_log(*rt_.log_csv(), since, until), "text/csv");
    });

    server_.Post("/commands/aerate", [this](const httplib::Request&, httplib::Response& res) {
      if (rt_.submit(control::Command::aerate_now()) == Runtime::Submit::kRejected)
        return error_reply(res, 409, "controller is in FAULT; send STOP to re-home first");
      json_reply(res, 202, {{"accepted", "AERATE_NOW"}});
    });

    server_.Post("/commands/stop", [this](const httplib::Request&, httplib::Response& res) {
      rt_.submit(control::Command::stop());
      json_reply(res, 202, {{"accepted", "STOP"}});
    });

    server_.Put("/schedule", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json_body(req);
      if (!body || !body->contains("time") || !(*body)["time"].is_string())
        return error_reply(res, 400, "expected {\"time\":\"HH:MM\"}");
      const auto t = TimeOfDay::parse((*body)["time"].get<std::string>());
      if (!t) return error_reply(res, 400, "time: expected HH:MM with HH < 24 and MM < 60");
      rt_.submit(control::Command::set_schedule(*t));
      json_reply(res, 202, {{"accepted", "SET_SCHEDULE"}, {"time", t->str()}});
    });

    server_.Put("/path_mode", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json_body(req);
      if (!body || !body->contains("mode") || !(*body)["mode"].is_string())
        return error_reply(res, 400, "expected {\"mode\":\"raster|spiral|targeted\"}");
      const auto m = parse_path_mode((*body)["mode"].get<std::string>());
      if (!m) return error_reply(res, 400, "mode: expected raster, spiral or targeted");
      rt_.submit(control::Command::set_path_mode(*m));
      json_reply(res, 202, {{"accepted", "SET_PATH_MODE"}, {"mode", to_string(*m)}});
    });

    server_.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Cache-Control", "no-cache");
      auto last = std::make_shared<std::optional<std::chrono::steady_clock::time_point>>();
      res.set_chunked_content_provider("text/event-stream", [this, last](std::size_t, httplib::DataSink& sink) {
        if (*last) {
          // rate limit: never more than one event per period
          while (!stopping_ && std::chrono::steady_clock::now() - **last < event_period_)
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        if (stopping_) return false;
        *last = std::chrono::steady_clock::now();
        const std::string msg = "event: status\ndata: " + to_json(*rt_.snapshot()).dump() + "\n\n";
        return sink.write(msg.data(), msg.size());
      });
    });

    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.status == 404) error_reply(res, 404, "no such endpoint");
    });
  }

  Runtime& rt_;
  std::chrono::milliseconds event_period_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
};

}  // namespace smartlid::telemetry
