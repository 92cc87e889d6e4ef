#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "smartlid/control/controller.hpp"
#include "smartlid/core/time.hpp"
#include "smartlid/core/types.hpp"
#include "smartlid/sim/gantry.hpp"

namespace smartlid::telemetry {

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Read-only view of the system as of one controller tick. Field names are
// frozen; see docs/telemetry.md.
struct StatusSnapshot {
  std::uint64_t seq{0};  // ticks since boot
  std::int64_t time{0};  // controller clock, Unix seconds
  double uptime_s{0.0};
  std::string mode{"IDLE"};
  std::string aeration_phase{"NONE"};
  sim::Pose gantry{};
  bool spindle_spinning{false};
  bool end_stops_closed{true};
  std::optional<SensorFrame> sensors;
  std::int64_t growth_proxy{0};
  std::string schedule{"11:00"};
  std::string path_mode{"raster"};
  std::optional<std::int64_t> last_aeration;
  std::string fault;
  std::string alert;

  friend bool operator==(const StatusSnapshot&, const StatusSnapshot&) = default;
};

inline nlohmann::json sensors_to_json(const SensorFrame& f) {
  return {{"timestamp", format_iso8601(f.timestamp)},
          {"temp_c", f.temperature},
          {"humidity_pct", f.humidity},
          {"moisture", f.moisture},
          {"ph", f.ph},
          {"co2_ppm", f.co2},
          {"no2_ppm", f.no2}};
}

inline nlohmann::json to_json(const StatusSnapshot& s) {
  nlohmann::json j;
  j["seq"] = s.seq;
  j["time"] = format_iso8601(s.time);
  j["uptime_s"] = s.uptime_s;
  j["mode"] = s.mode;
  j["aeration_phase"] = s.aeration_phase;
  j["gantry"] = {{"x", s.gantry.x},
                 {"y", s.gantry.y},
                 {"z", s.gantry.z},
                 {"spindle_spinning", s.spindle_spinning},
                 {"end_stops_closed", s.end_stops_closed}};
  j["sensors"] = s.sensors ? sensors_to_json(*s.sensors) : nlohmann::json(nullptr);
  j["growth_proxy"] = s.growth_proxy;
  j["schedule"] = s.schedule;
  j["path_mode"] = s.path_mode;
  j["last_aeration"] = s.last_aeration ? nlohmann::json(format_iso8601(*s.last_aeration)) : nlohmann::json(nullptr);
  j["fault"] = s.fault;
  j["alert"] = s.alert;
  return j;
}

namespace detail {

inline std::int64_t iso_field(const nlohmann::json& j, const char* key) {
  const auto t = parse_iso8601(j.at(key).get<std::string>());
  if (!t) throw SchemaError(std::string("status: ") + key + ": not an ISO-8601 UTC timestamp");
  return *t;
}

inline bool one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return true;
  return false;
}

}  // namespace detail

// Strict inverse of to_json: every field required, no extras.
inline StatusSnapshot from_json(const nlohmann::json& j) {
  static const std::initializer_list<const char*> kFields = {
      "seq",      "time",         "uptime_s", "mode",          "aeration_phase", "gantry", "sensors",
      "growth_proxy", "schedule", "path_mode", "last_aeration", "fault",          "alert"};
  try {
    if (!j.is_object()) throw SchemaError("status: expected an object");
    if (j.size() != kFields.size()) throw SchemaError("status: unexpected field count");
    StatusSnapshot s;
    s.seq = j.at("seq").get<std::uint64_t>();
    s.time = detail::iso_field(j, "time");
    s.uptime_s = j.at("uptime_s").get<double>();
    s.mode = j.at("mode").get<std::string>();
    if (!detail::one_of(s.mode, {"IDLE", "AERATING", "SENSING", "FAULT"})) throw SchemaError("status: bad mode");
    s.aeration_phase = j.at("aeration_phase").get<std::string>();
    if (!detail::one_of(s.aeration_phase, {"NONE", "HOMING", "PLUNGING", "MIXING", "RETRACTING", "RETURNING"}))
      throw SchemaError("status: bad aeration_phase");
    const auto& g = j.at("gantry");
    s.gantry = {g.at("x").get<double>(), g.at("y").get<double>(), g.at("z").get<double>()};
    s.spindle_spinning = g.at("spindle_spinning").get<bool>();
    s.end_stops_closed = g.at("end_stops_closed").get<bool>();
    if (const auto& f = j.at("sensors"); !f.is_null()) {
      SensorFrame fr;
      fr.timestamp = detail::iso_field(f, "timestamp");
      fr.temperature = f.at("temp_c").get<double>();
      fr.humidity = f.at("humidity_pct").get<double>();
      fr.moisture = f.at("moisture").get<double>();
      fr.ph = f.at("ph").get<double>();
      fr.co2 = f.at("co2_ppm").get<double>();
      fr.no2 = f.at("no2_ppm").get<double>();
      s.sensors = fr;
    }
    s.growth_proxy = j.at("growth_proxy").get<std::int64_t>();
    s.schedule = j.at("schedule").get<std::string>();
    if (!TimeOfDay::parse(s.schedule)) throw SchemaError("status: bad schedule");
    s.path_mode = j.at("path_mode").get<std::string>();
    if (!parse_path_mode(s.path_mode)) throw SchemaError("status: bad path_mode");
    if (!j.at("last_aeration").is_null()) s.last_aeration = detail::iso_field(j, "last_aeration");
    s.fault = j.at("fault").get<std::string>();
    s.alert = j.at("alert").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("status: ") + e.what());
  }
}

}  // namespace smartlid::telemetry
