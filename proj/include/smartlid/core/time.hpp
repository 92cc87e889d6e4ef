#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "smartlid/core/types.hpp"

namespace smartlid {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Floor division that rounds toward negative infinity.
inline constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Wall-clock time of day, minute resolution.
struct TimeOfDay {
  int hour{11};
  int minute{0};

  friend constexpr bool operator==(const TimeOfDay&, const TimeOfDay&) = default;

  constexpr std::int64_t seconds() const { return hour * 3600 + minute * 60; }

  std::string str() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", hour, minute);
    return buf;
  }

  // Accepts exactly "HH:MM" with 00 ≤ HH ≤ 23 and 00 ≤ MM ≤ 59.
  static std::optional<TimeOfDay> parse(std::string_view s) {
    if (s.size() != 5 || s[2] != ':') return std::nullopt;
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!digit(s[0]) || !digit(s[1]) || !digit(s[3]) || !digit(s[4])) return std::nullopt;
    int h = (s[0] - '0') * 10 + (s[1] - '0');
    int m = (s[3] - '0') * 10 + (s[4] - '0');
    if (h > 23 || m > 59) return std::nullopt;
    return TimeOfDay{h, m};
  }
};

// "YYYY-MM-DDTHH:MM:SSZ"
inline std::string format_iso8601(std::int64_t unix_seconds) {
  using namespace std::chrono;
  std::int64_t day = floor_div(unix_seconds, kSecondsPerDay);
  std::int64_t sod = unix_seconds - day * kSecondsPerDay;
  year_month_day ymd{sys_days{days{day}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60), static_cast<int>(sod % 60));
  return buf;
}

// Parses "YYYY-MM-DDTHH:MM:SSZ" (a trailing 'Z' or "+00:00" is accepted; other offsets are rejected).
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 19) return std::nullopt;
  std::string head(s.substr(0, 19));
  std::string_view tail = s.substr(19);
  if (!(tail.empty() || tail == "Z" || tail == "+00:00")) return std::nullopt;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char t = 0;
  int consumed = 0;
  if (std::sscanf(head.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &t, &h, &mi, &se, &consumed) != 7 ||
      consumed != 19 || (t != 'T' && t != ' '))
    return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;
  std::int64_t days_since = sys_days{ymd}.time_since_epoch().count();
  return days_since * kSecondsPerDay + h * 3600 + mi * 60 + se;
}

}  // namespace smartlid
