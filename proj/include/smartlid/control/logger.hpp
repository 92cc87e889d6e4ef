#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smartlid/core/time.hpp"
#include "smartlid/core/types.hpp"

// CSV sensor log.
//
//   timestamp,temp_c,humidity_pct,moisture,ph,co2_ppm,no2_ppm,mode
//   2026-01-01T00:05:00Z,25.53,60.04,0.5996,7.504,821.3,0.0400,IDLE
//
// Fixed precision per column: temp_c 2, humidity_pct 2, moisture 4, ph 3,
// co2_ppm 1, no2_ppm 4 decimals.
namespace smartlid::control {

class LogError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::string_view kCsvHeader = "timestamp,temp_c,humidity_pct,moisture,ph,co2_ppm,no2_ppm,mode";

struct LogRow {
  SensorFrame frame;
  std::string mode;
  friend bool operator==(const LogRow&, const LogRow&) = default;
};

inline std::string format_row(const SensorFrame& f, std::string_view mode) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.4f,%.3f,%.1f,%.4f,", format_iso8601(f.timestamp).c_str(),
                f.temperature, f.humidity, f.moisture, f.ph, f.co2, f.no2);
  std::string out = buf;
  out += mode;
  out += '\n';
  return out;
}

// `frame` rounded to the logged precision, i.e. what parse_row returns.
inline SensorFrame quantize(const SensorFrame& f) {
  auto q = [](double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return std::strtod(buf, nullptr);
  };
  SensorFrame out = f;
  out.temperature = q(f.temperature, "%.2f");
  out.humidity = q(f.humidity, "%.2f");
  out.moisture = q(f.moisture, "%.4f");
  out.ph = q(f.ph, "%.3f");
  out.co2 = q(f.co2, "%.1f");
  out.no2 = q(f.no2, "%.4f");
  return out;
}

inline LogRow parse_row(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (cells.size() != 8) throw LogError("log row: expected 8 columns, got " + std::to_string(cells.size()));
  const auto ts = parse_iso8601(cells[0]);
  if (!ts) throw LogError("log row: bad timestamp '" + cells[0] + "'");
  auto num = [&](int i) {
    char* end = nullptr;
    const double v = std::strtod(cells[i].c_str(), &end);
    if (cells[i].empty() || end != cells[i].c_str() + cells[i].size()) throw LogError("log row: bad number '" + cells[i] + "'");
    return v;
  };
  LogRow r;
  r.frame = {*ts, num(1), num(2), num(3), num(4), num(5), num(6)};
  r.mode = cells[7];
  return r;
}

inline std::vector<LogRow> parse_log(std::string_view csv) {
  std::vector<LogRow> rows;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line != kCsvHeader) throw LogError("log: unexpected header");
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

// Rows with since ≤ timestamp < until. The header is included only when
// `since` is absent, so adjacent windows concatenate to the full file.
inline std::string slice_log(std::string_view csv, std::optional<std::int64_t> since,
                             std::optional<std::int64_t> until) {
  std::string out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < csv.size()) {
    auto eol = csv.find('\n', pos);
    const std::size_t next = eol == std::string_view::npos ? csv.size() : eol + 1;
    const std::string_view line = csv.substr(pos, next - pos);
    pos = next;
    if (header) {
      header = false;
      if (!since) out += line;
      continue;
    }
    const auto comma = line.find(',');
    const auto ts = parse_iso8601(line.substr(0, comma));
    if (!ts) continue;
    if (since && *ts < *since) continue;
    if (until && *ts >= *until) continue;
    out += line;
  }
  return out;
}

// Append-only CSV log on disk (or in memory when constructed without a path).
// Each row goes out in a single write(2) on an O_APPEND descriptor.
class CsvLog {
 public:
  CsvLog() = default;

  explicit CsvLog(std::string path) : path_(std::move(path)) {
    std::ifstream existing(path_, std::ios::binary);
    if (existing) {
      std::ostringstream ss;
      ss << existing.rdbuf();
      contents_ = ss.str();
    }
    if (contents_.empty()) {
      write_out(std::string(kCsvHeader) + "\n");
    } else {
      const auto rows = parse_log(contents_);
      rows_ = rows.size();
      if (!rows.empty()) last_ = rows.back().frame.timestamp;
    }
  }

  CsvLog(const CsvLog&) = delete;
  CsvLog& operator=(const CsvLog&) = delete;
  CsvLog(CsvLog&&) = default;
  CsvLog& operator=(CsvLog&&) = default;

  // Equal timestamps are accepted; older ones are rejected.
  void log_frame(const SensorFrame& f, std::string_view mode) {
    if (last_ && f.timestamp < *last_)
      throw LogError("out-of-order timestamp " + format_iso8601(f.timestamp) + " < " + format_iso8601(*last_));
    if (contents_.empty()) write_out(std::string(kCsvHeader) + "\n");
    write_out(format_row(f, mode));
    last_ = f.timestamp;
    ++rows_;
  }

  const std::string& contents() const { return contents_; }
  std::size_t rows() const { return rows_; }
  const std::string& path() const { return path_; }

 private:
  void write_out(const std::string& bytes) {
    if (!path_.empty()) {
      const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
      if (fd < 0) throw LogError(path_ + ": cannot open log for append");
      const ssize_t n = ::write(fd, bytes.data(), bytes.size());
      ::close(fd);
      if (n != static_cast<ssize_t>(bytes.size())) throw LogError(path_ + ": write failed");
    }
    contents_ += bytes;
  }

  std::string path_;
  std::string contents_;
  std::size_t rows_{0};
  std::optional<std::int64_t> last_;
};

}  // namespace smartlid::control
