#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smartlid/core/types.hpp"

namespace smartlid {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Physical dimension of a value, used to pick which unit suffixes are legal
// and how to convert them to SI.
enum class Dimension { kNone, kLength, kTime, kSpeed, kViscosity, kTorque, kRate, kTemperature };

namespace detail {

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

// Returns the SI factor for `unit` in dimension `dim`, or 0 if not accepted.
inline double unit_factor(Dimension dim, std::string_view unit) {
  if (unit.empty()) return 1.0;
  switch (dim) {
    case Dimension::kLength:
      if (unit == "m") return 1.0;
      if (unit == "cm") return 1e-2;
      if (unit == "mm") return 1e-3;
      break;
    case Dimension::kTime:
      if (unit == "s") return 1.0;
      if (unit == "min") return 60.0;
      if (unit == "h") return 3600.0;
      break;
    case Dimension::kSpeed:
      if (unit == "m/s") return 1.0;
      if (unit == "mm/s") return 1e-3;
      break;
    case Dimension::kViscosity:
      if (unit == "Pa.s" || unit == "Pa·s" || unit == "Pas") return 1.0;
      if (unit == "cps" || unit == "cP" || unit == "mPa.s") return 1e-3;
      break;
    case Dimension::kTorque:
      if (unit == "N.m" || unit == "N·m" || unit == "Nm") return 1.0;
      if (unit == "N.cm" || unit == "N-cm" || unit == "Ncm") return 1e-2;
      break;
    case Dimension::kRate:
      if (unit == "rev/s") return 1.0;
      if (unit == "rpm") return 1.0 / 60.0;
      break;
    case Dimension::kTemperature:
      if (unit == "C" || unit == "degC") return 1.0;
      break;
    case Dimension::kNone:
      break;
  }
  return 0.0;
}

}  // namespace detail

// A parsed "key = value [unit]" document with optional [section] headers.
// Keys are addressed as "section.key". Every key must be consumed by the
// reader; check_all_used() reports the leftovers as schema violations.
class KeyValueDoc {
 public:
  static KeyValueDoc parse(std::string_view text, std::string source = "<string>") {
    KeyValueDoc doc;
    doc.source_ = std::move(source);
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::string line = detail::trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') doc.fail(lineno, "unterminated section header");
        section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) doc.fail(lineno, "expected 'key = value'");
      std::string key = detail::trim(std::string_view(line).substr(0, eq));
      std::string value = detail::trim(std::string_view(line).substr(eq + 1));
      if (key.empty()) doc.fail(lineno, "empty key");
      if (!section.empty()) key = section + "." + key;
      if (doc.values_.count(key)) doc.fail(lineno, "duplicate key '" + key + "'");
      doc.values_[key] = Entry{value, lineno};
    }
    return doc;
  }

  static KeyValueDoc load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path + ": cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& source() const { return source_; }

  std::string get_string(const std::string& key, std::string fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  double get_number(const std::string& key, double fallback, Dimension dim = Dimension::kNone) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    auto values = split_numbers(key, *e, dim);
    if (values.size() != 1) field_error(key, "expected a single value");
    return values.front();
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback,
                               Dimension dim = Dimension::kNone) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    return split_numbers(key, *e, dim);
  }

  long long get_int(const std::string& key, long long fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    long long v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) field_error(key, "expected an integer, got '" + e->value + "'");
    return v;
  }

  [[noreturn]] void field_error(const std::string& key, const std::string& reason) const {
    const auto it = values_.find(key);
    std::string where = source_;
    if (it != values_.end()) where += ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": " + key + ": " + reason);
  }

  void check_all_used() const {
    for (const auto& [key, entry] : values_)
      if (!used_.count(key)) field_error(key, "unknown field");
  }

 private:
  struct Entry {
    std::string value;
    int line{0};
  };

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + what);
  }

  const Entry* find(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  // "1 2 3 mm" -> {0.001, 0.002, 0.003}. The unit, if present, is the last token.
  std::vector<double> split_numbers(const std::string& key, const Entry& e, Dimension dim) const {
    std::istringstream ss(e.value);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tokens.empty()) field_error(key, "missing value");
    double factor = 1.0;
    double probe = 0.0;
    if (!detail::parse_double(tokens.back(), probe)) {
      factor = detail::unit_factor(dim, tokens.back());
      if (factor == 0.0) field_error(key, "unsupported unit '" + tokens.back() + "'");
      tokens.pop_back();
    }
    if (tokens.empty()) field_error(key, "missing value");
    std::vector<double> out;
    for (const auto& t : tokens) {
      double v = 0.0;
      if (!detail::parse_double(t, v)) field_error(key, "not a number: '" + t + "'");
      out.push_back(v * factor);
    }
    return out;
  }

  std::string source_;
  std::map<std::string, Entry> values_;
  mutable std::set<std::string> used_;
};

}  // namespace smartlid
