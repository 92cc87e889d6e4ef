#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smartlid/core/image.hpp"
#include "smartlid/vision/inferno_table.hpp"

namespace smartlid::vision {

// Raw radiometric frame as emitted by the thermal camera: one 16-bit count per
// pixel in units of 0.01 K (so 29815 = 25.00 °C).
struct RawThermal {
  int width{0};
  int height{0};
  std::vector<std::uint16_t> counts;

  RawThermal() = default;
  RawThermal(int w, int h, std::uint16_t fill = 0) : width(w), height(h), counts(static_cast<std::size_t>(w) * h, fill) {}

  friend bool operator==(const RawThermal&, const RawThermal&) = default;
};

inline constexpr double kCountsPerKelvin = 100.0;
inline constexpr double kZeroCelsiusInKelvin = 273.15;

inline std::uint16_t celsius_to_counts(double celsius) {
  const double c = std::round((celsius + kZeroCelsiusInKelvin) * kCountsPerKelvin);
  return static_cast<std::uint16_t>(std::clamp(c, 0.0, 65535.0));
}

inline double counts_to_celsius(std::uint16_t counts) { return counts / kCountsPerKelvin - kZeroCelsiusInKelvin; }

// Linear map of [t_lo, t_hi] °C onto 0..255, clamped outside the window.
// The window ends are snapped to the sensor's 0.01 K grid and the division is
// done in integers, rounding halves up, so the midpoint maps to 128.
inline GrayImage normalize_thermal(const RawThermal& raw, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw InvariantError("degenerate thermal range: t_lo must be < t_hi");
  const std::int64_t lo = celsius_to_counts(t_lo);
  const std::int64_t hi = celsius_to_counts(t_hi);
  if (hi <= lo) throw InvariantError("degenerate thermal range: window narrower than sensor resolution");
  const std::int64_t den = hi - lo;
  GrayImage out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.counts.size(); ++i) {
    const std::int64_t c = std::clamp<std::int64_t>(raw.counts[i], lo, hi) - lo;
    out.data[i] = static_cast<std::uint8_t>((2 * c * 255 + den) / (2 * den));
  }
  return out;
}

inline ColorImage apply_inferno(const GrayImage& g) {
  ColorImage out(g.width, g.height, Colorspace::kRGB);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const Rgb8 c = kInfernoTable[g.data[i]];
    out.data[3 * i + 0] = c.r;
    out.data[3 * i + 1] = c.g;
    out.data[3 * i + 2] = c.b;
  }
  return out;
}

inline double luminance(const Rgb8& c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

}  // namespace smartlid::vision
