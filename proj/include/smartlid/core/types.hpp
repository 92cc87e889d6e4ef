#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartlid {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a value violates a domain invariant (bad geometry, bad spindle, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

struct Point2 {
  double x{0.0};
  double y{0.0};
  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Interior of the rearing bin. All lengths in meters.
struct BinGeometry {
  double x_len{0.48};
  double y_len{0.30};
  double z_depth{0.08};  // substrate depth
  double margin{0.03};   // keep-out border from the walls

  friend bool operator==(const BinGeometry&, const BinGeometry&) = default;

  double work_x_min() const { return margin; }
  double work_x_max() const { return x_len - margin; }
  double work_y_min() const { return margin; }
  double work_y_max() const { return y_len - margin; }
  double work_width() const { return x_len - 2.0 * margin; }
  double work_height() const { return y_len - 2.0 * margin; }

  // True if p lies in the working area, with a small absolute tolerance for rounding.
  bool contains(const Point2& p, double tol = 1e-9) const {
    return p.x >= work_x_min() - tol && p.x <= work_x_max() + tol && p.y >= work_y_min() - tol &&
           p.y <= work_y_max() + tol;
  }

  void validate() const {
    if (!(x_len > 0.0) || !(y_len > 0.0) || !(z_depth > 0.0) || !(margin > 0.0))
      throw InvariantError("bin dimensions and margin must be > 0");
    if (!(margin < std::min(x_len, y_len) / 2.0))
      throw InvariantError("margin must be < min(x_len, y_len)/2");
  }
};

// Tilling spindle: a set of fingers (teeth) at radial offsets from the spindle axis.
struct SpindleSpec {
  int finger_count{8};
  double finger_radius{0.0075};
  std::vector<double> finger_offsets{0.010, 0.010, 0.010, 0.010, 0.028, 0.028, 0.028, 0.028};
  double spin_rate{1.0};  // rev/s
  double plunge_depth{0.05};

  friend bool operator==(const SpindleSpec&, const SpindleSpec&) = default;

  double max_offset() const {
    double m = 0.0;
    for (double o : finger_offsets) m = std::max(m, o);
    return m;
  }

  // Radius of the disk the spindle disturbs while spinning.
  double sweep_radius() const { return finger_radius + max_offset(); }

  void validate(const BinGeometry& bin) const {
    if (finger_count < 1) throw InvariantError("finger_count must be ≥ 1");
    if (!(finger_radius > 0.0)) throw InvariantError("finger_radius must be > 0");
    if (finger_offsets.size() != static_cast<std::size_t>(finger_count))
      throw InvariantError("finger_offsets must list exactly finger_count entries");
    for (double o : finger_offsets)
      if (!(o >= 0.0)) throw InvariantError("finger_offsets must be ≥ 0");
    if (!(spin_rate >= 0.0)) throw InvariantError("spin_rate must be ≥ 0");
    if (!(plunge_depth > 0.0)) throw InvariantError("plunge_depth must be > 0");
    if (plunge_depth > bin.z_depth) throw InvariantError("plunge_depth must be ≤ z_depth");
  }
};

struct SubstrateRheology {
  double dynamic_viscosity{250.0};  // Pa·s

  friend bool operator==(const SubstrateRheology&, const SubstrateRheology&) = default;

  void validate() const {
    if (!(dynamic_viscosity > 0.0)) throw InvariantError("dynamic_viscosity must be > 0");
  }
};

// One time-stamped reading of the bin's environment sensors.
struct SensorFrame {
  std::int64_t timestamp{0};  // UTC seconds since the Unix epoch
  double temperature{0.0};    // °C
  double humidity{0.0};       // %RH
  double moisture{0.0};       // 0..1
  double ph{7.0};
  double co2{0.0};  // ppm
  double no2{0.0};  // ppm

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;

  void validate() const {
    if (!(moisture >= 0.0 && moisture <= 1.0)) throw InvariantError("moisture must be in [0, 1]");
    if (!(ph >= 0.0 && ph <= 14.0)) throw InvariantError("ph must be in [0, 14]");
  }
};

}  // namespace smartlid
