#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "smartlid/core/types.hpp"
#include "smartlid/sim/rng.hpp"
#include "smartlid/sim/substrate.hpp"
#include "smartlid/vision/thermal.hpp"

// Synthetic observations of a SubstrateState: the overhead thermal camera and
// the environment sensor suite.
namespace smartlid::sim {

// Larval metabolic heat saturates with crowding:
// T = ambient + max_rise · (1 − exp(−areal_density / saturation_density)).
struct ThermalModel {
  double ambient_c{25.0};
  double max_rise_c{18.0};
  double saturation_density{2000.0};  // g/m²
  double blur_sigma_cells{1.0};
  double noise_c{0.05};  // uniform ± amplitude

  double rise(double grams_per_m2) const { return max_rise_c * (1.0 - std::exp(-grams_per_m2 / saturation_density)); }
};

// One pixel per grid cell; image row 0 is the far wall (largest y), matching
// planner::ImageToBin::fit.
inline vision::RawThermal render_thermal(const SubstrateState& s, std::uint64_t noise_seed, const ThermalModel& m = {}) {
  const auto heat = detail::gaussian_blur(s.density, s.nx, s.ny, m.blur_sigma_cells);
  const double area = s.cell * s.cell;
  Rng rng(mix_seed(noise_seed, 0x7E));
  vision::RawThermal out(s.nx, s.ny);
  for (int row = 0; row < s.ny; ++row) {
    const int j = s.ny - 1 - row;
    for (int i = 0; i < s.nx; ++i) {
      const double noise = m.noise_c > 0.0 ? rng.uniform(-m.noise_c, m.noise_c) : 0.0;
      const double t = m.ambient_c + m.rise(heat[s.index(i, j)] / area) + noise;
      out.counts[static_cast<std::size_t>(row) * s.nx + i] = vision::celsius_to_counts(t);
    }
  }
  return out;
}

// Baseline readings and response coefficients of the synthetic sensor suite.
struct SensorModel {
  double ambient_temp_c{25.0};
  ThermalModel heat{};  // probe reads the bin-average heat
  double base_humidity{60.0};
  double humidity_per_moisture{30.0};
  double reference_moisture{0.6};
  double base_co2{420.0};
  double co2_per_gram{2.0};
  double base_no2{0.02};
  double no2_per_gram{1e-4};
  double base_ph{7.5};
  double ph_swing{1.2};
  double ph_period_days{10.0};

  // uniform ± noise amplitudes
  double temp_noise{0.05};
  double humidity_noise{0.2};
  double moisture_noise{0.001};
  double ph_noise{0.02};
  double co2_noise{2.0};
  double no2_noise{0.001};
};

inline SensorFrame sample_sensors(const SubstrateState& s, std::int64_t t, std::uint64_t seed, const SensorModel& m = {}) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
  auto noise = [&](double amp) { return amp > 0.0 ? rng.uniform(-amp, amp) : 0.0; };
  const double n = std::max<double>(1.0, static_cast<double>(s.cells()));
  double moisture = 0.0;
  for (double v : s.moisture) moisture += v;
  moisture = s.moisture.empty() ? m.reference_moisture : moisture / n;

  SensorFrame f;
  f.timestamp = t;
  const double mean_areal = s.total_mass / (n * s.cell * s.cell);
  f.temperature = m.ambient_temp_c + m.heat.rise(mean_areal) + noise(m.temp_noise);
  f.moisture = std::clamp(moisture + noise(m.moisture_noise), 0.0, 1.0);
  f.humidity = std::clamp(m.base_humidity + m.humidity_per_moisture * (moisture - m.reference_moisture) +
                              noise(m.humidity_noise),
                          0.0, 100.0);
  f.co2 = m.base_co2 + m.co2_per_gram * s.total_mass + noise(m.co2_noise);
  f.no2 = std::max(0.0, m.base_no2 + m.no2_per_gram * s.total_mass + noise(m.no2_noise));
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / (m.ph_period_days * 86400.0);
  f.ph = std::clamp(m.base_ph + m.ph_swing * std::sin(phase) + noise(m.ph_noise), 6.0, 9.0);
  return f;
}

}  // namespace smartlid::sim
