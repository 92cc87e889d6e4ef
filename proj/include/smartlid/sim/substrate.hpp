#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "smartlid/core/types.hpp"
#include "smartlid/planner/toolpath.hpp"
#include "smartlid/sim/rng.hpp"

// Synthetic substrate model for closed-loop testing. None of the biology
// parameters are measured values; they only need to produce larvae clusters
// that grow, drift and can be broken up by the spindle.
namespace smartlid::sim {

// Larvae mass per grid cell (grams) and substrate moisture. Cell (i, j) covers
// x ∈ [i·cell, (i+1)·cell), y ∈ [j·cell, (j+1)·cell); storage is row-major in j.
struct SubstrateState {
  int nx{0};
  int ny{0};
  double cell{0.005};
  std::vector<double> density;
  std::vector<double> moisture;
  double total_mass{0.0};

  std::size_t cells() const { return density.size(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Point2 center(int i, int j) const { return {(i + 0.5) * cell, (j + 0.5) * cell}; }
  double sum() const {
    double s = 0.0;
    for (double d : density) s += d;
    return s;
  }

  static SubstrateState uniform(const BinGeometry& g, double cell, double mass, double moisture = 0.6) {
    SubstrateState s;
    s.cell = cell;
    s.nx = std::max(1, static_cast<int>(std::lround(g.x_len / cell)));
    s.ny = std::max(1, static_cast<int>(std::lround(g.y_len / cell)));
    s.density.assign(static_cast<std::size_t>(s.nx) * s.ny, mass / (static_cast<double>(s.nx) * s.ny));
    s.moisture.assign(s.density.size(), moisture);
    s.total_mass = mass;
    return s;
  }

  // Mass concentrated in `clusters` Gaussian blobs at seeded positions, over a
  // faint uniform floor holding `floor_fraction` of the mass.
  static SubstrateState clustered(const BinGeometry& g, double cell, double mass, int clusters, std::uint64_t seed,
                                  double blob_sigma = 0.025, double floor_fraction = 0.2, double moisture = 0.6) {
    SubstrateState s = uniform(g, cell, 1.0, moisture);
    Rng rng(mix_seed(seed, 0xC1));
    std::vector<double> field(s.cells(), floor_fraction / static_cast<double>(s.cells()));
    std::vector<double> blob(s.cells(), 0.0);
    for (int k = 0; k < clusters; ++k) {
      const Point2 c{rng.uniform(0.15, 0.85) * g.x_len, rng.uniform(0.15, 0.85) * g.y_len};
      const double weight = rng.uniform(0.5, 1.5);
      for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
          const double d = distance(s.center(i, j), c) / blob_sigma;
          blob[s.index(i, j)] += weight * std::exp(-0.5 * d * d);
        }
    }
    double bsum = 0.0;
    for (double b : blob) bsum += b;
    for (std::size_t i = 0; i < field.size(); ++i)
      field[i] += clusters > 0 && bsum > 0.0 ? (1.0 - floor_fraction) * blob[i] / bsum
                                             : (1.0 - floor_fraction) / static_cast<double>(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) s.density[i] = mass * field[i];
    s.total_mass = s.sum();
    return s;
  }
};

struct BiologyParams {
  double growth_per_hour{std::log(10.0) / (12.0 * 24.0)};  // ×10 over 12 days
  double diffusion{0.02};    // per hour per edge, random dispersal
  double attraction{0.10};   // per hour per edge, drift up the heat gradient
  double max_drift_rate{0.2};
  double heat_sigma_cells{3.0};  // smoothing of the field larvae follow
  double noise{0.02};            // multiplicative, per sqrt(hour)
  double moisture_decay_per_day{0.03};
  double max_substep_hours{1.0};
};

namespace detail {

// Separable Gaussian blur with clamp-to-edge borders; preserves constants.
inline std::vector<double> gaussian_blur(const std::vector<double>& in, int nx, int ny, double sigma) {
  if (sigma <= 0.0) return in;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int k = -radius; k <= radius; ++k) ksum += kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  for (double& k : kernel) k /= ksum;
  std::vector<double> tmp(in.size()), out(in.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * in[static_cast<std::size_t>(j) * nx + std::clamp(i + k, 0, nx - 1)];
      tmp[static_cast<std::size_t>(j) * nx + i] = acc;
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp[static_cast<std::size_t>(std::clamp(j + k, 0, ny - 1)) * nx + i];
      out[static_cast<std::size_t>(j) * nx + i] = acc;
    }
  return out;
}

inline double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double distance_to_polyline(const Point2& p, const std::vector<Point2>& pts) {
  if (pts.size() == 1) return distance(p, pts.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < pts.size(); ++k) best = std::min(best, distance_to_segment(p, pts[k - 1], pts[k]));
  return best;
}

}  // namespace detail

// Advances larvae growth and movement by `dt_hours`. Mass moves only across
// cell edges, as a random-dispersal term plus an upwind drift toward warmer
// (denser, smoothed) neighbors, so clusters form at the heat-field scale.
// Multiplicative noise is renormalized and growth is a uniform exp(g·dt), so
// total mass changes by exactly that factor.
inline SubstrateState step_biology(const SubstrateState& in, double dt_hours, const BiologyParams& p, Rng& rng) {
  if (!(dt_hours > 0.0)) throw InvariantError("step_biology: dt must be > 0");
  SubstrateState s = in;
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt_hours / p.max_substep_hours)));
  const double h = dt_hours / substeps;
  const int nx = s.nx, ny = s.ny;
  std::vector<double> flux_sum(s.cells());

  for (int step = 0; step < substeps; ++step) {
    if (p.noise > 0.0) {
      const double before = s.sum();
      const double amp = p.noise * std::sqrt(h) * std::sqrt(3.0);
      for (double& d : s.density) d *= std::max(0.0, 1.0 + rng.uniform(-amp, amp));
      const double after = s.sum();
      if (after > 0.0)
        for (double& d : s.density) d *= before / after;
    }

    const std::vector<double> heat = detail::gaussian_blur(s.density, nx, ny, p.heat_sigma_cells);
    double heat_mean = 0.0;
    for (double v : heat) heat_mean += v;
    heat_mean /= static_cast<double>(heat.size());

    std::fill(flux_sum.begin(), flux_sum.end(), 0.0);
    auto exchange = [&](std::size_t a, std::size_t b) {
      // positive flux moves mass a -> b
      double f = p.diffusion * (s.density[a] - s.density[b]);
      if (heat_mean > 0.0) {
        const double rate = std::min(p.attraction * std::abs(heat[b] - heat[a]) / heat_mean, p.max_drift_rate);
        f += heat[b] > heat[a] ? rate * s.density[a] : -rate * s.density[b];
      }
      f *= h;
      flux_sum[a] -= f;
      flux_sum[b] += f;
    };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (i + 1 < nx) exchange(s.index(i, j), s.index(i + 1, j));
        if (j + 1 < ny) exchange(s.index(i, j), s.index(i, j + 1));
      }
    const double growth = std::exp(p.growth_per_hour * h);
    const double dry = std::exp(-p.moisture_decay_per_day * h / 24.0);
    for (std::size_t k = 0; k < s.cells(); ++k) {
      s.density[k] = std::max(0.0, s.density[k] + flux_sum[k]) * growth;
      s.moisture[k] *= dry;
    }
  }
  s.total_mass = in.total_mass * std::exp(p.growth_per_hour * dt_hours);
  // keep Σ density == total_mass against clamp/rounding drift
  const double sum = s.sum();
  if (sum > 0.0)
    for (double& d : s.density) d *= s.total_mass / sum;
  return s;
}

// Cells whose centers lie within `radius` of the path polyline.
inline std::vector<std::uint8_t> swept_cells(const SubstrateState& s, const std::vector<Point2>& path, double radius) {
  std::vector<std::uint8_t> touched(s.cells(), 0);
  if (path.empty()) return touched;
  double min_x = path[0].x, max_x = path[0].x, min_y = path[0].y, max_y = path[0].y;
  for (const auto& p : path) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.nx; ++i) {
      const Point2 c = s.center(i, j);
      if (c.x < min_x - radius || c.x > max_x + radius || c.y < min_y - radius || c.y > max_y + radius) continue;
      touched[s.index(i, j)] = detail::distance_to_polyline(c, path) <= radius ? 1 : 0;
    }
  return touched;
}

inline double swept_fraction(const std::vector<std::uint8_t>& touched) {
  if (touched.empty()) return 0.0;
  std::size_t n = 0;
  for (auto t : touched) n += t;
  return static_cast<double>(n) / static_cast<double>(touched.size());
}

// Box half-width, in cells, used for mixing: the box spans the sweep diameter.
inline int mixing_half_width(double sweep_radius, double cell) {
  return std::max(1, static_cast<int>(std::lround(sweep_radius / cell)));
}

// Spindle mixing: each swept cell is replaced by an average over the swept
// cells in its (2k+1)² box. Weights are Metropolis weights
// w_ij = 1 / max(|N_i|, |N_j|), w_ii = 1 − Σ_j w_ij, which equal the plain box
// mean wherever neighborhoods are full and keep the operator symmetric and
// doubly stochastic at the swept region's edges: mass is conserved, a uniform
// field stays uniform, and variance never increases.
inline SubstrateState apply_spindle(const SubstrateState& in, const planner::ToolPath& path, const SpindleSpec& spec) {
  if (planner::path_length(path) <= 0.0) return in;
  const double radius = spec.sweep_radius();
  const auto touched = swept_cells(in, path.waypoints, radius);
  const int k = mixing_half_width(radius, in.cell);
  const int nx = in.nx, ny = in.ny;

  // neighborhood sizes via a summed-area table over the swept mask
  std::vector<int> sat(static_cast<std::size_t>(nx + 1) * (ny + 1), 0);
  auto at = [&](int i, int j) -> int& { return sat[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      at(i + 1, j + 1) = touched[in.index(i, j)] + at(i, j + 1) + at(i + 1, j) - at(i, j);
  std::vector<int> nsize(in.cells(), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!touched[in.index(i, j)]) continue;
      const int i0 = std::max(0, i - k), i1 = std::min(nx, i + k + 1);
      const int j0 = std::max(0, j - k), j1 = std::min(ny, j + k + 1);
      nsize[in.index(i, j)] = at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    }

  SubstrateState out = in;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t a = in.index(i, j);
      if (!touched[a]) continue;
      double acc = 0.0, wsum = 0.0;
      for (int jj = std::max(0, j - k); jj < std::min(ny, j + k + 1); ++jj)
        for (int ii = std::max(0, i - k); ii < std::min(nx, i + k + 1); ++ii) {
          const std::size_t b = in.index(ii, jj);
          if (b == a || !touched[b]) continue;
          const double w = 1.0 / std::max(nsize[a], nsize[b]);
          acc += w * in.density[b];
          wsum += w;
        }
      out.density[a] = acc + (1.0 - wsum) * in.density[a];
    }
  return out;
}

// Coefficient of variation of the density grid; 0 when perfectly mixed.
inline double dispersal_index(const SubstrateState& s) {
  if (s.cells() == 0) throw InvariantError("dispersal_index: empty grid");
  const double n = static_cast<double>(s.cells());
  const double mean = s.sum() / n;
  if (!(mean > 0.0)) throw InvariantError("dispersal_index: total mass must be > 0");
  double var = 0.0;
  for (double d : s.density) var += (d - mean) * (d - mean);
  return std::sqrt(var / n) / mean;
}

// Area fraction of the bin floor within `radius` of the path, integrated
// column by column: for each x the swept set of every segment is one interval
// in y (the swept set is convex), found by bisection on the distance function,
// and the union of the intervals is clipped to the bin.
inline double swept_area_fraction(const BinGeometry& g, const std::vector<Point2>& path, double radius,
                                  int columns = 20000) {
  if (path.empty()) return 0.0;
  std::vector<std::pair<Point2, Point2>> segs;
  if (path.size() == 1) segs.push_back({path[0], path[0]});
  for (std::size_t k = 1; k < path.size(); ++k) segs.push_back({path[k - 1], path[k]});

  double area = 0.0;
  const double dx = g.x_len / columns;
  std::vector<std::pair<double, double>> spans;
  for (int c = 0; c < columns; ++c) {
    const double x = (c + 0.5) * dx;
    spans.clear();
    for (const auto& [a, b] : segs) {
      // y on the segment closest to the vertical line at x
      const double sx = b.x - a.x;
      const double t = sx != 0.0 ? std::clamp((x - a.x) / sx, 0.0, 1.0) : 0.0;
      const double ystar = a.y + t * (b.y - a.y);
      auto dist = [&](double y) { return detail::distance_to_segment({x, y}, a, b); };
      if (dist(ystar) > radius) continue;
      auto edge = [&](double inside, double outside) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (inside + outside);
          (dist(mid) <= radius ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
      };
      const double span = std::abs(b.y - a.y) + radius;
      spans.push_back({edge(ystar, ystar - span - radius), edge(ystar, ystar + span + radius)});
    }
    std::sort(spans.begin(), spans.end());
    double covered = 0.0, cur_lo = 0.0, cur_hi = -1.0;
    bool open = false;
    for (auto [lo, hi] : spans) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, g.y_len);
      if (hi <= lo) continue;
      if (!open || lo > cur_hi) {
        if (open) covered += cur_hi - cur_lo;
        cur_lo = lo;
        cur_hi = hi;
        open = true;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (open) covered += cur_hi - cur_lo;
    area += covered * dx;
  }
  return area / (g.x_len * g.y_len);
}

}  // namespace smartlid::sim
