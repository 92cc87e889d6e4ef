#pragma once

#include <array>
#include <cstdint>

#include "smartlid/core/image.hpp"

namespace smartlid::vision {

struct Histogram256 {
  std::array<std::uint64_t, 256> counts{};

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

inline Histogram256 histogram(const GrayImage& g) {
  Histogram256 h;
  for (auto v : g.data) ++h.counts[v];
  return h;
}

// Otsu's threshold. Class 0 holds intensities ≤ t, class 1 the rest; returns
// the t that maximizes the between-class variance, smallest t on ties.
//
// With n0, s0 the count and intensity sum of class 0 and N, S the totals, the
// between-class variance ω0·ω1·(μ0−μ1)² equals (s0·N − S·n0)² / (N²·n0·n1);
// the N² factor is dropped since it does not move the argmax.
inline int otsu_threshold(const Histogram256& h) {
  int occupied = 0;
  double n = 0.0, s = 0.0;
  for (int i = 0; i < 256; ++i) {
    if (h.counts[i] != 0) ++occupied;
    n += static_cast<double>(h.counts[i]);
    s += static_cast<double>(h.counts[i]) * i;
  }
  if (occupied < 2) throw Error("degenerate histogram: need at least two distinct intensities");

  int best_t = 0;
  double best = -1.0;
  double n0 = 0.0, s0 = 0.0;
  for (int t = 0; t < 255; ++t) {
    n0 += static_cast<double>(h.counts[t]);
    s0 += static_cast<double>(h.counts[t]) * t;
    const double n1 = n - n0;
    if (n0 == 0.0 || n1 == 0.0) continue;
    const double d = s0 * n - s * n0;
    const double score = d * d / (n0 * n1);
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace smartlid::vision
