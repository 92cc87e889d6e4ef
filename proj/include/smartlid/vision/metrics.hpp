#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>

#include "smartlid/core/image.hpp"
#include "smartlid/vision/components.hpp"

namespace smartlid::vision {

struct MixReport {
  std::int64_t mixed_pixels{0};
  std::int64_t unmixed_pixels{0};
  double coverage_fraction{0.0};
  std::optional<double> efficacy_ratio;  // mixed / manual-baseline mixed
};

inline MixReport mix_report(std::int64_t mixed, std::int64_t unmixed, std::optional<std::int64_t> baseline_mixed = {}) {
  if (mixed < 0 || unmixed < 0) throw Error("pixel counts must be ≥ 0");
  if (mixed + unmixed <= 0) throw Error("mix_report: mixed + unmixed must be > 0");
  MixReport r;
  r.mixed_pixels = mixed;
  r.unmixed_pixels = unmixed;
  r.coverage_fraction = static_cast<double>(mixed) / static_cast<double>(mixed + unmixed);
  if (baseline_mixed) {
    if (*baseline_mixed <= 0) throw Error("mix_report: baseline must be > 0");
    r.efficacy_ratio = static_cast<double>(mixed) / static_cast<double>(*baseline_mixed);
  }
  return r;
}

struct ChangeCount {
  std::int64_t changed{0};
  std::int64_t unchanged{0};
};

// A pixel counts as mixed when its intensity moved by more than `delta`
// between the two frames. Only pixels inside `roi` (if given) are counted.
inline ChangeCount count_changed(const GrayImage& before, const GrayImage& after, int delta,
                                 const Mask* roi = nullptr) {
  if (before.width != after.width || before.height != after.height)
    throw Error("before/after frames differ in size");
  if (roi && (roi->width != before.width || roi->height != before.height))
    throw Error("region of interest differs in size from the frames");
  ChangeCount c;
  for (std::size_t i = 0; i < before.data.size(); ++i) {
    if (roi && !roi->bits[i]) continue;
    if (std::abs(int{after.data[i]} - int{before.data[i]}) > delta) ++c.changed;
    else ++c.unchanged;
  }
  return c;
}

}  // namespace smartlid::vision
