#pragma once

#include <optional>
#include <vector>

#include "smartlid/vision/colorspace.hpp"
#include "smartlid/vision/components.hpp"
#include "smartlid/vision/contours.hpp"
#include "smartlid/vision/metrics.hpp"
#include "smartlid/vision/otsu.hpp"
#include "smartlid/vision/thermal.hpp"

namespace smartlid::vision {

// Everything the growth pipeline produces for one normalized thermal frame.
struct FrameAnalysis {
  int threshold{0};
  Labeling labeling;
  ComponentSet clusters;  // after the minimum-area filter
  std::vector<Contour> contours;
  std::int64_t growth_proxy{0};
  ColorImage heat_map;  // inferno rendering
  ColorImage overlay;   // heat map with cluster outlines
};

// normalize -> inferno -> Otsu -> segment -> components -> area filter -> contours -> overlay.
// A frame with a single intensity has nothing to separate and yields no clusters.
inline FrameAnalysis analyze_frame(const GrayImage& frame, int min_component_area) {
  FrameAnalysis a;
  a.heat_map = apply_inferno(frame);
  const Histogram256 h = histogram(frame);
  int occupied = 0;
  for (auto c : h.counts) occupied += c != 0;
  if (occupied < 2) {
    a.threshold = 255;
    a.labeling.labels = LabelImage{frame.width, frame.height, std::vector<std::int32_t>(frame.size(), 0)};
    a.overlay = a.heat_map;
    return a;
  }
  a.threshold = otsu_threshold(h);
  a.labeling = connected_components(segment(frame, a.threshold));
  a.clusters = filter_components(a.labeling.components, min_component_area);
  Labeling kept = connected_components(mask_of(a.labeling.labels, a.clusters));
  a.contours = extract_contours(kept);
  a.growth_proxy = growth_proxy(a.clusters);
  a.overlay = overlay_contours(a.heat_map, a.contours);
  return a;
}

inline FrameAnalysis analyze_thermal(const RawThermal& raw, double t_lo, double t_hi, int min_component_area) {
  return analyze_frame(normalize_thermal(raw, t_lo, t_hi), min_component_area);
}

// Mixing efficacy between a before and after frame, optionally against a
// manually mixed reference frame of the same bin (compared to `before`).
inline MixReport analyze_mixing(const GrayImage& before, const GrayImage& after, int delta,
                                const GrayImage* baseline_after = nullptr, const Mask* roi = nullptr) {
  const ChangeCount c = count_changed(before, after, delta, roi);
  std::optional<std::int64_t> baseline;
  if (baseline_after) baseline = count_changed(before, *baseline_after, delta, roi).changed;
  if (baseline && *baseline == 0) throw Error("baseline frame shows no mixed pixels");
  return mix_report(c.changed, c.unchanged, baseline);
}

}  // namespace smartlid::vision
