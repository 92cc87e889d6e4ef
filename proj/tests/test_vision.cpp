#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "smartlid/core/config.hpp"
#include "smartlid/vision/pipeline.hpp"

using namespace smartlid;
using namespace smartlid::vision;

namespace {

// Exhaustive argmax of ω0·ω1·(μ0−μ1)² in exact integer arithmetic.
int otsu_oracle(const Histogram256& h) {
  __extension__ typedef __int128 i128;
  i128 n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += h.counts[i];
    s += static_cast<i128>(h.counts[i]) * i;
  }
  int best_t = -1;
  i128 best_num = 0, best_den = 1;
  for (int t = 0; t < 256; ++t) {
    i128 n0 = 0, s0 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += h.counts[i];
      s0 += static_cast<i128>(h.counts[i]) * i;
    }
    const i128 n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const i128 d = s0 * n - s * n0;
    const i128 num = d * d, den = n0 * n1;
    if (best_t < 0 || num * best_den > best_num * den) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

Histogram256 hist_of(std::initializer_list<int> values) {
  Histogram256 h;
  for (int v : values) ++h.counts[v];
  return h;
}

// Recursive flood fill over 8-neighbors, labels in row-major discovery order.
void flood(const Mask& m, std::vector<std::int32_t>& lab, int r, int c, std::int32_t id) {
  if (!m.inside(r, c) || !m.at(r, c) || lab[static_cast<std::size_t>(r) * m.width + c] != 0) return;
  lab[static_cast<std::size_t>(r) * m.width + c] = id;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if (dr || dc) flood(m, lab, r + dr, c + dc, id);
}

std::vector<std::int32_t> flood_labels(const Mask& m) {
  std::vector<std::int32_t> lab(m.bits.size(), 0);
  std::int32_t next = 0;
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c)
      if (m.at(r, c) && lab[static_cast<std::size_t>(r) * m.width + c] == 0) flood(m, lab, r, c, ++next);
  return lab;
}

Mask random_mask(std::mt19937_64& rng, int w, int h, double fill) {
  std::bernoulli_distribution b(fill);
  Mask m(w, h);
  for (auto& v : m.bits) v = b(rng) ? 1 : 0;
  return m;
}

Mask mask_from(const std::vector<std::string>& rows) {
  Mask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c) m.set(r, c, rows[r][c] == '#');
  return m;
}

}  // namespace

TEST(Otsu, TiesGoToSmallestThreshold) {
  EXPECT_EQ(otsu_threshold(hist_of({10, 10, 200, 200})), 10);
  EXPECT_EQ(otsu_oracle(hist_of({10, 10, 200, 200})), 10);
  EXPECT_EQ(otsu_threshold(hist_of({0, 255})), 0);
}

TEST(Otsu, DegenerateHistogram) {
  try {
    otsu_threshold(hist_of({7, 7, 7}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate histogram"), std::string::npos);
  }
  EXPECT_THROW(otsu_threshold(Histogram256{}), Error);
}

TEST(Otsu, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    Histogram256 h;
    std::uniform_int_distribution<int> bins(2, 256), value(0, 255), count(1, 400);
    const int k = bins(rng);
    for (int j = 0; j < k; ++j) h.counts[value(rng)] += count(rng);
    if (std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c != 0; }) < 2) continue;
    ASSERT_EQ(otsu_threshold(h), otsu_oracle(h)) << "case " << i;
  }
}

TEST(Segment, StrictInequality) {
  GrayImage g(3, 1);
  g.data = {0, 255, 0};
  const Mask m = segment(g, 0);
  EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(segment(g, 255).count(), 0u);
}

TEST(Components, HandTracedExample) {
  const Mask m = mask_from({
      "##...",
      "##...",
      "...#.",
      "...#.",
      "...##",
  });
  const auto lab = connected_components(m);
  ASSERT_EQ(lab.components.size(), 2u);
  EXPECT_EQ(lab.components.components[0].area, 4);
  EXPECT_EQ(lab.components.components[1].area, 4);
  EXPECT_DOUBLE_EQ(lab.components.components[0].centroid_row, 0.5);
  EXPECT_DOUBLE_EQ(lab.components.components[0].centroid_col, 0.5);
  EXPECT_DOUBLE_EQ(lab.components.components[1].centroid_row, 3.25);
  EXPECT_DOUBLE_EQ(lab.components.components[1].centroid_col, 3.25);
  EXPECT_EQ(lab.components.components[1].bbox, (BoundingBox{2, 3, 4, 4}));
  EXPECT_EQ(growth_proxy(lab.components), 8);
}

TEST(Components, EmptyMask) {
  const auto lab = connected_components(Mask(4, 3));
  EXPECT_TRUE(lab.components.empty());
  EXPECT_EQ(growth_proxy(lab.components), 0);
}

TEST(Components, DiagonalNeighborsMerge) {
  const auto lab = connected_components(mask_from({"#..", ".#.", "..#"}));
  EXPECT_EQ(lab.components.size(), 1u);
}

TEST(Components, MatchFloodFillOracleOnRandomMasks) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> fill(0.05, 0.6);
  for (int i = 0; i < 60; ++i) {
    const Mask m = random_mask(rng, 64, 64, fill(rng));
    const auto lab = connected_components(m);
    const auto oracle = flood_labels(m);
    ASSERT_EQ(lab.labels.labels, oracle);
    std::int64_t total = 0;
    for (const auto& c : lab.components.components) {
      total += c.area;
      double sr = 0, sc = 0;
      std::int64_t a = 0;
      for (int r = 0; r < m.height; ++r)
        for (int col = 0; col < m.width; ++col)
          if (oracle[static_cast<std::size_t>(r) * m.width + col] == c.label) {
            ++a;
            sr += r;
            sc += col;
          }
      ASSERT_EQ(c.area, a);
      ASSERT_NEAR(c.centroid_row, sr / a, 1e-12);
      ASSERT_NEAR(c.centroid_col, sc / a, 1e-12);
      ASSERT_GE(c.centroid_row, c.bbox.min_row);
      ASSERT_LE(c.centroid_row, c.bbox.max_row);
      ASSERT_GE(c.centroid_col, c.bbox.min_col);
      ASSERT_LE(c.centroid_col, c.bbox.max_col);
    }
    EXPECT_EQ(static_cast<std::size_t>(total), m.count());
  }
}

TEST(Contours, SinglePixel) {
  const auto cs = extract_contours(mask_from({"...", ".#.", "..."}));
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0], (Contour{{1, 1}}));
}

TEST(Contours, FilledSquareIsTracedClockwise) {
  const auto cs = extract_contours(mask_from({
      ".....",
      ".###.",
      ".###.",
      ".###.",
      ".....",
  }));
  ASSERT_EQ(cs.size(), 1u);
  const Contour expected{{1, 1}, {1, 2}, {1, 3}, {2, 3}, {3, 3}, {3, 2}, {3, 1}, {2, 1}};
  EXPECT_EQ(cs[0], expected);
}

TEST(Contours, BorderNeverExceedsArea) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 40; ++i) {
    const Mask m = random_mask(rng, 40, 30, 0.45);
    const auto lab = connected_components(m);
    const auto cs = extract_contours(lab);
    ASSERT_EQ(cs.size(), lab.components.size());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      std::vector<Pixel> distinct;
      for (const auto& p : cs[k]) {
        ASSERT_EQ(lab.labels.at(p.row, p.col), lab.components.components[k].label);
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
      }
      EXPECT_LE(static_cast<std::int64_t>(distinct.size()), lab.components.components[k].area);
    }
  }
}

TEST(Overlay, IdentityAndIdempotence) {
  ColorImage base(6, 4);
  for (std::size_t i = 0; i < base.data.size(); ++i) base.data[i] = static_cast<std::uint8_t>(i);
  EXPECT_EQ(overlay_contours(base, {}), base);
  const std::vector<Contour> cs{{{0, 0}, {1, 1}, {3, 5}}};
  const ColorImage once = overlay_contours(base, cs);
  EXPECT_EQ(overlay_contours(once, cs), once);
  int changed = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c) {
      const bool on = (r == 0 && c == 0) || (r == 1 && c == 1) || (r == 3 && c == 5);
      if (on) {
        EXPECT_EQ(once.px(r, c)[0], 255);
        EXPECT_EQ(once.px(r, c)[1], 0);
        EXPECT_EQ(once.px(r, c)[2], 0);
        ++changed;
      } else {
        EXPECT_TRUE(std::equal(once.px(r, c), once.px(r, c) + 3, base.px(r, c)));
      }
    }
  EXPECT_EQ(changed, 3);
  EXPECT_THROW(overlay_contours(base, {{{4, 0}}}), Error);
  EXPECT_THROW(overlay_contours(base, {{{0, -1}}}), Error);
}

TEST(Overlay, RedIsConvertedForBgrBase) {
  const ColorImage out = overlay_contours(ColorImage(1, 1, Colorspace::kBGR), {{{0, 0}}});
  EXPECT_EQ(out.data, (std::vector<std::uint8_t>{0, 0, 255}));
}

TEST(Thermal, EndpointsMidpointAndClamp) {
  RawThermal raw(5, 1);
  raw.counts = {celsius_to_counts(20.0), celsius_to_counts(45.0), celsius_to_counts(32.5), celsius_to_counts(-5.0),
                celsius_to_counts(80.0)};
  const GrayImage g = normalize_thermal(raw, 20.0, 45.0);
  EXPECT_EQ(g.data, (std::vector<std::uint8_t>{0, 255, 128, 0, 255}));
  EXPECT_THROW(normalize_thermal(raw, 30.0, 30.0), InvariantError);
  EXPECT_THROW(normalize_thermal(raw, 31.0, 30.0), InvariantError);
}

TEST(Thermal, MonotoneInTemperature) {
  RawThermal raw(4001, 1);
  for (int i = 0; i <= 4000; ++i) raw.counts[i] = static_cast<std::uint16_t>(29000 + i);
  const GrayImage g = normalize_thermal(raw, 20.0, 45.0);
  for (std::size_t i = 1; i < g.data.size(); ++i) ASSERT_LE(g.data[i - 1], g.data[i]);
}

TEST(Thermal, MatchesRoundedLinearMap) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> t(10.0, 55.0);
  RawThermal raw(500, 1);
  for (auto& c : raw.counts) c = celsius_to_counts(t(rng));
  const GrayImage g = normalize_thermal(raw, 20.0, 45.0);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const double x = std::clamp((counts_to_celsius(raw.counts[i]) - 20.0) / 25.0, 0.0, 1.0) * 255.0;
    ASSERT_NEAR(g.data[i], x, 0.5 + 1e-6);
  }
}

TEST(Inferno, TableMatchesShippedDataFile) {
  std::ifstream f(SMARTLID_DATA_DIR "/inferno.txt");
  ASSERT_TRUE(f);
  std::string line;
  std::size_t i = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int r, g, b;
    ss >> r >> g >> b;
    ASSERT_LT(i, kInfernoTable.size());
    EXPECT_EQ(kInfernoTable[i], (Rgb8{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                      static_cast<std::uint8_t>(b)}))
        << i;
    ++i;
  }
  EXPECT_EQ(i, 256u);
}

TEST(Inferno, LuminanceStrictlyIncreases) {
  for (std::size_t i = 1; i < kInfernoTable.size(); ++i)
    ASSERT_LT(luminance(kInfernoTable[i - 1]), luminance(kInfernoTable[i])) << i;
  EXPECT_LT(luminance(kInfernoTable[0]), 5.0);
  EXPECT_GT(kInfernoTable[255].r, 240);
  EXPECT_GT(kInfernoTable[255].g, 240);
}

TEST(Inferno, ConstantInConstantOut) {
  const ColorImage c = apply_inferno(GrayImage(3, 3, 77));
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) EXPECT_TRUE(std::equal(c.px(r, col), c.px(r, col) + 3, c.px(0, 0)));
}

TEST(Colorspace, HsvAndYuvExamples) {
  ColorImage c(3, 1, Colorspace::kRGB);
  c.data = {255, 0, 0, 255, 255, 255, 128, 128, 128};
  EXPECT_EQ(rgb_to_hsv(c).data, (std::vector<std::uint8_t>{0, 255, 255, 0, 0, 255, 0, 0, 128}));
  EXPECT_EQ(rgb_to_yuv(c).data[6], 128);
  EXPECT_EQ(rgb_to_yuv(c).data[7], 128);
  EXPECT_EQ(rgb_to_yuv(c).data[8], 128);
  EXPECT_EQ(rgb_to_hsv(c).colorspace, Colorspace::kHSV);
  // green at 120° and blue at 240° of 360
  EXPECT_EQ(rgb_to_hsv_px(0, 255, 0)[0], 85);
  EXPECT_EQ(rgb_to_hsv_px(0, 0, 255)[0], 171);
}

TEST(Colorspace, BgrInputIsReordered) {
  ColorImage bgr(1, 1, Colorspace::kBGR);
  bgr.data = {0, 0, 255};  // red
  EXPECT_EQ(rgb_to_hsv(bgr).data, (std::vector<std::uint8_t>{0, 255, 255}));
  EXPECT_EQ(swap_rb(bgr).data, (std::vector<std::uint8_t>{255, 0, 0}));
}

TEST(Colorspace, WrongTagIsRejected) {
  EXPECT_THROW(rgb_to_hsv(ColorImage(1, 1, Colorspace::kYUV)), ColorspaceError);
  EXPECT_THROW(rgb_to_yuv(ColorImage(1, 1, Colorspace::kHSV)), ColorspaceError);
}

TEST(MixReport, PublishedPixelCounts) {
  const auto r = mix_report(101363, 48000, 149295);
  ASSERT_TRUE(r.efficacy_ratio);
  EXPECT_NEAR(*r.efficacy_ratio, 0.679, 0.001);
  EXPECT_DOUBLE_EQ(*r.efficacy_ratio, 101363.0 / 149295.0);
}

TEST(MixReport, CoverageArithmetic) {
  EXPECT_DOUBLE_EQ(mix_report(84, 16).coverage_fraction, 0.84);
  const auto z = mix_report(0, 10, 5);
  EXPECT_EQ(z.coverage_fraction, 0.0);
  EXPECT_EQ(*z.efficacy_ratio, 0.0);
  EXPECT_FALSE(mix_report(1, 1).efficacy_ratio);
  EXPECT_THROW(mix_report(0, 0), Error);
  EXPECT_THROW(mix_report(1, 1, 0), Error);
  EXPECT_THROW(mix_report(-1, 1), Error);
}

TEST(Pipeline, ConstantFrameHasNoClusters) {
  const auto a = analyze_frame(GrayImage(8, 8, 40), 1);
  EXPECT_TRUE(a.clusters.empty());
  EXPECT_EQ(a.growth_proxy, 0);
  EXPECT_EQ(a.overlay, a.heat_map);
}

TEST(Pipeline, GoldenFrames) {
  const Config c{};
  std::ifstream f(SMARTLID_FIXTURE_DIR "/golden.txt");
  ASSERT_TRUE(f);
  std::string line;
  int cases = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string before, after, baseline, eff;
    int threshold;
    std::size_t clusters;
    std::int64_t growth, mixed, unmixed;
    double coverage;
    ss >> before >> after >> baseline >> threshold >> clusters >> growth >> mixed >> unmixed >> coverage >> eff;
    ASSERT_FALSE(ss.fail()) << line;
    const std::string dir = SMARTLID_FIXTURE_DIR "/";
    const GrayImage b = read_gray(dir + before), a = read_gray(dir + after);
    std::optional<GrayImage> base;
    if (baseline != "-") base = read_gray(dir + baseline);
    const auto fa = analyze_frame(b, c.vision.min_component_area);
    EXPECT_EQ(fa.threshold, threshold) << line;
    EXPECT_EQ(fa.clusters.size(), clusters) << line;
    EXPECT_EQ(fa.growth_proxy, growth) << line;
    const auto r = analyze_mixing(b, a, c.vision.mix_delta, base ? &*base : nullptr);
    EXPECT_EQ(r.mixed_pixels, mixed) << line;
    EXPECT_EQ(r.unmixed_pixels, unmixed) << line;
    EXPECT_NEAR(r.coverage_fraction, coverage, 1e-6) << line;
    if (eff == "-") {
      EXPECT_FALSE(r.efficacy_ratio) << line;
    } else {
      ASSERT_TRUE(r.efficacy_ratio) << line;
      EXPECT_NEAR(*r.efficacy_ratio, std::stod(eff), 1e-6) << line;
    }
    // deterministic: same inputs, same report
    const auto again = analyze_mixing(b, a, c.vision.mix_delta, base ? &*base : nullptr);
    EXPECT_EQ(again.mixed_pixels, r.mixed_pixels);
    EXPECT_EQ(again.efficacy_ratio, r.efficacy_ratio);
    ++cases;
  }
  EXPECT_EQ(cases, 3);
}

TEST(Pipeline, SizeMismatchIsAnError) {
  EXPECT_THROW(analyze_mixing(GrayImage(2, 2), GrayImage(2, 3), 20), Error);
}
