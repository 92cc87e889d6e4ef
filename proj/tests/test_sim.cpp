#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "smartlid/planner/raster.hpp"
#include "smartlid/sim/gantry.hpp"
#include "smartlid/sim/observe.hpp"
#include "smartlid/sim/scenario.hpp"
#include "smartlid/sim/substrate.hpp"

using namespace smartlid;
using namespace smartlid::sim;

namespace {

SubstrateState row_of(std::vector<double> d, double cell = 0.01) {
  SubstrateState s;
  s.nx = static_cast<int>(d.size());
  s.ny = 1;
  s.cell = cell;
  s.density = std::move(d);
  s.moisture.assign(s.density.size(), 0.6);
  s.total_mass = s.sum();
  return s;
}

// sweep radius 0.01 m → mixing box half-width of one 1 cm cell
SpindleSpec one_cell_spindle() {
  SpindleSpec s;
  s.finger_count = 1;
  s.finger_radius = 0.004;
  s.finger_offsets = {0.006};
  return s;
}

double variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Biology, TenfoldGrowthOverTwelveDays) {
  const Config c{};
  SubstrateState s = SubstrateState::clustered(c.bin, 0.01, 50.0, 3, 5);
  BiologyParams p;
  Rng rng(3);
  for (int h = 0; h < 12 * 24; ++h) s = step_biology(s, 1.0, p, rng);
  EXPECT_NEAR(s.total_mass / 50.0, 10.0, 0.1);
  EXPECT_NEAR(s.sum(), s.total_mass, 1e-9 * s.total_mass);
  for (double d : s.density) ASSERT_GE(d, 0.0);
}

TEST(Biology, NoiselessUniformFieldStaysUniform) {
  const Config c{};
  SubstrateState s = SubstrateState::uniform(c.bin, 0.01, 40.0);
  BiologyParams p;
  p.noise = 0.0;
  Rng rng(1);
  for (int h = 0; h < 48; ++h) s = step_biology(s, 1.0, p, rng);
  EXPECT_LT(dispersal_index(s), 1e-9);
}

TEST(Biology, UniformFieldStaysUniformInExpectation) {
  BinGeometry g{0.10, 0.06, 0.1, 0.01};
  const SubstrateState start = SubstrateState::uniform(g, 0.01, 6.0);
  BiologyParams p;
  p.growth_per_hour = 0.0;
  std::vector<double> mean(start.cells(), 0.0);
  double single = 0.0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    Rng rng(mix_seed(99, static_cast<std::uint64_t>(r)));
    SubstrateState s = start;
    for (int h = 0; h < 6; ++h) s = step_biology(s, 1.0, p, rng);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.density[i] / runs;
    single += dispersal_index(s) / runs;
  }
  SubstrateState avg = start;
  avg.density = mean;
  // averaging over runs shrinks the spread well below a single run's
  EXPECT_LT(dispersal_index(avg), 0.25 * single);
  EXPECT_NEAR(avg.sum(), 6.0, 1e-9);
}

TEST(Spindle, HandComputedFiveCellRow) {
  const planner::ToolPath path = planner::make_path({{0.005, 0.005}, {0.045, 0.005}}, {});
  const SpindleSpec spec = one_cell_spindle();
  ASSERT_EQ(mixing_half_width(spec.sweep_radius(), 0.01), 1);

  // end cells have 2 swept neighbors-with-self, interior cells 3
  const auto a = apply_spindle(row_of({1, 0, 0, 0, 0}), path, spec);
  EXPECT_NEAR(a.density[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.density[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(a.density[2], 0.0);
  EXPECT_EQ(a.density[4], 0.0);

  const auto b = apply_spindle(row_of({0, 0, 3, 0, 0}), path, spec);
  EXPECT_NEAR(b.density[0], 0.0, 1e-15);
  EXPECT_NEAR(b.density[1], 1.0, 1e-15);
  EXPECT_NEAR(b.density[2], 1.0, 1e-15);
  EXPECT_NEAR(b.density[3], 1.0, 1e-15);
  EXPECT_NEAR(b.density[4], 0.0, 1e-15);
}

TEST(Spindle, UnsweptCellsAreUntouched) {
  const planner::ToolPath path = planner::make_path({{0.005, 0.005}, {0.015, 0.005}}, {});
  const auto out = apply_spindle(row_of({5, 1, 0, 7, 2}), path, one_cell_spindle());
  EXPECT_EQ(out.density[3], 7.0);
  EXPECT_EQ(out.density[4], 2.0);
}

TEST(Spindle, ZeroLengthPathChangesNothing) {
  const Config c{};
  const SubstrateState s = SubstrateState::clustered(c.bin, 0.005, 50.0, 4, 2);
  const planner::ToolPath dot = planner::make_path({{0.2, 0.1}, {0.2, 0.1}}, {});
  EXPECT_EQ(apply_spindle(s, dot, c.spindle).density, s.density);
}

TEST(Spindle, ConservesMassAndNeverIncreasesVariance) {
  const Config c{};
  const planner::ToolPath raster = planner::plan_raster(c.bin, c.planner.raster_pitch);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SubstrateState s = SubstrateState::clustered(c.bin, 0.005, 50.0 * seed, 4, seed);
    const SubstrateState out = apply_spindle(s, raster, c.spindle);
    ASSERT_NEAR(out.sum(), s.sum(), 1e-9 * s.sum());
    ASSERT_LT(variance(out.density), variance(s.density));
    ASSERT_LT(dispersal_index(out), dispersal_index(s));
    for (double d : out.density) ASSERT_GE(d, 0.0);
  }
  const SubstrateState u = SubstrateState::uniform(c.bin, 0.005, 10.0);
  const SubstrateState uo = apply_spindle(u, raster, c.spindle);
  for (std::size_t i = 0; i < u.cells(); ++i) ASSERT_NEAR(uo.density[i], u.density[i], 1e-15);
}

TEST(Dispersal, SingleOccupiedCell) {
  for (int n : {2, 5, 17, 100}) {
    std::vector<double> d(n, 0.0);
    d[n / 2] = 3.5;
    EXPECT_NEAR(dispersal_index(row_of(d)), std::sqrt(n - 1.0), 1e-12);
  }
  EXPECT_EQ(dispersal_index(row_of({2, 2, 2})), 0.0);
  EXPECT_THROW(dispersal_index(row_of({0, 0})), InvariantError);
}

TEST(Coverage, SweptCellsBracketTheAnalyticArea) {
  const Config c{};
  const SubstrateState s = SubstrateState::uniform(c.bin, 0.005, 1.0);
  const auto path = planner::plan_raster(c.bin, c.planner.raster_pitch).waypoints;
  const double r = c.spindle.sweep_radius();
  const double half_diag = s.cell * std::sqrt(0.5);
  const double analytic = swept_area_fraction(c.bin, path, r);
  const double inner = swept_fraction(swept_cells(s, path, r - half_diag));
  const double outer = swept_fraction(swept_cells(s, path, r + half_diag));
  const double cells = swept_fraction(swept_cells(s, path, r));
  EXPECT_LE(inner, analytic + 1e-4);
  EXPECT_GE(outer, analytic - 1e-4);
  EXPECT_LE(inner, cells);
  EXPECT_LE(cells, outer);
  EXPECT_GE(cells, 0.84);
}

TEST(Coverage, AnalyticAreaOfSimpleShapes) {
  const BinGeometry g{1.0, 1.0, 0.1, 0.1};
  // a disk fully inside the bin
  EXPECT_NEAR(swept_area_fraction(g, {{0.5, 0.5}}, 0.1), 3.14159265358979 * 0.01, 1e-5);
  // a stadium: rectangle plus two half disks
  EXPECT_NEAR(swept_area_fraction(g, {{0.3, 0.5}, {0.7, 0.5}}, 0.1), 0.4 * 0.2 + 3.14159265358979 * 0.01, 1e-5);
}

TEST(Thermal, RenderIsDeterministicAndPeaksAtTheCluster) {
  const Config c{};
  const SubstrateState s = SubstrateState::clustered(c.bin, 0.005, 50.0, 1, 11, 0.02, 0.05);
  const auto a = render_thermal(s, 4), b = render_thermal(s, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(render_thermal(s, 5), a);
  const auto densest = std::max_element(s.density.begin(), s.density.end()) - s.density.begin();
  const int di = static_cast<int>(densest % s.nx), dj = static_cast<int>(densest / s.nx);
  const auto hottest = std::max_element(a.counts.begin(), a.counts.end()) - a.counts.begin();
  const int hcol = static_cast<int>(hottest % s.nx), hrow = static_cast<int>(hottest / s.nx);
  EXPECT_LE(std::abs(hcol - di), 2);
  EXPECT_LE(std::abs((s.ny - 1 - hrow) - dj), 2);
}

TEST(Sensors, NoiselessReadingsRiseWithMass) {
  const Config c{};
  SensorModel m;
  m.temp_noise = m.humidity_noise = m.moisture_noise = m.ph_noise = m.co2_noise = m.no2_noise = 0.0;
  SensorFrame prev{};
  for (int k = 1; k <= 20; ++k) {
    const SensorFrame f = sample_sensors(SubstrateState::uniform(c.bin, 0.01, 10.0 * k), 1000, 1, m);
    if (k > 1) {
      EXPECT_GT(f.temperature, prev.temperature);
      EXPECT_GT(f.co2, prev.co2);
      EXPECT_GT(f.no2, prev.no2);
    }
    EXPECT_NO_THROW(f.validate());
    prev = f;
  }
}

TEST(Gantry, RasterTraceOrder) {
  const Config c{};
  VirtualGantry g(c.bin, c.motor);
  const auto raster = planner::plan_raster(c.bin, c.planner.raster_pitch,
                                           {c.spindle.plunge_depth, c.planner.travel_speed, c.spindle.spin_rate});
  const int lanes = planner::raster_layout(c.bin, c.planner.raster_pitch).lanes;
  const auto trace = gantry_execute(g, raster, c.bin, c.motor);
  ASSERT_GE(trace.size(), 6u);
  EXPECT_EQ(trace.front().kind, GantryEventKind::kPlunge);
  EXPECT_EQ(trace[1].kind, GantryEventKind::kSpinOn);
  EXPECT_EQ(trace.back().kind, GantryEventKind::kHome);
  EXPECT_EQ(trace[trace.size() - 2].kind, GantryEventKind::kEndStop);
  EXPECT_EQ(trace[trace.size() - 3].kind, GantryEventKind::kRetract);
  EXPECT_EQ(trace[trace.size() - 4].kind, GantryEventKind::kSpinOff);
  const auto moves = std::count_if(trace.begin(), trace.end(), [](const auto& e) { return e.kind == GantryEventKind::kMove; });
  EXPECT_EQ(moves, 2 * lanes - 1);
  EXPECT_EQ(g.pose(), g.home());
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i].t, trace[i - 1].t);
}

TEST(Gantry, PreconditionsAndLimits) {
  const Config c{};
  VirtualGantry g(c.bin, c.motor);
  g.plunge(0.0, 0.02, 0.01);
  EXPECT_THROW(gantry_execute(g, planner::plan_raster(c.bin, 0.08), c.bin, c.motor), GantryError);
  VirtualGantry h(c.bin, c.motor);
  const auto outside = planner::make_path({{0.03, 0.03}, {0.60, 0.03}}, {});
  EXPECT_THROW(gantry_execute(h, outside, c.bin, c.motor), GantryError);
  EXPECT_TRUE(h.homed());
}

TEST(Gantry, EventFormat) {
  EXPECT_EQ(format_event({12.5, GantryEventKind::kMove, "0.100000 0.200000"}), "12.500 MOVE 0.100000 0.200000");
  EXPECT_EQ(format_event({0.0, GantryEventKind::kHome, ""}), "0.000 HOME");
}

TEST(Scenario, ParsesAndResolvesConfigPath) {
  const Scenario s = load_scenario(SMARTLID_DATA_DIR "/scenario.conf");
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.days, 10);
  EXPECT_EQ(s.start, 1767225600);
  EXPECT_DOUBLE_EQ(s.cell, 0.005);
  EXPECT_EQ(std::filesystem::path(s.config_path), std::filesystem::path(SMARTLID_DATA_DIR) / "default.conf");
  EXPECT_THROW(parse_scenario("seeds = 4\n"), ConfigError);
  EXPECT_THROW(parse_scenario("initial_mass = -1\n"), ConfigError);
  EXPECT_THROW(parse_scenario("start = tomorrow\n"), ConfigError);
}

TEST(ClosedLoop, Reproducible) {
  Scenario sc;
  sc.seed = 3;
  std::string traces[2], logs[2];
  for (int k = 0; k < 2; ++k) {
    ClosedLoop loop(Config{}, sc);
    loop.run_days(2);
    traces[k] = loop.event_trace() + loop.gantry_trace();
    logs[k] = loop.log().contents();
    EXPECT_EQ(loop.start_aeration_count(), 2u);
  }
  EXPECT_EQ(traces[0], traces[1]);
  EXPECT_EQ(logs[0], logs[1]);
  EXPECT_FALSE(logs[0].empty());
}

TEST(ClosedLoop, AerationBreaksUpClusters) {
  Scenario sc;
  sc.seed = 5;
  ClosedLoop loop(Config{}, sc);
  loop.run_days(3);
  ASSERT_EQ(loop.aerations().size(), 3u);
  for (const auto& a : loop.aerations()) {
    EXPECT_TRUE(a.completed);
    EXPECT_LT(a.dispersal_after, a.dispersal_before);
    EXPECT_GE(a.coverage, 0.84);
  }
  // the gantry only moves between a START_AERATION and its return to IDLE
  for (const auto& e : loop.gantry().trace()) {
    const bool inside = std::any_of(loop.aerations().begin(), loop.aerations().end(), [&](const auto& a) {
      return e.t >= a.started && e.t <= a.started + 3600.0;
    });
    EXPECT_TRUE(inside) << format_event(e);
  }
}
