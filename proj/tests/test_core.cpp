#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "smartlid/core/config.hpp"
#include "smartlid/core/image.hpp"
#include "smartlid/core/time.hpp"

using namespace smartlid;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("smartlid_core_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ShippedDefaultsMatchBuiltIns) {
  const Config c = load_config(SMARTLID_DATA_DIR "/default.conf");
  EXPECT_DOUBLE_EQ(c.bin.x_len, 0.48);
  EXPECT_DOUBLE_EQ(c.bin.y_len, 0.30);
  EXPECT_DOUBLE_EQ(c.substrate.dynamic_viscosity, 250.0);
  EXPECT_DOUBLE_EQ(c.motor.holding_torque, 0.20);
  EXPECT_EQ(c.schedule.aeration_time, (TimeOfDay{11, 0}));
  EXPECT_EQ(c.spindle.finger_count, 8);
  EXPECT_DOUBLE_EQ(c.spindle.finger_radius, 0.0075);
  EXPECT_TRUE(c == Config{});
}

TEST(Config, LoadIsDeterministic) {
  const std::string text = slurp(SMARTLID_DATA_DIR "/default.conf");
  EXPECT_TRUE(parse_config(text) == parse_config(text));
}

TEST(Config, ViscosityInCentipoiseBecomesPascalSeconds) {
  EXPECT_DOUBLE_EQ(parse_config("[substrate]\nviscosity = 250000 cps\n").substrate.dynamic_viscosity, 250.0);
  EXPECT_DOUBLE_EQ(parse_config("[substrate]\nviscosity = 250 Pa.s\n").substrate.dynamic_viscosity, 250.0);
}

TEST(Config, UnitSuffixes) {
  const Config c = parse_config(
      "[bin]\nx_len = 48 cm\n[motor]\nholding_torque = 20 N-cm\n[spindle]\nspin_rate = 120 rpm\n"
      "[schedule]\nsample_interval = 5 min\n[planner]\ntravel_speed = 32 mm/s\n");
  EXPECT_DOUBLE_EQ(c.bin.x_len, 0.48);
  EXPECT_DOUBLE_EQ(c.motor.holding_torque, 0.20);
  EXPECT_DOUBLE_EQ(c.spindle.spin_rate, 2.0);
  EXPECT_DOUBLE_EQ(c.schedule.sample_interval_s, 300.0);
  EXPECT_DOUBLE_EQ(c.planner.travel_speed, 0.032);
}

TEST(Config, FingerCountZeroIsRejected) {
  try {
    parse_config("[spindle]\nfinger_count = 0\n", "x.conf");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("finger_count must be ≥ 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config(SMARTLID_FIXTURE_DIR "/bad_finger_count.conf"), ConfigError);
}

TEST(Config, SchemaErrorsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "t.conf");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(message("[bin]\nx_len = 480 furlongs\n"), "t.conf:2: bin.x_len: unsupported unit 'furlongs'");
  EXPECT_EQ(message("[bin]\n\nwidth = 1\n"), "t.conf:3: bin.width: unknown field");
  EXPECT_EQ(message("[schedule]\naeration_time = 25:99\n"), "t.conf:2: schedule.aeration_time: expected HH:MM");
  EXPECT_EQ(message("[planner]\npath_mode = zigzag\n"),
            "t.conf:2: planner.path_mode: expected raster, spiral or targeted");
  EXPECT_EQ(message("[spindle]\nfinger_count = eight\n"),
            "t.conf:2: spindle.finger_count: expected an integer, got 'eight'");
  EXPECT_NE(message("[bin]\nmargin = 200 mm\n").find("margin must be < min(x_len, y_len)/2"), std::string::npos);
  EXPECT_NE(message("[spindle]\nplunge_depth = 90 mm\n").find("plunge_depth must be ≤ z_depth"), std::string::npos);
}

TEST(Config, MissingFileIsAnError) {
  EXPECT_THROW(load_config("/nonexistent/smartlid.conf"), ConfigError);
}

TEST(Time, TimeOfDayParsing) {
  EXPECT_EQ(TimeOfDay::parse("11:00"), (TimeOfDay{11, 0}));
  EXPECT_EQ(TimeOfDay::parse("00:00"), (TimeOfDay{0, 0}));
  EXPECT_EQ(TimeOfDay::parse("23:59"), (TimeOfDay{23, 59}));
  for (const char* bad : {"25:99", "24:00", "12:60", "1:00", "11:0", "11-00", "", "ab:cd", "11:00 "})
    EXPECT_FALSE(TimeOfDay::parse(bad)) << bad;
  EXPECT_EQ(TimeOfDay({7, 5}).str(), "07:05");
}

TEST(Time, IsoRoundTrip) {
  EXPECT_EQ(format_iso8601(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(format_iso8601(1767225600), "2026-01-01T00:00:00Z");
  EXPECT_EQ(format_iso8601(951782400), "2000-02-29T00:00:00Z");
  EXPECT_EQ(parse_iso8601("2026-01-01T11:00:00Z"), 1767265200);
  EXPECT_FALSE(parse_iso8601("2026-02-30T00:00:00Z"));
  EXPECT_FALSE(parse_iso8601("2026-01-01T00:00:00+02:00"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> t(-2'000'000'000LL, 6'000'000'000LL);
  for (int i = 0; i < 2000; ++i) {
    const auto s = t(rng);
    EXPECT_EQ(parse_iso8601(format_iso8601(s)), s);
  }
}

TEST(Image, DecodesTwoByTwoGraymap) {
  const std::string bytes = std::string("P5\n2 2\n255\n") + std::string("\x00\x55\xaa\xff", 4);
  const auto img = decode_pnm(bytes);
  const auto* g = std::get_if<GrayImage>(&img);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->width, 2);
  EXPECT_EQ(g->height, 2);
  EXPECT_EQ(g->data, (std::vector<std::uint8_t>{0, 85, 170, 255}));
}

TEST(Image, SixteenBitIsUnsupported) {
  const std::string bytes = std::string("P6\n1 1\n65535\n") + std::string(6, '\0');
  try {
    decode_pnm(bytes);
    FAIL() << "expected ImageError";
  } catch (const ImageError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported bit depth"), std::string::npos);
  }
}

TEST(Image, MalformedHeaders) {
  for (const std::string bad : {"P3\n1 1\n255\n\x01", "P5\n1\n255\n", "P5 -1 1 255\n", "P5\n2 2\n255\n\x01"})
    EXPECT_THROW(decode_pnm(bad), ImageError) << bad;
}

TEST(Image, HeaderCommentsAreSkipped) {
  const auto img = decode_pnm(std::string("P5\n# a comment\n1 1\n# another\n255\n\x07"));
  EXPECT_EQ(std::get<GrayImage>(img).data[0], 7);
}

TEST(Image, RoundTripIsLosslessForAllSmallSizes) {
  std::mt19937 rng(11);
  for (int w = 1; w <= 9; ++w)
    for (int h = 1; h <= 9; ++h) {
      GrayImage g(w, h);
      for (auto& v : g.data) v = static_cast<std::uint8_t>(rng());
      EXPECT_EQ(std::get<GrayImage>(decode_pnm(encode_pnm(g))), g);
      for (Colorspace cs : {Colorspace::kRGB, Colorspace::kBGR, Colorspace::kHSV, Colorspace::kYUV}) {
        ColorImage c(w, h, cs);
        for (auto& v : c.data) v = static_cast<std::uint8_t>(rng());
        EXPECT_EQ(std::get<ColorImage>(decode_pnm(encode_pnm(c))), c);
      }
    }
}

TEST(Image, FileRoundTrip) {
  ColorImage c(3, 2, Colorspace::kHSV);
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = static_cast<std::uint8_t>(i * 13);
  const std::string path = temp_path("rt.ppm");
  write_image(c, path);
  EXPECT_EQ(std::get<ColorImage>(read_image(path)), c);
  std::remove(path.c_str());
  EXPECT_THROW(read_image("/nonexistent/x.pgm"), ImageError);
}
