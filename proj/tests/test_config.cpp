#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "cv2x/config.hpp"

using namespace cv2x;

namespace {

ScenarioConfig parse_text(const std::string& text) {
  std::istringstream is(text);
  return config::parse(is);
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto c = parse_text("");
  EXPECT_EQ(config::to_ini(c), config::to_ini(ScenarioConfig{}));
}

TEST(Config, DefaultFileMatchesBuiltIns) {
  const auto c = config::load(std::string(CV2X_SOURCE_DIR) + "/configs/default.ini");
  EXPECT_EQ(config::to_ini(c), config::to_ini(ScenarioConfig{}));
  EXPECT_EQ(config::hash(c), config::hash(ScenarioConfig{}));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RoundTrip) {
  ScenarioConfig c;
  c.n_vehicles = 75;
  c.mode = Mode::standard;
  c.duration_s = 12.5;
  c.seed = 123456789012345ull;
  c.pool.sc = 4;
  c.pool.beta = 0.3;
  c.link.shadowing = true;
  c.link.rsrp_offset_db = -1.0 / 3.0;
  c.mobility.krauss.v_max = 11.1;
  c.d_list = {50.0, 150.5};
  c.aoi_th_list = {10, 20};
  const auto back = parse_text(config::to_ini(c));
  EXPECT_EQ(config::to_ini(back), config::to_ini(c));
  EXPECT_EQ(back.n_vehicles, 75);
  EXPECT_EQ(back.mode, Mode::standard);
  EXPECT_EQ(back.seed, 123456789012345ull);
  EXPECT_DOUBLE_EQ(back.link.rsrp_offset_db, -1.0 / 3.0);
  EXPECT_TRUE(back.link.shadowing);
  EXPECT_EQ(back.d_list, c.d_list);
  EXPECT_EQ(back.aoi_th_list, c.aoi_th_list);
}

TEST(Config, PartialOverride) {
  const auto c = parse_text("[scenario]\nn_vehicles = 25\nd_list = 100, 300\n[pool]\nrt = 50\n");
  EXPECT_EQ(c.n_vehicles, 25);
  EXPECT_EQ(c.pool.rt, 50);
  EXPECT_EQ(c.d_list, (std::vector<double>{100.0, 300.0}));
  EXPECT_EQ(c.pool.sc, ScenarioConfig{}.pool.sc);
}

TEST(Config, HashTracksContent) {
  ScenarioConfig a, b;
  EXPECT_EQ(config::hash(a), config::hash(b));
  b.seed = 2;
  EXPECT_NE(config::hash(a), config::hash(b));
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_text("[pool]\nsubchannels = 3\n"), config::ConfigError);
}

TEST(Config, UnknownSectionRejected) {
  EXPECT_THROW(parse_text("[radio]\nsc = 3\n"), config::ConfigError);
}

TEST(Config, KeyOutsideSectionRejected) {
  EXPECT_THROW(parse_text("n_vehicles = 3\n"), config::ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_text("[scenario]\nn_vehicles = many\n"), config::ConfigError);
  EXPECT_THROW(parse_text("[scenario]\nn_vehicles = 3.5\n"), config::ConfigError);
  EXPECT_THROW(parse_text("[scenario]\nmode = turbo\n"), config::ConfigError);
  EXPECT_THROW(parse_text("[scenario]\nd_list = \n"), config::ConfigError);
  EXPECT_THROW(parse_text("[scenario]\nd_list = 100,x\n"), config::ConfigError);
  EXPECT_THROW(parse_text("[link]\nshadowing = maybe\n"), config::ConfigError);
  EXPECT_THROW(parse_text("[link]\nfc_ghz = 5.9GHz\n"), config::ConfigError);
}

TEST(Config, MalformedIniRejected) {
  EXPECT_THROW(parse_text("[scenario\nn_vehicles = 3\n"), config::ConfigError);
}

TEST(Config, SemanticValidationSeparate) {
  // Parses, then fails validation.
  const auto c = parse_text("[scenario]\nd_list = 300,100\n");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  const auto w = parse_text("[scenario]\nwarmup_subframes = 999\n");
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

TEST(Config, MissingFile) { EXPECT_THROW(config::load("/nonexistent/x.ini"), config::ConfigError); }

TEST(Config, ApplySingleKey) {
  ScenarioConfig c;
  config::apply(c, "mobility.rows", "7");
  EXPECT_EQ(c.mobility.rows, 7);
  EXPECT_THROW(config::apply(c, "mobility.lanes", "2"), config::ConfigError);
}
