#include "swarmform/config.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

namespace swarmform {
namespace {

constexpr const char* kMinimal =
    "shape.p = 4\n"
    "shape.q = 3\n"
    "numRobots = 12\n"
    "rngSeed = 42\n"
    "maxTicks = 100000\n";

TEST(ParseConfig, MinimalFileGetsDefaultsEverywhereElse) {
  const FileConfig cfg = parse_config_text(kMinimal);
  EXPECT_EQ(cfg.sim.shape_p, 4);
  EXPECT_EQ(cfg.sim.shape_q, 3);
  EXPECT_EQ(cfg.sim.num_robots, 12);
  EXPECT_EQ(cfg.sim.rng_seed, 42u);
  EXPECT_EQ(cfg.sim.max_ticks, 100000);
  EXPECT_EQ(cfg.sim.bounds, WorldBounds{});
  EXPECT_EQ(cfg.sim.shape_anchor, (Location{0, 0, 0}));
  EXPECT_EQ(cfg.sim.num_seeds, 1);
  EXPECT_EQ(cfg.sim.fault_probability, 0.0);
  EXPECT_FALSE(cfg.sim.restart_after_fault);
  EXPECT_EQ(cfg.verify_depth_limit, 12);
  EXPECT_EQ(cfg.verify_branch_depth_limit, 32);
}

TEST(ParseConfig, EveryKeyIsSettable) {
  const FileConfig cfg = parse_config_text(
      "bounds.minX = -2\n"
      "bounds.maxX = 3\n"
      "bounds.minY = -4\n"
      "bounds.maxY = 5\n"
      "bounds.minZ = -6\n"
      "bounds.maxZ = 7\n"
      "shape.p = 2\n"
      "shape.q = 2\n"
      "shape.anchor.x = 1\n"
      "shape.anchor.y = -1\n"
      "shape.anchor.z = 0\n"
      "numRobots = 5\n"
      "numSeeds = 2\n"
      "faultProbability = 0.125\n"
      "rngSeed = 987\n"
      "maxTicks = 55\n"
      "restartAfterFault = true\n"
      "verify.depthLimit = 9\n"
      "verify.branchDepthLimit = 17\n");
  EXPECT_EQ(cfg.sim.bounds.min_x, -2);
  EXPECT_EQ(cfg.sim.bounds.max_z, 7);
  EXPECT_EQ(cfg.sim.shape_anchor, (Location{1, -1, 0}));
  EXPECT_EQ(cfg.sim.num_seeds, 2);
  EXPECT_EQ(cfg.sim.fault_probability, 0.125);
  EXPECT_TRUE(cfg.sim.restart_after_fault);
  EXPECT_EQ(cfg.verify_depth_limit, 9);
  EXPECT_EQ(cfg.verify_branch_depth_limit, 17);
}

TEST(ParseConfig, ToleratesCommentsBlanksAndPadding) {
  const FileConfig cfg = parse_config_text(
      "# a comment\n"
      "\n"
      "   shape.p=4\r\n"
      "shape.q   =   3\n"
      "\t numRobots = 12 \t\n"
      "rngSeed = 42\n"
      "maxTicks = 100000\n"
      "# trailing comment");
  EXPECT_EQ(cfg.sim.shape_p, 4);
  EXPECT_EQ(cfg.sim.num_robots, 12);
}

TEST(ParseConfig, ErrorsNameTheKeyAndLine) {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"shape.p = 4\nshapeQ = 3\n", "unknown key 'shapeQ'"},
      {"shape.p = 4\nshape.p = 5\n", "duplicate key 'shape.p'"},
      {"shape.p = abc\n", "bad value 'abc'"},
      {"shape.p\n", "expected key = value"},
      {"= 4\n", "expected key = value"},
      {"restartAfterFault = yes\n", "bad value 'yes'"},
      {"faultProbability = 0.5.5\n", "bad value '0.5.5'"},
      {"numRobots = 3e2\n", "bad value '3e2'"},
  };
  for (const Case& c : cases) {
    try {
      parse_config_text(c.text);
      FAIL() << "expected ConfigError for: " << c.text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(c.needle), std::string::npos)
          << e.what();
    }
  }
}

TEST(ParseConfig, LineNumbersPointAtTheOffendingLine) {
  try {
    parse_config_text("# fine\nshape.p = 4\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos)
        << e.what();
  }
}

TEST(ParseConfig, MissingRequiredKeysAreReported) {
  const char* required[] = {"shape.p", "shape.q", "numRobots", "rngSeed",
                            "maxTicks"};
  for (const char* key : required) {
    std::string text;
    for (const char* other : required) {
      if (std::string(other) != key) {
        text += std::string(other) + " = 1\n";
      }
    }
    try {
      parse_config_text(text);
      FAIL() << "expected missing-key error for " << key;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos)
          << e.what();
    }
  }
}

TEST(LoadConfigFile, MissingFileIsAnIoError) {
  EXPECT_THROW(load_config_file("/nonexistent/swarmform.cfg"), IoError);
}

TEST(LoadConfigFile, ReadsARealFile) {
  const std::string path = testing::TempDir() + "swarmform_config_test.cfg";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  const FileConfig cfg = load_config_file(path);
  EXPECT_EQ(cfg.sim.num_robots, 12);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace swarmform
