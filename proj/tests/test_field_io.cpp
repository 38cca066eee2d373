#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "champagne/champagne.hpp"

using namespace champagne;

TEST(FieldIo, RoundTripIsByteIdentical) {
  GenerateOptions opts;
  opts.windows.push_back(ConeWindow{{0.0, 1.0, 0.0}, 6.0, 0.01});
  const auto f = generateRegularField(3, ShellGeometry::make(4, 1, 5), RadiusProfile::powerLog(0.05, 2), 1.0, 17, opts);
  const std::string text = fieldToJson(f);
  const auto g = fieldFromJsonText(text);
  EXPECT_EQ(fieldToJson(g), text);
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.centers().size(); ++i) ASSERT_EQ(f.centers()[i], g.centers()[i]);
  EXPECT_EQ(g.info().epsilon, f.info().epsilon);
  EXPECT_EQ(g.info().seed, f.info().seed);
  ASSERT_EQ(g.info().windows.size(), 1u);
  EXPECT_EQ(g.info().windows[0].coneCap, 0.01);
}

TEST(FieldIo, TableProfileAndFileRoundTrip) {
  FieldInfo info;
  info.shells = ShellGeometry::make(5, 1, 2);
  info.profile = RadiusProfile::table({{0.0, 0.1}, {0.5, 0.01}});
  const ObstacleField f(info, {Obstacle{{0.8, 0, 0}, 0.01}});
  const auto path = (std::filesystem::temp_directory_path() / "champagne_field_io_test.json").string();
  writeField(f, path);
  const auto g = readField(path);
  std::filesystem::remove(path);
  EXPECT_EQ(fieldToJson(g), fieldToJson(f));
  EXPECT_TRUE(std::isnan(g.info().densityR));
}

TEST(FieldIo, SchemaErrorsCarryPointers) {
  auto expectPointer = [](const std::string& text, const std::string& pointer) {
    try {
      fieldFromJsonText(text);
      FAIL() << "expected SchemaError for " << text;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.pointer(), pointer) << e.what();
    }
  };
  const std::string good = fieldToJson(ObstacleField::empty(3, ShellGeometry::make(5, 1, 3)));
  auto j = nlohmann::json::parse(good);
  j["specVersion"] = 99;
  expectPointer(j.dump(), "/specVersion");
  j = nlohmann::json::parse(good);
  j.erase("dimension");
  expectPointer(j.dump(), "/dimension");
  j = nlohmann::json::parse(good);
  j["obstacles"] = nlohmann::json::array({{{"center", {0.1, "x", 0.0}}, {"radius", 0.01}}});
  expectPointer(j.dump(), "/obstacles/0/center/1");
  EXPECT_THROW(fieldFromJsonText("{not json"), SchemaError);
}

TEST(FieldIo, FormatDouble) {
  EXPECT_EQ(formatDouble(1.0), "1.0");
  EXPECT_EQ(formatDouble(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(formatDouble(1.0 / 3.0)), 1.0 / 3.0);
}
