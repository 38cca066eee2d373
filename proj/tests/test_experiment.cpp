#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "champagne/champagne.hpp"

using namespace champagne;
namespace fs = std::filesystem;

namespace {

nlohmann::json baseSpec(const fs::path& dir) {
  auto j = nlohmann::json::parse(R"({
    "specVersion": 1,
    "name": "small",
    "dimension": 3,
    "shells": {"K": 2.0, "jMin": 1, "jMax": 5},
    "profile": {"kind": "PowerLaw", "params": {"c": 0.1, "alpha": 2.0}},
    "sep": 1.0,
    "seeds": [3],
    "depths": [2, 3, 4],
    "trials": 2000,
    "criteria": {"K": 5.0, "jMax": 40},
    "wiener": {"taus": 2, "K": 4.0, "jMax": 5, "maxLevel": 9}
  })");
  j["outputDir"] = dir.string();
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string withoutTimestamp(std::string s) {
  const auto at = s.find("\"timestamp\"");
  if (at == std::string::npos) return s;
  return s.erase(at, s.find('\n', at) - at);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("champagne_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string schemaPointer(const nlohmann::json& j) {
  try {
    experimentSpecFromJson(j);
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST(ExperimentSpec, SchemaErrorsPointAtTheField) {
  const auto dir = scratch("schema");
  auto j = baseSpec(dir);
  EXPECT_EQ(schemaPointer(j), "<accepted>");
  j["dimension"] = 2;
  EXPECT_EQ(schemaPointer(j), "/dimension");
  j = baseSpec(dir);
  j["depths"] = {3, 2};
  EXPECT_EQ(schemaPointer(j), "/depths/1");
  j = baseSpec(dir);
  j["profile"]["params"].erase("alpha");
  EXPECT_EQ(schemaPointer(j), "/profile/params/alpha");
  j = baseSpec(dir);
  j["wiener"]["taus"] = {{1.0, 0.0, 0.5}};
  EXPECT_EQ(schemaPointer(j), "/wiener/taus/0");
  j = baseSpec(dir);
  j.erase("seeds");
  EXPECT_EQ(schemaPointer(j), "/seeds");
  j = baseSpec(dir);
  j["specVersion"] = 2;
  EXPECT_EQ(schemaPointer(j), "/specVersion");
}

TEST(Experiment, WritesBundleAndIsReproducible) {
  const auto dir = scratch("bundle");
  const auto spec = experimentSpecFromJson(baseSpec(dir));
  const auto r1 = runExperiment(spec);
  for (const char* f : {"field.json", "wiener_field.json", "criteria.json", "wiener.json", "bounds.json", "sweep.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_TRUE(r1.consistent);
  EXPECT_EQ(r1.exitCode(), 0);
  EXPECT_EQ(r1.summary["criteria"]["value"], "Converges");
  EXPECT_EQ(r1.summary["criteria"]["source"], "criteria.json#/shellSeries/verdict");
  std::map<std::string, std::string> first;
  for (const char* f : {"field.json", "criteria.json", "wiener.json", "bounds.json", "sweep.csv"}) first[f] = slurp(dir / f);
  const std::string summary1 = withoutTimestamp(slurp(dir / "summary.json"));

  runExperiment(spec);
  for (const auto& [name, text] : first) EXPECT_EQ(slurp(dir / name), text) << name;
  EXPECT_EQ(withoutTimestamp(slurp(dir / "summary.json")), summary1);
  const std::string csv = first["sweep.csv"];
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "seed,depth,pHat,ciLow,ciHigh,tailBound");
  fs::remove_all(dir);
}

TEST(Experiment, EmptyObstacleSpec) {
  const auto dir = scratch("empty");
  auto j = baseSpec(dir);
  j["profile"] = nullptr;
  const auto r = runExperiment(experimentSpecFromJson(j));
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.summary["criteria"]["value"], "Converges");
  EXPECT_EQ(r.summary["integral"]["value"], "Converges");
  EXPECT_EQ(r.summary["wiener"]["value"], "Converges");
  for (const auto& b : r.summary["simulation"]["brackets"]) EXPECT_EQ(b["pHat"], 1.0);
  fs::remove_all(dir);
}
