#include <gtest/gtest.h>

#include <cmath>

#include "champagne/champagne.hpp"

using namespace champagne;

TEST(Generate, EmptyShellRange) {
  const auto f = generateRegularField(3, ShellGeometry::make(5, 1, 0), RadiusProfile::powerLaw(0.1, 2), 1.0, 1);
  EXPECT_EQ(f.size(), 0u);
}

TEST(Generate, SeparatedAndDenseAtOwnSep) {
  const auto f = generateRegularField(3, ShellGeometry::make(5, 1, 2), RadiusProfile::powerLaw(0.001, 2), 0.5, 42);
  ASSERT_GT(f.size(), 10u);
  SpacingOptions opts;
  opts.epsilonLimit = 0.5 * (1.0 - 1e-12);
  const auto r = validateSpacing(f, 1024, 42, opts);
  EXPECT_TRUE(r.pairViolations.empty());
  EXPECT_GE(r.epsilonEmpirical, 0.5 * (1.0 - 1e-12));
  EXPECT_GT(f.info().epsilon, 0.0);
  EXPECT_LE(f.info().epsilon, r.epsilonEmpirical);
  EXPECT_LT(f.info().densityR, 1.0);
  // obstacles sit on their shells with the profile radius
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int j = f.annulus(i);
    ASSERT_NEAR(f.centerNorm(i), f.shells().radius(j), 1e-12);
    ASSERT_EQ(f.radius(i), RadiusProfile::powerLaw(0.001, 2)(f.shells().radius(j)));
  }
}

TEST(Generate, Deterministic) {
  const auto a = generateRegularField(3, ShellGeometry::make(3, 1, 4), RadiusProfile::powerLaw(0.05, 1), 1.0, 9);
  const auto b = generateRegularField(3, ShellGeometry::make(3, 1, 4), RadiusProfile::powerLaw(0.05, 1), 1.0, 9);
  const auto c = generateRegularField(3, ShellGeometry::make(3, 1, 4), RadiusProfile::powerLaw(0.05, 1), 1.0, 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.centers().size(); ++i) ASSERT_EQ(a.centers()[i], b.centers()[i]);
  EXPECT_NE(fieldToJson(a), fieldToJson(c));
}

TEST(Generate, WideSeparationOnOneShell) {
  // shell j=1 of K=5 (rho = 0.8), minimum distance 1.9 * 0.2 = 0.38
  const auto f = generateRegularField(3, ShellGeometry::make(5, 1, 1), RadiusProfile::powerLaw(0.001, 2), 1.9, 3);
  ASSERT_GT(f.size(), 2u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = i + 1; k < f.size(); ++k) {
      ASSERT_GE(distance(f.center(i), f.center(k), 3), 0.38 * (1 - 1e-12));
    }
  }
  EXPECT_TRUE(validateSpacing(f, 256, 3).pairViolations.empty());
}

TEST(Generate, OversizedProfileNamesShell) {
  try {
    generateRegularField(3, ShellGeometry::make(5, 1, 4), RadiusProfile::powerLaw(0.6, 1), 1.0, 1);
    FAIL() << "expected ConfigurationError";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("shell j = 1"), std::string::npos) << e.what();
  }
}

TEST(Generate, UnderflowingShellIsRangeError) {
  EXPECT_THROW(generateRegularField(3, ShellGeometry::make(5, 1, 60), RadiusProfile::powerLaw(0.001, 2), 1.0, 1), RangeError);
}

TEST(Generate, WindowedFieldStaysNearTau) {
  GenerateOptions opts;
  opts.windows.push_back(ConeWindow{{1.0, 0.0, 0.0}, 8.0, 0.0});
  const auto f = generateRegularField(3, ShellGeometry::make(4, 1, 7), RadiusProfile::powerLaw(0.1, 1), 1.0, 4, opts);
  ASSERT_GT(f.size(), 0u);
  const auto& w = opts.windows[0];
  for (std::size_t i = 0; i < f.size(); ++i) {
    // caps of chord (2 coneFactor + 3) g around rho tau
    const double g = f.shells().gap(f.annulus(i));
    ASSERT_LE(distance(f.center(i), w.tau.data(), 3), (2 * w.coneFactor + 4) * g + 1e-12) << i;
  }
  const ShellIndex index(f);
  EXPECT_NO_THROW(assertDisjoint(f, index));
}
