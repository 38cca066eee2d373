#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "champagne/champagne.hpp"

using namespace champagne;

TEST(Profile, PowerLawValues) {
  const auto p = RadiusProfile::powerLaw(0.1, 2.0);
  EXPECT_DOUBLE_EQ(p(0.5), 0.025);
  EXPECT_DOUBLE_EQ(p(0.0), 0.1);
}

TEST(Profile, PowerLogValue) {
  const auto p = RadiusProfile::powerLog(0.01, 1.0);
  const double t = 1.0 - 1.0 / std::numbers::e;
  EXPECT_NEAR(p(t), 0.01 * (1.0 / std::numbers::e) / 2.0, 1e-15);
  EXPECT_NEAR(p(t), 0.0018394, 1e-7);
}

TEST(Profile, GapFormsAgree) {
  for (const auto& p : {RadiusProfile::powerLaw(0.3, 1.5), RadiusProfile::powerLog(0.2, 2.0)}) {
    for (double g : {1.0, 0.5, 1e-3, 1e-12}) {
      EXPECT_NEAR(p.ratioAtGap(g), p.atGap(g) / g, 1e-12 * p.ratioAtGap(g));
      EXPECT_NEAR(p.logAtGap(g), std::log(p.atGap(g)), 1e-12);
    }
  }
  // log form stays finite where phi underflows
  const auto p = RadiusProfile::powerLaw(0.1, 3.0);
  EXPECT_EQ(p.atGap(1e-300), 0.0);
  EXPECT_TRUE(std::isfinite(p.logAtGap(1e-300)));
}

TEST(Profile, DomainAndSchemaErrors) {
  const auto p = RadiusProfile::powerLaw(0.1, 2.0);
  EXPECT_THROW(p(1.0), DomainError);
  EXPECT_THROW(p(-0.1), DomainError);
  EXPECT_THROW(RadiusProfile::table({{0.5, 0.1}, {0.2, 0.05}}), SchemaError);
  EXPECT_THROW(RadiusProfile::table({{0.0, 0.1}, {0.2, 0.2}}), SchemaError);
  EXPECT_THROW(RadiusProfile::powerLaw(0.0, 1.0), SchemaError);
}

TEST(Profile, TableSteps) {
  const auto p = RadiusProfile::table({{0.0, 0.1}, {0.5, 0.05}, {0.9, 0.01}});
  EXPECT_EQ(p(0.0), 0.1);
  EXPECT_EQ(p(0.49), 0.1);
  EXPECT_EQ(p(0.5), 0.05);
  EXPECT_EQ(p(0.9), 0.01);
  EXPECT_THROW(p(0.95), DomainError);
  EXPECT_EQ(p.upperLimit(), 0.9);
}

TEST(Shells, Radii) {
  EXPECT_DOUBLE_EQ(ShellGeometry::make(5, 1, 3).radius(2), 0.96);
  EXPECT_EQ(ShellGeometry::make(5, 1, 3).radius(0), 0.0);
  EXPECT_DOUBLE_EQ(ShellGeometry::make(4, 1, 3).radius(3), 0.984375);
  EXPECT_THROW(ShellGeometry::make(1.0, 1, 3), DomainError);
  EXPECT_THROW(ShellGeometry::make(5, 1, 3).radius(40), RangeError);
  EXPECT_THROW(ShellGeometry::make(5, 1, 3).gap(-1), DomainError);
}

TEST(Shells, AnnulusOfPointsOnShells) {
  const auto sh = ShellGeometry::make(5, 1, 12);
  for (int j = 1; j <= 12; ++j) {
    EXPECT_EQ(sh.annulusOf(sh.radius(j)), j);
    EXPECT_EQ(sh.annulusOf(sh.radius(j) + 0.5 * sh.gap(j + 1)), j + 1);
  }
  EXPECT_EQ(sh.annulusOf(0.0), 0);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  CounterRng c(42, 8);
  CounterRng e(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    if (i == 0) {
      EXPECT_NE(va, c());
      EXPECT_NE(va, e());
    }
  }
}

TEST(Rng, UniformMoments) {
  CounterRng r(1, 0);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.005);
}

TEST(Rng, DirectionsAreUnitAndIsotropic) {
  CounterRng r(3, 1);
  double mean[4] = {0, 0, 0, 0};
  double second = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double v[4];
    r.direction(4, v);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      s += v[k] * v[k];
      mean[k] += v[k];
    }
    second += v[0] * v[0];
    ASSERT_NEAR(s, 1.0, 1e-14);
  }
  for (double m : mean) EXPECT_NEAR(m / n, 0.0, 0.01);
  EXPECT_NEAR(second / n, 0.25, 0.005);
}

TEST(Geometry, BallVolumesAndPowers) {
  EXPECT_NEAR(unitBallVolume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_NEAR(unitSphereArea(3), 4.0 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(unitBallVolume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
  EXPECT_EQ(ipow(2.0, 10), 1024.0);
  EXPECT_EQ(ipow(3.0, 0), 1.0);
}

TEST(Geometry, BoxDistance) {
  const double lo[3] = {0, 0, 0};
  const double hi[3] = {1, 1, 1};
  const double in[3] = {0.5, 0.5, 0.5};
  const double out[3] = {2, 0.5, -1};
  EXPECT_EQ(boxDistanceSquared(in, lo, hi, 3), 0.0);
  EXPECT_DOUBLE_EQ(boxDistanceSquared(out, lo, hi, 3), 2.0);
}

TEST(Geometry, QuasiUniformSphereIsOnSphere) {
  for (int d : {3, 4, 5}) {
    const auto pts = quasiUniformSphere(d, 8);
    ASSERT_EQ(pts.size(), 8u * d);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(norm(std::span<const double>(pts.data() + i * d, d)), 1.0, 1e-14);
  }
}

TEST(Sampling, CapDirectionStaysInCap) {
  CounterRng r(5, 2);
  const double axis[3] = {0, 0, 1};
  const double theta = 0.3;
  double meanZ = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v[3];
    capDirection(axis, theta, 3, r, v);
    ASSERT_NEAR(v[0] * v[0] + v[1] * v[1] + v[2] * v[2], 1.0, 1e-13);
    ASSERT_GE(v[2], std::cos(theta) - 1e-12);
    meanZ += v[2];
  }
  // uniform on a cap in d=3: z uniform on [cos theta, 1]
  EXPECT_NEAR(meanZ / n, (1.0 + std::cos(theta)) / 2.0, 2e-4);
}
