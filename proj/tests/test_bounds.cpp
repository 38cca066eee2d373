#include <gtest/gtest.h>

#include <cmath>

#include "champagne/champagne.hpp"
#include "oracles.hpp"

using namespace champagne;

TEST(Sandwich, PaperExamples) {
  const std::vector<double> lambda{0.5, 0, 0};
  const std::vector<double> origin{0, 0, 0};
  const auto s3 = sandwich(lambda, 0.05, origin, 3);
  EXPECT_NEAR(s3.lower, 0.05, 1e-15);
  EXPECT_NEAR(s3.upper, 0.10, 1e-15);
  EXPECT_TRUE(s3.upperValid);
  const std::vector<double> lambda4{0.5, 0, 0, 0};
  const std::vector<double> origin4{0, 0, 0, 0};
  EXPECT_NEAR(sandwich(lambda4, 0.05, origin4, 4).lower, 0.0075, 1e-15);
}

TEST(Sandwich, BoundaryAndErrors) {
  const std::vector<double> lambda{0.5, 0.2, 0};
  const std::vector<double> onSphere{0, 0.6, 0.8};
  EXPECT_EQ(sandwich(lambda, 0.05, onSphere, 3).lower, 0.0);
  EXPECT_THROW(sandwich(lambda, 0.05, std::vector<double>{0.5, 0.2, 0.01}, 3), DomainError);
  EXPECT_THROW(sandwich(lambda, 0.05, std::vector<double>{0.9, 0.6, 0}, 3), DomainError);
  EXPECT_THROW(sandwich(lambda, 0.6, std::vector<double>{0, 0, 0}, 3), DomainError);
}

TEST(Sandwich, ClosedFormSupMatchesSampling) {
  for (int d : {3, 4, 5}) {
    for (double a : {0.1, 0.5, 0.8}) {
      for (double r : {0.01, 0.05, 0.09}) {
        std::vector<double> lambda(static_cast<std::size_t>(d), 0.0);
        lambda[0] = a * 0.6;
        lambda[1] = a * 0.8;
        const double exact = kelvinSupOnObstacle(a, r, d);
        const double sampled = oracle::sampledUStarSup(lambda, r);
        EXPECT_GE(exact, sampled * (1 - 1e-12));
        EXPECT_NEAR(exact, sampled, 1e-9 * exact) << d << " " << a << " " << r;
      }
    }
  }
}

TEST(Sandwich, KelvinDistanceMatchesExplicitReflection) {
  const double x[3] = {0.3, -0.2, 0.4};
  const double l[3] = {0.1, 0.5, -0.3};
  const double x2 = 0.09 + 0.04 + 0.16;
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (x[i] / x2 - l[i]) * (x[i] / x2 - l[i]);
  EXPECT_NEAR(kelvinDistance(x, l, 3), std::sqrt(x2) * std::sqrt(s), 1e-14);
}

TEST(Concentric, Values) {
  EXPECT_NEAR(exactConcentric(0.1, 0.5, 3), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(exactConcentric(0.1, 0.5, 4), 3.0 / 99.0, 1e-15);
  EXPECT_EQ(exactConcentric(0.1, 1.0, 3), 0.0);
  EXPECT_THROW(exactConcentric(0.5, 0.1, 3), DomainError);
  EXPECT_THROW(exactConcentric(0.1, 1.1, 3), DomainError);
}

TEST(UnionBound, SingleObstacle) {
  FieldInfo info;
  info.shells = ShellGeometry::make(5, 1, 3);
  const ObstacleField f(info, {Obstacle{{0.5, 0, 0}, 0.05}});
  const auto r = unionTailBound(f, 1);
  EXPECT_NEAR(r.value, 0.10, 1e-15);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(unionTailBound(f, 2).value, 0.0);
}

TEST(UnionBound, EmptyTail) {
  const auto f = ObstacleField::empty(3, ShellGeometry::make(5, 1, 3));
  EXPECT_EQ(unionTailBound(f, 1).value, 0.0);
}

TEST(UnionBound, UncertifiedObstacleUsesFreeSpace) {
  FieldInfo info;
  info.shells = ShellGeometry::make(5, 1, 3);
  // big obstacle close to the sphere: sup u* > 1/2
  const ObstacleField f(info, {Obstacle{{0.0, 0.8, 0}, 0.15}});
  const auto r = unionTailBound(f, 0);
  EXPECT_FALSE(r.certified);
  EXPECT_NEAR(r.value, 0.15 / 0.8, 1e-15);
}

TEST(UnionBound, AnalyticTailConvergesForConvergentProfiles) {
  auto f = generateRegularField(3, ShellGeometry::make(5, 1, 2), RadiusProfile::powerLaw(0.01, 2), 1.0, 1);
  const auto r = unionTailBound(f, 1);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.analyticTotal, 0.0);
  ASSERT_TRUE(r.analyticVerdict.has_value());
  EXPECT_EQ(*r.analyticVerdict, Verdict::Converges);
  // deeper start gives a smaller bound
  EXPECT_LT(unionTailBound(f, 3).value, r.value);

  auto g = generateRegularField(3, ShellGeometry::make(5, 1, 2), RadiusProfile::powerLaw(0.01, 1), 1.0, 1);
  EXPECT_TRUE(std::isinf(unionTailBound(g, 1).value));
}

TEST(UnionBound, GuaranteeDepthThreshold) {
  const auto g = guaranteeDepth(RadiusProfile::powerLaw(0.01, 2), 3, 5.0, 0.5);
  const double want = std::pow(0.5, 3) * 4.0 / (16.0 * 3.0 * 1.0 * std::pow(5.0, 5));
  EXPECT_NEAR(g.threshold, want, 1e-18);
  ASSERT_TRUE(g.nR.has_value());
  EXPECT_LT(g.tailIntegral, g.threshold);
  // tail from rho_m for c (1-t)^2, d = 3 is c (1 - rho_m) = c K^-m
  EXPECT_NEAR(g.tailIntegral, 0.01 * std::pow(5.0, -*g.nR), 1e-6 * g.tailIntegral);
  EXPECT_GE(0.01 * std::pow(5.0, -(*g.nR - 1)), g.threshold);
}

TEST(ProductBound, EmptyFieldIsVacuous) {
  EXPECT_EQ(productAvoidanceBound(ObstacleField::empty(3, ShellGeometry::make(5, 1, 8))).value, 1.0);
}

TEST(ProductBound, TinyRadiiAreVacuous) {
  FieldInfo info;
  info.shells = ShellGeometry::make(5, 1, 10);
  info.densityR = 0.5;
  std::vector<Obstacle> obs;
  for (int j = 1; j <= 10; ++j) obs.push_back(Obstacle{{info.shells.radius(j), 0, 0}, 1e-300});
  const ObstacleField f(info, obs);
  EXPECT_NEAR(productAvoidanceBound(f).value, 1.0, 1e-12);
}

TEST(ProductBound, ConstantFactorsGiveGeometricDecay) {
  auto build = [](int jMax) {
    FieldInfo info;
    info.shells = ShellGeometry::make(5, 1, jMax);
    info.densityR = 0.5;
    std::vector<Obstacle> obs;
    for (int j = 1; j <= jMax; ++j) obs.push_back(Obstacle{{0, info.shells.radius(j), 0}, 0.1 * info.shells.gap(j)});
    return ObstacleField(info, obs);
  };
  const auto a = productAvoidanceBound(build(12));
  const auto b = productAvoidanceBound(build(16));
  EXPECT_EQ(a.annulusStride, 1);
  ASSERT_GE(a.perShellTerms.size(), 4u);
  double prod = 1.0;
  const double t0 = a.perShellTerms.back().factor;
  for (const auto& t : a.perShellTerms) {
    EXPECT_EQ(t.j % 2, 0);
    if (!t.certified) continue;
    EXPECT_NEAR(t.factor, t0, 0.05 * t0);
    prod *= 1.0 - t.factor;
  }
  EXPECT_NEAR(a.value, prod, 1e-14);
  EXPECT_LT(b.value, a.value);
  EXPECT_NEAR(b.value / a.value, (1 - t0) * (1 - t0), 1e-3);
}

TEST(ProductBound, StrideAndErrors) {
  EXPECT_EQ(productStride(5.0, 0.5), 1);
  EXPECT_EQ(productStride(1.5, 0.5), 4);  // 1.5^4 = 5.06 > 4
  EXPECT_EQ(productStride(1.5, 0.9), 8);  // need > 19
  EXPECT_THROW(productStride(2.0, 1.0), ConfigurationError);
  EXPECT_EQ(boundAnnulus(0, 3), 0);
  EXPECT_EQ(boundAnnulus(1, 3), 1);
  EXPECT_EQ(boundAnnulus(3, 3), 1);
  EXPECT_EQ(boundAnnulus(4, 3), 2);

  FieldInfo info;
  info.shells = ShellGeometry::make(2, 1, 10);
  info.densityR = 0.5;
  const ObstacleField f(info, {Obstacle{{0.5, 0, 0}, 0.01}});
  ProductOptions po;
  po.annulusStride = 1;  // 2 < 4
  EXPECT_THROW(productAvoidanceBound(f, po), ConfigurationError);
}
