#include <gtest/gtest.h>

#include <random>

#include "champagne/champagne.hpp"
#include "oracles.hpp"

using namespace champagne;

namespace {

ObstacleField testField(int d, std::uint64_t seed) {
  return generateRegularField(d, ShellGeometry::make(1.5, 1, d == 3 ? 8 : 5), RadiusProfile::powerLaw(0.1, 1.0), 1.0, seed);
}

std::vector<double> randomPointInBall(std::mt19937_64& g, int d) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u;
  std::vector<double> x(static_cast<std::size_t>(d));
  double s = 0.0;
  for (auto& v : x) {
    v = n(g);
    s += v * v;
  }
  // bias towards the boundary where obstacles are dense
  const double r = std::pow(u(g), 0.2) * 0.999 / std::sqrt(s);
  for (auto& v : x) v *= r;
  return x;
}

}  // namespace

TEST(SpatialIndex, SingleObstacleExample) {
  FieldInfo info;
  info.shells = ShellGeometry::make(5, 1, 3);
  const ObstacleField f(info, {Obstacle{{0.5, 0, 0}, 0.05}});
  const ShellIndex index(f);
  const std::vector<double> x{0, 0, 0};
  const auto s = nearestSurfaces(index, x);
  EXPECT_EQ(s.outer, 1.0);
  EXPECT_DOUBLE_EQ(s.obstacle, 0.45);
  EXPECT_EQ(s.obstacleId, 0);
}

TEST(SpatialIndex, EmptyFieldSentinel) {
  const auto f = ObstacleField::empty(3);
  const ShellIndex index(f);
  const std::vector<double> x{0.1, 0, 0};
  const auto s = nearestSurfaces(index, x);
  EXPECT_TRUE(std::isinf(s.obstacle));
  EXPECT_EQ(s.obstacleId, -1);
}

TEST(SpatialIndex, DomainErrors) {
  FieldInfo info;
  const ObstacleField f(info, {Obstacle{{0.5, 0, 0}, 0.05}});
  const ShellIndex index(f);
  EXPECT_THROW(nearestSurfaces(index, std::vector<double>{0.5, 0, 0}), DomainError);
  EXPECT_THROW(nearestSurfaces(index, std::vector<double>{1.0, 0, 0}), DomainError);
  EXPECT_THROW(nearestSurfaces(index, std::vector<double>{0.1, 0}), DomainError);
}

TEST(SpatialIndex, MatchesBruteForceExactly) {
  for (int d : {3, 4}) {
    const auto f = testField(d, 11);
    ASSERT_GT(f.size(), 100u);
    const ShellIndex index(f);
    std::mt19937_64 g(99);
    for (int q = 0; q < 2000; ++q) {
      const auto x = randomPointInBall(g, d);
      for (int depth : {3, 8, std::numeric_limits<int>::max()}) {
        const auto hit = index.nearest(x.data(), depth);
        const auto ref = oracle::bruteNearest(f, x.data(), depth);
        ASSERT_EQ(hit.id, ref.id) << "d=" << d << " q=" << q;
        ASSERT_EQ(hit.distance, ref.distance);
      }
    }
  }
}

TEST(SpatialIndex, RangeQueriesMatchBruteForce) {
  const auto f = testField(3, 5);
  const ShellIndex index(f);
  std::mt19937_64 g(3);
  for (int q = 0; q < 200; ++q) {
    const auto x = randomPointInBall(g, 3);
    const double radius = 0.05;
    std::vector<std::size_t> got;
    index.forEachSurfaceWithin(x.data(), radius, [&](std::size_t id, double) { got.push_back(id); });
    std::sort(got.begin(), got.end());
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (surfaceDistance(f, i, x.data()) <= radius) want.push_back(i);
    }
    ASSERT_EQ(got, want);

    const double lo[3] = {x[0] - 0.03, x[1] - 0.03, x[2] - 0.03};
    const double hi[3] = {x[0] + 0.03, x[1] + 0.03, x[2] + 0.03};
    std::vector<std::size_t> boxGot;
    index.forEachIntersectingBox(lo, hi, [&](std::size_t id) { boxGot.push_back(id); });
    std::sort(boxGot.begin(), boxGot.end());
    std::vector<std::size_t> boxWant;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = f.radius(i);
      if (boxDistanceSquared(f.center(i), lo, hi, 3) <= r * r) boxWant.push_back(i);
    }
    ASSERT_EQ(boxGot, boxWant);
  }
}
