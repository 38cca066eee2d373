#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "champagne/champagne.hpp"

namespace oracle {

using champagne::ObstacleField;

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::int64_t id = -1;
};

/// Linear scan; ties keep the lowest id.
inline Nearest bruteNearest(const ObstacleField& f, const double* x, int maxAnnulus = std::numeric_limits<int>::max()) {
  Nearest best;
  const int d = f.dimension();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.annulus(i) > maxAnnulus) continue;
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = x[k] - f.center(i)[k];
      s += t * t;
    }
    const double dist = std::sqrt(s) - f.radius(i);
    if (dist < best.distance) best = {dist, static_cast<std::int64_t>(i)};
  }
  return best;
}

/// sup of u*(y) = (r / (|y| |y* - lambda|))^{d-2} over the sphere |y - lambda| = r, by sampling
/// n random surface points plus the two points on the ray through lambda. Forms y* explicitly.
inline double sampledUStarSup(const std::vector<double>& lambda, double r, int n = 4096, unsigned seed = 7) {
  const int d = static_cast<int>(lambda.size());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  double ln = 0.0;
  for (double v : lambda) ln += v * v;
  ln = std::sqrt(ln);
  auto uStar = [&](const std::vector<double>& y) {
    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = y[static_cast<std::size_t>(k)] / y2 - lambda[static_cast<std::size_t>(k)];
      s += t * t;
    }
    return std::pow(r / (std::sqrt(y2) * std::sqrt(s)), d - 2);
  };
  double best = 0.0;
  std::vector<double> y(static_cast<std::size_t>(d));
  for (int sign : {-1, 1}) {
    for (int k = 0; k < d; ++k) y[static_cast<std::size_t>(k)] = lambda[static_cast<std::size_t>(k)] * (1.0 + sign * r / ln);
    best = std::max(best, uStar(y));
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    std::vector<double> g(static_cast<std::size_t>(d));
    for (auto& v : g) {
      v = normal(gen);
      s += v * v;
    }
    s = std::sqrt(s);
    for (int k = 0; k < d; ++k) y[static_cast<std::size_t>(k)] = lambda[static_cast<std::size_t>(k)] + r * g[static_cast<std::size_t>(k)] / s;
    best = std::max(best, uStar(y));
  }
  return best;
}

/// int_a^b phi(t)^{d-2} / (1-t)^{d-1} dt for phi = c (1-t)^alpha, in closed form.
inline double powerLawIntegral(double c, double alpha, int d, double a, double b) {
  const double e = alpha * (d - 2) - (d - 1);
  const double cp = std::pow(c, d - 2);
  if (e == -1.0) return cp * std::log((1.0 - a) / (1.0 - b));
  return cp * (std::pow(1.0 - a, e + 1.0) - std::pow(1.0 - b, e + 1.0)) / (e + 1.0);
}

/// Same for phi = c (1-t) / log(e/(1-t))^beta: substitute u = 1 - log(1-t).
inline double powerLogIntegral(double c, double beta, int d, double a, double b) {
  const double p = beta * (d - 2);
  const double cp = std::pow(c, d - 2);
  const double la = 1.0 - std::log(1.0 - a);
  const double lb = 1.0 - std::log(1.0 - b);
  if (p == 1.0) return cp * std::log(lb / la);
  return cp * (std::pow(lb, 1.0 - p) - std::pow(la, 1.0 - p)) / (1.0 - p);
}

/// Whitney membership from the definition: Q is emitted iff it meets the ball and the window, is
/// accepted, and every strict ancestor meets the ball and the window and is not accepted.
inline bool isWhitneyCube(int d, int level, const champagne::GridIndex& k, const champagne::ConeWindow* w) {
  champagne::GridIndex cur = k;
  for (int m = level; m >= 0; --m) {
    const auto c = champagne::makeCube(d, m, cur);
    if (!(c.minNormSquared() < 1.0)) return false;
    if (!champagne::windowMayMeet(w, c)) return false;
    const bool accepted = champagne::whitneyAccepts(c);
    if (m == level && !accepted) return false;
    if (m < level && accepted) return false;
    for (int i = 0; i < d; ++i) {
      auto& v = cur[static_cast<std::size_t>(i)];
      v = v >= 0 ? v / 2 : -((-v + 1) / 2);  // floor division
    }
  }
  return true;
}

/// All Whitney cubes up to maxLevel, by scanning every grid cell of each level that could
/// possibly qualify (level by level, lexicographic). With a window the scan is limited to a box
/// around tau that contains every cube the window can admit at that level.
inline std::vector<champagne::WhitneyCube> bruteWhitney(int d, int maxLevel, const champagne::ConeWindow* w) {
  std::vector<champagne::WhitneyCube> out;
  const double rootD = std::sqrt(static_cast<double>(d));
  for (int m = 0; m <= maxLevel; ++m) {
    const std::int64_t n = std::int64_t{1} << m;
    const double side = std::ldexp(1.0, -m);
    std::array<std::int64_t, champagne::kMaxDim> lo{};
    std::array<std::int64_t, champagne::kMaxDim> hi{};
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = -n;
      hi[static_cast<std::size_t>(i)] = n - 1;
      if (w != nullptr) {
        // emitted cubes have boundary distance < 3 sqrt(d) side, so points in them have 1-|x| < 4 sqrt(d) side
        const double reach = w->coneFactor * 4.0 * rootD * side + w->coneCap + 2.0 * rootD * side;
        const double t = w->tau[static_cast<std::size_t>(i)];
        lo[static_cast<std::size_t>(i)] = std::max(-n, static_cast<std::int64_t>(std::floor((t - reach) / side)));
        hi[static_cast<std::size_t>(i)] = std::min(n - 1, static_cast<std::int64_t>(std::floor((t + reach) / side)));
      }
    }
    champagne::GridIndex k{};
    for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
    for (;;) {
      if (isWhitneyCube(d, m, k, w)) out.push_back(champagne::makeCube(d, m, k));
      int i = d - 1;
      while (i >= 0 && k[static_cast<std::size_t>(i)] == hi[static_cast<std::size_t>(i)]) {
        k[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        --i;
      }
      if (i < 0) break;
      ++k[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

/// Per-level (lower, upper) Wiener sums from the brute enumeration and brute capacity brackets.
inline std::vector<std::pair<double, double>> bruteWienerLevels(const ObstacleField& f, const std::vector<double>& tau,
                                                                int maxLevel, const champagne::ConeWindow* w) {
  const int d = f.dimension();
  std::vector<std::pair<double, double>> sums(static_cast<std::size_t>(maxLevel) + 1, {0.0, 0.0});
  for (const auto& c : bruteWhitney(d, maxLevel, w)) {
    const auto cap = champagne::capInterval(f, c);
    if (cap.upper == 0.0) continue;
    double rho2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double t = c.center[static_cast<std::size_t>(i)] - tau[static_cast<std::size_t>(i)];
      rho2 += t * t;
    }
    const double rho = std::sqrt(rho2);
    const double factor = c.qk * c.qk / champagne::ipow(rho, d);
    sums[static_cast<std::size_t>(c.level)].first += factor * cap.lower;
    sums[static_cast<std::size_t>(c.level)].second += factor * cap.upper;
  }
  return sums;
}

}  // namespace oracle
