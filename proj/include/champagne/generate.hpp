#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "field.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "shells.hpp"
#include "spacing.hpp"
#include "spatial_index.hpp"

namespace champagne {

struct GenerateOptions {
  /// When non-empty, shells are populated only near these boundary points.
  std::vector<ConeWindow> windows;
  /// Dart budget per shell as a multiple of the expected packing count.
  double attemptFactor = 64.0;
  /// Probe count for the density measurement stored in the field.
  std::size_t probeCount = 4096;
  /// Refuse configurations whose expected obstacle count exceeds this.
  double maxObstacles = 4e6;
  unsigned workers = 0;
};

namespace detail {

inline constexpr std::uint64_t kShellStream = std::uint64_t{1} << 63;

/// Rough maximal-packing count for separation delta on a (d-1)-sphere of radius rho.
inline double expectedPackingCount(int d, double rho, double delta) {
  const double capArea = unitBallVolume(d - 1) * std::pow(0.5 * delta, d - 1);
  return std::max(1.0, unitSphereArea(d) * std::pow(rho, d - 1) / capArea);
}

/// Dart throwing on one sphere with a hash grid of cell size delta.
class DartBoard {
 public:
  DartBoard(int d, double delta) : d_(d), delta_(delta) {}

  bool tryInsert(const double* p) {
    std::array<std::int64_t, kMaxDim> cell{};
    for (int i = 0; i < d_; ++i) cell[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(p[i] / delta_));
    if (!neighbourhoodClear(cell, p)) return false;
    const auto id = static_cast<std::uint32_t>(points_.size() / static_cast<std::size_t>(d_));
    points_.insert(points_.end(), p, p + d_);
    grid_[hash(cell)].push_back(id);
    return true;
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size() / static_cast<std::size_t>(d_); }

 private:
  std::uint64_t hash(const std::array<std::int64_t, kMaxDim>& cell) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (int i = 0; i < d_; ++i) {
      h ^= static_cast<std::uint64_t>(cell[static_cast<std::size_t>(i)]) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  bool neighbourhoodClear(const std::array<std::int64_t, kMaxDim>& cell, const double* p) const {
    std::array<std::int64_t, kMaxDim> probe{};
    std::array<int, kMaxDim> offset{};
    offset.fill(-1);
    for (;;) {
      for (int i = 0; i < d_; ++i) {
        const auto k = static_cast<std::size_t>(i);
        probe[k] = cell[k] + offset[k];
      }
      auto it = grid_.find(hash(probe));
      if (it != grid_.end()) {
        for (auto id : it->second) {
          if (!(distance(p, points_.data() + static_cast<std::size_t>(id) * static_cast<std::size_t>(d_), d_) > delta_)) {
            return false;
          }
        }
      }
      int i = 0;
      while (i < d_ && offset[static_cast<std::size_t>(i)] == 1) offset[static_cast<std::size_t>(i++)] = -1;
      if (i == d_) return true;
      ++offset[static_cast<std::size_t>(i)];
    }
  }

  int d_;
  double delta_;
  std::vector<double> points_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid_;
};

/// Checks the per-shell conditions that make the construction disjoint, ball-contained and
/// origin-avoiding. Throws ConfigurationError naming the first failing shell.
inline void checkShellFeasibility(int d, const ShellGeometry& shells, const RadiusProfile& profile, double sep) {
  (void)d;
  for (int j = shells.jMin; j <= shells.jMax; ++j) {
    const double g = shells.gap(j);
    const double rho = shells.radius(j);
    const double r = profile(rho);
    const std::string where = "shell j = " + std::to_string(j) + ": ";
    if (!(r < g)) throw ConfigurationError(where + "radius phi(rho_j) >= 1 - rho_j, obstacle would leave the ball");
    if (!(r < rho)) throw ConfigurationError(where + "radius phi(rho_j) >= rho_j, obstacle would contain the origin");
    if (!(2.0 * r < sep * g)) {
      throw ConfigurationError(where + "2 phi(rho_j) >= sep K^-j, obstacles on the shell could overlap");
    }
    if (j < shells.jMax) {
      const double gapToNext = g - shells.gap(j + 1);
      const double rNext = profile(shells.radius(j + 1));
      if (!(gapToNext > r + rNext)) {
        throw ConfigurationError(where + "rho_{j+1} - rho_j <= phi_j + phi_{j+1}, obstacles on adjacent shells could overlap");
      }
    }
  }
}

/// Dart throwing on S_j (restricted to window caps when given). Deterministic in (seed, j).
inline std::vector<double> generateShell(int d, const ShellGeometry& shells, int j, double sep, std::uint64_t seed,
                                         const GenerateOptions& options) {
  const double g = shells.gap(j);
  const double rho = shells.radius(j);
  const double delta = sep * g;
  CounterRng rng(seed, kShellStream | static_cast<std::uint64_t>(j));
  DartBoard board(d, delta);
  std::array<double, kMaxDim> p{};

  if (options.windows.empty()) {
    const double budget = options.attemptFactor * expectedPackingCount(d, rho, delta);
    for (double attempt = 0; attempt < budget; attempt += 1.0) {
      rng.direction(d, p.data());
      for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] *= rho;
      board.tryInsert(p.data());
    }
    return board.points();
  }

  std::vector<double> thetas;
  double capCount = 0.0;
  for (const auto& w : options.windows) {
    const double chord = (2.0 * w.coneFactor + 3.0) * g + w.coneCap;
    const double theta = capAngleForChord(chord, rho);
    thetas.push_back(theta);
    const double capChord = 2.0 * rho * std::sin(0.5 * theta);
    const double fullCount = expectedPackingCount(d, rho, delta);
    const double fraction = std::min(1.0, std::pow(capChord / (2.0 * rho), d - 1) * 2.0);
    capCount += std::max(1.0, fullCount * fraction);
  }
  const double budget = options.attemptFactor * capCount;
  for (double attempt = 0; attempt < budget; attempt += 1.0) {
    const auto w = static_cast<std::size_t>(rng.uniform() * static_cast<double>(options.windows.size()));
    capDirection(options.windows[w].tau.data(), thetas[w], d, rng, p.data());
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] *= rho;
    board.tryInsert(p.data());
  }
  return board.points();
}

}  // namespace detail

/// Asserts pairwise disjointness of all obstacles exactly (no tolerance). Throws std::logic_error.
inline void assertDisjoint(const ObstacleField& field, const ShellIndex& index) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    index.forEachSurfaceWithin(field.center(i), field.radius(i), [&](std::size_t k, double) {
      if (k == i) return;
      if (!(distance(field.center(i), field.center(k), field.dimension()) > field.radius(i) + field.radius(k))) {
        throw std::logic_error("obstacles " + std::to_string(i) + " and " + std::to_string(k) + " intersect");
      }
    });
  }
}

/// Regularly spaced field with centres on S_j, j in [jMin, jMax], placed by dart throwing with
/// rejection radius sep K^-j and radii phi(rho_j). The stored epsilon and densityR are measured.
inline ObstacleField generateRegularField(int d, const ShellGeometry& shells, const RadiusProfile& profile, double sep,
                                          std::uint64_t seed, const GenerateOptions& options = {}) {
  checkDimension(d);
  ShellGeometry::make(shells.K, shells.jMin, shells.jMax);
  if (!(sep > 0.0) || !std::isfinite(sep)) throw ConfigurationError("sep must be positive");
  for (const auto& w : options.windows) {
    if (w.dimension() != d) throw ConfigurationError("window dimension does not match field dimension");
    if (std::abs(norm(w.tau) - 1.0) > 1e-12) throw DomainError("window centre must lie on the unit sphere");
  }
  FieldInfo info;
  info.dimension = d;
  info.shells = shells;
  info.profile = profile;
  info.sep = sep;
  info.seed = seed;
  info.windows = options.windows;
  if (shells.empty()) {
    info.epsilon = std::min(sep, shells.K - 1.0);
    return ObstacleField(std::move(info), std::vector<double>{}, std::vector<double>{});
  }
  shells.radius(shells.jMax);  // range check before any work
  detail::checkShellFeasibility(d, shells, profile, sep);
  if (options.windows.empty()) {
    double expected = 0.0;
    for (int j = shells.jMin; j <= shells.jMax; ++j) {
      expected += detail::expectedPackingCount(d, shells.radius(j), sep * shells.gap(j));
    }
    if (expected > options.maxObstacles) {
      throw ConfigurationError("expected obstacle count " + std::to_string(expected) + " exceeds the limit " +
                               std::to_string(options.maxObstacles));
    }
  }

  const auto shellCount = static_cast<std::size_t>(shells.jMax - shells.jMin + 1);
  std::vector<std::vector<double>> perShell(shellCount);
  parallelFor(
      shellCount, options.workers,
      [&](std::size_t k) {
        perShell[k] = detail::generateShell(d, shells, shells.jMin + static_cast<int>(k), sep, seed, options);
      },
      1);

  std::vector<double> centers;
  std::vector<double> radii;
  for (std::size_t k = 0; k < shellCount; ++k) {
    const double r = profile(shells.radius(shells.jMin + static_cast<int>(k)));
    centers.insert(centers.end(), perShell[k].begin(), perShell[k].end());
    radii.insert(radii.end(), perShell[k].size() / static_cast<std::size_t>(d), r);
  }
  ObstacleField raw(info, std::move(centers), std::move(radii));
  const ShellIndex index(raw);
  assertDisjoint(raw, index);
  SpacingOptions spacingOptions;
  spacingOptions.workers = options.workers;
  const SpacingReport report = validateSpacing(raw, index, options.probeCount, seed, spacingOptions);
  info.epsilon = report.vacuous ? std::min(sep, shells.K - 1.0) : report.epsilonEmpirical * (1.0 - 1e-9);
  info.densityR = report.densityREmpirical;
  return raw.withInfo(std::move(info));
}

}  // namespace champagne
