#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "field.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spatial_index.hpp"

namespace champagne {

/// Annulus depth meaning "keep every obstacle".
inline constexpr int kAllDepths = INT_MAX;

struct WalkConfig {
  std::uint64_t trials = 10000;
  /// Absorption shell width eta, used for both the unit sphere and obstacle surfaces.
  double boundaryTol = 1e-6;
  std::uint64_t maxSteps = 1000000;
  /// Obstacles in annuli > truncationDepth are ignored.
  int truncationDepth = kAllDepths;
  std::uint64_t seed = 0;
  /// Total step budget; checked between blocks of trials.
  double stepBudget = 1e12;
  unsigned workers = 0;

  void validate() const {
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (!(boundaryTol > 0.0 && boundaryTol < 1e-2)) throw DomainError("boundaryTol must lie in (0, 1e-2)");
    if (maxSteps < 1) throw DomainError("maxSteps must be >= 1");
    if (!(stepBudget > 0.0)) throw DomainError("stepBudget must be positive");
  }
};

/// Two-sided 95% Wilson score interval for k successes in n trials.
struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

inline WilsonInterval wilsonInterval(std::uint64_t k, std::uint64_t n, double z = kZ95) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct HarmonicEstimate {
  int depth = kAllDepths;
  std::uint64_t trials = 0;
  std::uint64_t escapes = 0;
  std::uint64_t absorbed = 0;
  std::uint64_t censored = 0;
  /// escapes / (escapes + absorbed); NaN if no walk resolved.
  double pHat = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  double ciLow = 0.0;
  double ciHigh = 1.0;
  /// Union bound on hitting an obstacle beyond the truncation depth.
  double tailBound = 0.0;
  bool tailCertified = true;
  /// censored / trials >= 1e-3.
  bool censoringFlagged = false;
  /// Step budget ran out; fewer trials than requested were run.
  bool partial = false;
  std::uint64_t requestedTrials = 0;
  std::uint64_t totalSteps = 0;

  /// Bracket [ciLow - tailBound, ciHigh], clipped to [0, 1], for the untruncated avoidance probability.
  double bracketLow() const { return std::max(0.0, ciLow - tailBound); }
  double bracketHigh() const { return std::min(1.0, ciHigh); }
};

/// Outcome of one walk at each depth of a sweep.
enum class WalkOutcome : std::uint8_t { Unresolved = 0, Escaped = 1, Absorbed = 2, Censored = 3 };

namespace detail {

inline constexpr std::uint64_t kWalkBlock = 8192;

/// One coupled walk. Runs in the geometry of the deepest unresolved depth; on absorption by an
/// obstacle in annulus a, every unresolved depth >= a is absorbed and the walk carries on from
/// the same point with the deepest remaining depth < a. The path is a valid walk for every depth
/// because each jump ball avoids a superset of that depth's obstacles.
inline std::uint64_t coupledWalk(const ShellIndex& index, const ObstacleField& field, std::span<const double> x0,
                                 std::span<const int> depths, const WalkConfig& config, std::uint64_t trial,
                                 WalkOutcome* outcome) {
  const int d = field.dimension();
  CounterRng rng(config.seed, trial);
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim> dir{};
  std::copy(x0.begin(), x0.end(), x.begin());
  const double eta = config.boundaryTol;
  int active = static_cast<int>(depths.size()) - 1;
  std::uint64_t steps = 0;
  for (int k = 0; k <= active; ++k) outcome[k] = WalkOutcome::Unresolved;
  while (active >= 0) {
    const double dOuter = 1.0 - norm(x.data(), d);
    if (dOuter < eta) {
      for (int k = 0; k <= active; ++k) outcome[k] = WalkOutcome::Escaped;
      break;
    }
    const NearestHit hit = index.nearest(x.data(), depths[static_cast<std::size_t>(active)]);
    if (hit.distance < eta) {
      const int a = field.annulus(static_cast<std::size_t>(hit.id));
      while (active >= 0 && depths[static_cast<std::size_t>(active)] >= a) outcome[active--] = WalkOutcome::Absorbed;
      continue;
    }
    if (steps >= config.maxSteps) {
      for (int k = 0; k <= active; ++k) outcome[k] = WalkOutcome::Censored;
      break;
    }
    const double radius = std::min(dOuter, hit.distance);
    rng.direction(d, dir.data());
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] += radius * dir[static_cast<std::size_t>(i)];
    ++steps;
  }
  return steps;
}

inline void checkStart(const ShellIndex& index, const ObstacleField& field, std::span<const double> x0, int deepest) {
  if (static_cast<int>(x0.size()) != field.dimension()) throw DomainError("start point has the wrong dimension");
  if (!(norm(x0) < 1.0)) throw DomainError("start point must lie in the open unit ball");
  const NearestHit hit = index.nearest(x0.data(), deepest);
  if (hit.id >= 0 && !(hit.distance > 0.0)) {
    throw DomainError("start point lies inside obstacle " + std::to_string(hit.id));
  }
}

inline HarmonicEstimate assemble(int depth, std::uint64_t requested, std::uint64_t escapes, std::uint64_t absorbed,
                                 std::uint64_t censored) {
  HarmonicEstimate e;
  e.depth = depth;
  e.requestedTrials = requested;
  e.escapes = escapes;
  e.absorbed = absorbed;
  e.censored = censored;
  e.trials = escapes + absorbed + censored;
  const std::uint64_t n = escapes + absorbed;
  if (n > 0) {
    e.pHat = static_cast<double>(escapes) / static_cast<double>(n);
    e.sigma = std::sqrt(e.pHat * (1.0 - e.pHat) / static_cast<double>(n));
  }
  const auto ci = wilsonInterval(escapes, n);
  e.ciLow = ci.low;
  e.ciHigh = ci.high;
  e.censoringFlagged = e.trials > 0 && static_cast<double>(censored) >= 1e-3 * static_cast<double>(e.trials);
  return e;
}

}  // namespace detail

/// Tail bound attached to an estimate at truncation depth J: union bound from annulus J + 1.
inline BoundReport tailBoundForDepth(const ObstacleField& field, int depth) {
  const int from = depth == kAllDepths ? std::max(field.maxAnnulus(), field.shells().jMax) + 1 : depth + 1;
  return unionTailBound(field, from);
}

/// Walk-on-spheres estimates at several truncation depths from one set of coupled walks.
/// Depths must be strictly increasing. pHat is non-increasing in depth walk by walk.
inline std::vector<HarmonicEstimate> depthSweep(const ObstacleField& field, const ShellIndex& index,
                                                std::span<const double> x0, const WalkConfig& config,
                                                std::span<const int> depths, bool attachTailBounds = true) {
  config.validate();
  if (depths.empty()) throw DomainError("depth list is empty");
  for (std::size_t k = 1; k < depths.size(); ++k) {
    if (!(depths[k] > depths[k - 1])) throw DomainError("depths must be strictly increasing");
  }
  if (depths.front() < 0) throw DomainError("depths must be >= 0");
  detail::checkStart(index, field, x0, depths.back());

  const std::size_t nd = depths.size();
  std::vector<std::uint64_t> escapes(nd, 0);
  std::vector<std::uint64_t> absorbed(nd, 0);
  std::vector<std::uint64_t> censored(nd, 0);
  std::uint64_t totalSteps = 0;
  std::uint64_t done = 0;
  bool partial = false;

  std::vector<WalkOutcome> outcomes;
  std::vector<std::uint64_t> steps;
  while (done < config.trials) {
    if (static_cast<double>(totalSteps) >= config.stepBudget) {
      partial = true;
      break;
    }
    const std::uint64_t block = std::min(detail::kWalkBlock, config.trials - done);
    outcomes.assign(block * nd, WalkOutcome::Unresolved);
    steps.assign(block, 0);
    parallelFor(
        block, config.workers,
        [&](std::size_t b) {
          steps[b] = detail::coupledWalk(index, field, x0, depths, config, done + b, outcomes.data() + b * nd);
        },
        16);
    for (std::uint64_t b = 0; b < block; ++b) {
      totalSteps += steps[b];
      for (std::size_t k = 0; k < nd; ++k) {
        switch (outcomes[b * nd + k]) {
          case WalkOutcome::Escaped:
            ++escapes[k];
            break;
          case WalkOutcome::Absorbed:
            ++absorbed[k];
            break;
          default:
            ++censored[k];
        }
      }
    }
    done += block;
  }

  std::vector<HarmonicEstimate> out;
  for (std::size_t k = 0; k < nd; ++k) {
    HarmonicEstimate e = detail::assemble(depths[k], config.trials, escapes[k], absorbed[k], censored[k]);
    e.partial = partial;
    e.totalSteps = totalSteps;
    if (attachTailBounds) {
      const auto tb = tailBoundForDepth(field, depths[k]);
      e.tailBound = tb.value;
      e.tailCertified = tb.certified;
    }
    out.push_back(e);
  }
  return out;
}

inline std::vector<HarmonicEstimate> depthSweep(const ObstacleField& field, std::span<const double> x0,
                                                const WalkConfig& config, std::span<const int> depths) {
  const ShellIndex index(field);
  return depthSweep(field, index, x0, config, depths);
}

/// Single-depth estimate: the one-element sweep at config.truncationDepth.
inline HarmonicEstimate runWalks(const ObstacleField& field, const ShellIndex& index, std::span<const double> x0,
                                 const WalkConfig& config, bool attachTailBound = true) {
  const int depth[1] = {config.truncationDepth};
  return depthSweep(field, index, x0, config, depth, attachTailBound).front();
}

inline HarmonicEstimate runWalks(const ObstacleField& field, std::span<const double> x0, const WalkConfig& config) {
  const ShellIndex index(field);
  return runWalks(field, index, x0, config);
}

/// Per-walk outcomes of a sweep (trial-major, depth-minor) for path-wise checks.
inline std::vector<WalkOutcome> sweepOutcomes(const ObstacleField& field, const ShellIndex& index,
                                              std::span<const double> x0, const WalkConfig& config,
                                              std::span<const int> depths) {
  config.validate();
  detail::checkStart(index, field, x0, depths.back());
  const std::size_t nd = depths.size();
  std::vector<WalkOutcome> out(config.trials * nd);
  parallelFor(
      config.trials, config.workers,
      [&](std::size_t t) { detail::coupledWalk(index, field, x0, depths, config, t, out.data() + t * nd); }, 16);
  return out;
}

}  // namespace champagne
