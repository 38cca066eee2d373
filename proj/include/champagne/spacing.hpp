#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "field.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "spatial_index.hpp"

namespace champagne {

/// Pair (outer, inner) with |outer| >= |inner| whose separation ratio breaches a limit.
struct PairViolation {
  std::size_t outer = 0;
  std::size_t inner = 0;
  double ratio = 0.0;
};

/// Probe point whose density ratio R' breaches a limit.
struct ProbeViolation {
  std::size_t probe = 0;
  std::vector<double> point;
  double ratio = 0.0;
};

struct SpacingReport {
  /// min |l - l'| / (1 - |l|) over pairs with |l| >= |l'|; +inf for fewer than two obstacles.
  double epsilonEmpirical = std::numeric_limits<double>::infinity();
  /// max over probes x of dist(x, centres) / (1 - |x|); 1 when vacuous.
  double densityREmpirical = 1.0;
  bool vacuous = false;
  std::size_t probesEvaluated = 0;
  std::optional<std::pair<std::size_t, std::size_t>> closestPair;
  std::vector<PairViolation> pairViolations;
  std::vector<ProbeViolation> probeViolations;
};

struct SpacingOptions {
  /// Report pairs with ratio <= epsilonLimit.
  std::optional<double> epsilonLimit;
  /// Report probes with ratio >= densityLimit.
  std::optional<double> densityLimit;
  unsigned workers = 0;
};

namespace detail {

inline constexpr std::uint64_t kProbeStream = std::uint64_t{1} << 62;

/// Probe point `i`: log-gap uniform in [jMin, jMax] (jittered for windowed fields, Halton otherwise).
inline void spacingProbe(const ObstacleField& field, std::size_t i, std::uint64_t seed, const double* shift,
                         double* out) {
  const int d = field.dimension();
  const auto& sh = field.shells();
  const double span = static_cast<double>(sh.jMax - sh.jMin);
  const auto& windows = field.info().windows;
  if (windows.empty()) {
    std::array<double, kMaxDim + 2> u{};
    const int dims = 1 + d + (d % 2);
    haltonPoint(i + 1, dims, u.data(), shift);
    const double s = sh.jMin + span * u[0];
    const double radius = 1.0 - std::pow(sh.K, -s);
    uniformsToDirection(u.data() + 1, d, out);
    for (int k = 0; k < d; ++k) out[k] *= radius;
    return;
  }
  CounterRng rng(seed, kProbeStream | i);
  const ConeWindow& w = windows[i % windows.size()];
  for (int attempt = 0;; ++attempt) {
    const double s = sh.jMin + span * rng.uniform();
    const double g = std::pow(sh.K, -s);
    const double radius = 1.0 - g;
    const double theta = capAngleForChord(w.coneFactor * g + w.coneCap, radius);
    capDirection(w.tau.data(), theta, d, rng, out);
    for (int k = 0; k < d; ++k) out[k] *= radius;
    if (w.contains(out, d) || attempt >= 64) return;
  }
}

}  // namespace detail

/// Measures the separation and density constants of a field.
///
/// The separation constant is exact (nearest inner-or-equal-norm centre per obstacle through the
/// index). The density constant is the worst ratio over `probeCount` probe points.
inline SpacingReport validateSpacing(const ObstacleField& field, const ShellIndex& index, std::size_t probeCount,
                                     std::uint64_t seed, const SpacingOptions& options = {}) {
  if (probeCount < 1) throw DomainError("probeCount must be >= 1");
  SpacingReport report;
  if (field.empty()) {
    report.vacuous = true;
    return report;
  }
  const int d = field.dimension();
  const std::size_t n = field.size();

  std::vector<NearestHit> inner(n);
  parallelFor(n, options.workers, [&](std::size_t i) {
    inner[i] = index.nearestCenter(field.center(i), [&](std::size_t k) {
      return k != i && field.centerNorm(k) <= field.centerNorm(i);
    });
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (inner[i].id < 0) continue;
    const double ratio = inner[i].distance / (1.0 - field.centerNorm(i));
    if (ratio < report.epsilonEmpirical) {
      report.epsilonEmpirical = ratio;
      report.closestPair = std::make_pair(i, static_cast<std::size_t>(inner[i].id));
    }
  }
  if (options.epsilonLimit) {
    const double eps = *options.epsilonLimit;
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = 1.0 - field.centerNorm(i);
      std::vector<PairViolation> found;
      index.forEachCenterWithin(field.center(i), eps * scale, [&](std::size_t k, double dist) {
        if (k == i || field.centerNorm(k) > field.centerNorm(i)) return;
        if (field.centerNorm(k) == field.centerNorm(i) && k < i) return;  // equal norms: report once
        const double ratio = dist / scale;
        if (ratio <= eps) found.push_back({i, k, ratio});
      });
      std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.inner < b.inner; });
      report.pairViolations.insert(report.pairViolations.end(), found.begin(), found.end());
    }
  }

  std::array<double, kMaxDim + 2> shift{};
  CounterRng shiftRng(seed, detail::kProbeStream - 1);
  for (auto& v : shift) v = shiftRng.uniform();
  std::vector<double> ratios(probeCount);
  std::vector<double> points(probeCount * static_cast<std::size_t>(d));
  parallelFor(probeCount, options.workers, [&](std::size_t p) {
    double* x = points.data() + p * static_cast<std::size_t>(d);
    detail::spacingProbe(field, p, seed, shift.data(), x);
    const NearestHit hit = index.nearestCenter(x, [](std::size_t) { return true; });
    ratios[p] = hit.distance / (1.0 - norm(x, d));
  });
  report.probesEvaluated = probeCount;
  report.densityREmpirical = *std::max_element(ratios.begin(), ratios.end());
  if (options.densityLimit) {
    for (std::size_t p = 0; p < probeCount; ++p) {
      if (ratios[p] >= *options.densityLimit) {
        const double* x = points.data() + p * static_cast<std::size_t>(d);
        report.probeViolations.push_back({p, std::vector<double>(x, x + d), ratios[p]});
      }
    }
  }
  return report;
}

inline SpacingReport validateSpacing(const ObstacleField& field, std::size_t probeCount, std::uint64_t seed,
                                     const SpacingOptions& options = {}) {
  const ShellIndex index(field);
  return validateSpacing(field, index, probeCount, seed, options);
}

}  // namespace champagne
