#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "classify.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "spatial_index.hpp"

namespace champagne {

inline constexpr int kMaxWhitneyLevel = 40;

using GridIndex = std::array<std::int64_t, kMaxDim>;

/// Dyadic cube prod [k_i 2^-m, (k_i + 1) 2^-m] of [-1,1]^d.
struct WhitneyCube {
  int dimension = 3;
  int level = 0;
  GridIndex gridIndex{};
  Coords center{};
  double side = 1.0;
  /// 1 - |centre|
  double qk = 0.0;

  double lo(int i) const { return static_cast<double>(gridIndex[static_cast<std::size_t>(i)]) * side; }
  double hi(int i) const { return static_cast<double>(gridIndex[static_cast<std::size_t>(i)] + 1) * side; }
  double diameter() const { return side * std::sqrt(static_cast<double>(dimension)); }

  void bounds(double* outLo, double* outHi) const {
    for (int i = 0; i < dimension; ++i) {
      outLo[i] = lo(i);
      outHi[i] = hi(i);
    }
  }

  /// max |corner|^2, exact for dyadic corners up to rounding of the sum.
  double maxCornerNormSquared() const {
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) {
      const double t = std::max(std::abs(lo(i)), std::abs(hi(i)));
      s += t * t;
    }
    return s;
  }

  double minNormSquared() const {
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) {
      double t = 0.0;
      if (lo(i) > 0.0) {
        t = lo(i);
      } else if (hi(i) < 0.0) {
        t = -hi(i);
      }
      s += t * t;
    }
    return s;
  }

  /// dist(Q, unit sphere) for cubes inside the ball.
  double boundaryDistance() const { return 1.0 - std::sqrt(maxCornerNormSquared()); }
};

inline WhitneyCube makeCube(int d, int level, const GridIndex& k) {
  WhitneyCube c;
  c.dimension = d;
  c.level = level;
  c.gridIndex = k;
  c.side = std::ldexp(1.0, -level);
  for (int i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    c.center[u] = (static_cast<double>(k[u]) + 0.5) * c.side;
  }
  c.qk = 1.0 - norm(c.center.data(), d);
  return c;
}

/// Adopted Whitney condition: diam <= dist(Q, boundary). The companion dist <= 4 diam follows
/// from the parent having failed the condition.
inline bool whitneyAccepts(const WhitneyCube& c) { return c.diameter() <= c.boundaryDistance(); }

inline bool windowMayMeet(const ConeWindow* window, const WhitneyCube& c) {
  if (window == nullptr) return true;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  c.bounds(lo.data(), hi.data());
  return window->mayIntersectBox(lo.data(), hi.data(), c.dimension);
}

namespace detail {

inline void checkWhitneyArgs(int d, int maxLevel) {
  checkDimension(d);
  if (maxLevel < 1 || maxLevel > kMaxWhitneyLevel) {
    throw RangeError("maxLevel must be in [1, " + std::to_string(kMaxWhitneyLevel) + "], got " + std::to_string(maxLevel));
  }
}

inline bool lexLess(const GridIndex& a, const GridIndex& b, int d) {
  for (int i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (a[u] != b[u]) return a[u] < b[u];
  }
  return false;
}

/// Level-0 cubes of [-1,1]^d in lexicographic order.
inline std::vector<GridIndex> rootIndices(int d) {
  std::vector<GridIndex> out;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    GridIndex k{};
    for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = (mask >> (d - 1 - i)) & 1u ? 0 : -1;
    out.push_back(k);
  }
  std::sort(out.begin(), out.end(), [d](const auto& a, const auto& b) { return lexLess(a, b, d); });
  return out;
}

}  // namespace detail

/// Streams the Whitney cubes of the unit ball up to maxLevel, level by level in lexicographic
/// grid order. Rejected cubes that reach into the ball are subdivided. With a window, only cubes
/// that may meet the cone are emitted or subdivided.
template <class Fn>
void forEachWhitneyCube(int d, int maxLevel, const ConeWindow* window, Fn&& fn) {
  detail::checkWhitneyArgs(d, maxLevel);
  if (window != nullptr && window->dimension() != d) throw DomainError("window dimension mismatch");
  std::vector<GridIndex> pending = detail::rootIndices(d);
  for (int level = 0; level <= maxLevel && !pending.empty(); ++level) {
    std::vector<GridIndex> next;
    for (const auto& k : pending) {
      const WhitneyCube c = makeCube(d, level, k);
      if (!(c.minNormSquared() < 1.0)) continue;
      if (!windowMayMeet(window, c)) continue;
      if (whitneyAccepts(c)) {
        fn(c);
        continue;
      }
      if (level == maxLevel) continue;
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        GridIndex child{};
        for (int i = 0; i < d; ++i) {
          const auto u = static_cast<std::size_t>(i);
          child[u] = 2 * k[u] + ((mask >> (d - 1 - i)) & 1u);
        }
        next.push_back(child);
      }
    }
    std::sort(next.begin(), next.end(), [d](const auto& a, const auto& b) { return detail::lexLess(a, b, d); });
    pending = std::move(next);
  }
}

inline std::vector<WhitneyCube> decompose(int d, int maxLevel, const std::optional<ConeWindow>& window = std::nullopt) {
  std::vector<WhitneyCube> out;
  forEachWhitneyCube(d, maxLevel, window ? &*window : nullptr, [&](const WhitneyCube& c) { out.push_back(c); });
  return out;
}

struct CapInterval {
  double lower = 0.0;
  double upper = 0.0;
};

inline bool ballMeetsCube(const ObstacleField& field, std::size_t i, const WhitneyCube& c) {
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  c.bounds(lo.data(), hi.data());
  const double r = field.radius(i);
  return boxDistanceSquared(field.center(i), lo.data(), hi.data(), field.dimension()) <= r * r;
}

inline bool ballInsideCube(const ObstacleField& field, std::size_t i, const WhitneyCube& c) {
  const double* x = field.center(i);
  const double r = field.radius(i);
  for (int k = 0; k < field.dimension(); ++k) {
    if (x[k] - r < c.lo(k) || x[k] + r > c.hi(k)) return false;
  }
  return true;
}

/// Capacity bracket for the part of the obstacle union inside a cube, with cap(B(r)) = r^{d-2}:
/// lower = largest fully contained ball, upper = sum over balls meeting the cube.
template <class Ids>
CapInterval capIntervalOver(const ObstacleField& field, const WhitneyCube& c, const Ids& ids) {
  CapInterval out;
  const int p = field.dimension() - 2;
  for (std::size_t i : ids) {
    if (!ballMeetsCube(field, i, c)) continue;
    const double cap = ipow(field.radius(i), p);
    out.upper += cap;
    if (ballInsideCube(field, i, c)) out.lower = std::max(out.lower, cap);
  }
  return out;
}

inline CapInterval capInterval(const ObstacleField& field, const ShellIndex& index, const WhitneyCube& c) {
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  c.bounds(lo.data(), hi.data());
  std::vector<std::size_t> ids;
  index.forEachIntersectingBox(lo.data(), hi.data(), [&](std::size_t i) { ids.push_back(i); });
  std::sort(ids.begin(), ids.end());
  return capIntervalOver(field, c, ids);
}

inline CapInterval capInterval(const ObstacleField& field, const WhitneyCube& c) {
  std::vector<std::size_t> ids(field.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return capIntervalOver(field, c, ids);
}

struct CubeTerm {
  int level = 0;
  GridIndex gridIndex{};
  double qk = 0.0;
  double rho = 0.0;
  double capLower = 0.0;
  double capUpper = 0.0;
  double termLower = 0.0;
  double termUpper = 0.0;
};

struct LevelSum {
  int level = 0;
  std::size_t cubes = 0;
  double lower = 0.0;
  double upper = 0.0;
  double cumulativeLower = 0.0;
  double cumulativeUpper = 0.0;
};

struct WienerOptions {
  /// Restrict to the cone |x - tau| <= coneFactor (1 - |x|) + coneCap; coneFactor <= 0 disables.
  double coneFactor = 8.0;
  double coneCap = 0.0;
  /// First level used for classification.
  int classifyFrom = 4;
  double margin = 0.1;
  bool keepCubes = true;
};

struct WienerReport {
  std::vector<double> tau;
  int maxLevel = 0;
  std::optional<ConeWindow> window;
  /// Cubes with a non-zero upper term, in emission order.
  std::vector<CubeTerm> perCube;
  /// Levels 0..maxLevel.
  std::vector<LevelSum> perLevel;
  int classifiedFrom = 0;
  int classifiedTo = -1;
  Verdict verdict = Verdict::Inconclusive;
  TailClassification upperTail;
  TailClassification lowerTail;
  double totalLower = 0.0;
  double totalUpper = 0.0;
  /// Measured cubes-per-ring constant and the resulting estimate of what the window leaves out.
  double ringConstant = 0.0;
  double truncationEstimate = 0.0;
  std::string note;
};

/// Cubes per ring: max over n of (#level-m cubes with n <= |c - tau| / side < n + 1) / n^{d-2},
/// measured from the decomposition itself around tau = e_1.
inline double measureRingConstant(int d, int level = 7, int rings = 8) {
  ConeWindow w;
  w.tau.assign(static_cast<std::size_t>(d), 0.0);
  w.tau[0] = 1.0;
  w.coneFactor = 4.0 * (rings + 2);
  std::vector<double> counts(static_cast<std::size_t>(rings) + 1, 0.0);
  forEachWhitneyCube(d, level, &w, [&](const WhitneyCube& c) {
    if (c.level != level) return;
    const double n = distance(c.center.data(), w.tau.data(), d) / c.side;
    const auto ring = static_cast<std::size_t>(n);
    if (ring >= 1 && ring <= static_cast<std::size_t>(rings)) counts[ring] += 1.0;
  });
  double best = 0.0;
  for (int n = 1; n <= rings; ++n) best = std::max(best, counts[static_cast<std::size_t>(n)] / std::pow(n, d - 2));
  return best;
}

/// Levels whose Whitney cubes fall entirely within the populated shell range [jMin, jMax].
inline std::pair<int, int> completeLevels(const ObstacleField& field, int maxLevel, int classifyFrom) {
  const auto& sh = field.shells();
  const double rootD = std::sqrt(static_cast<double>(field.dimension()));
  const double logK2 = std::log2(sh.K);
  const int lo = std::max(classifyFrom, static_cast<int>(std::ceil(std::log2(4.0 * rootD) + sh.jMin * logK2)));
  const int hi = std::min(maxLevel, static_cast<int>(std::floor(sh.jMax * logK2 - std::log2(rootD))));
  return {lo, hi};
}

/// Wiener-type series sum_k q_k^2 / rho_k(tau)^d cap(A cap Q_k) as per-level interval sums.
inline WienerReport wienerSeries(const ObstacleField& field, std::span<const double> tau, int maxLevel,
                                 const WienerOptions& options = {}) {
  const int d = field.dimension();
  detail::checkWhitneyArgs(d, maxLevel);
  if (static_cast<int>(tau.size()) != d) throw DomainError("tau has the wrong dimension");
  if (std::abs(norm(tau) - 1.0) > 1e-12) throw DomainError("tau must lie on the unit sphere");
  if (maxLevel < 4) throw DomainError("wienerSeries needs maxLevel >= 4");

  WienerReport report;
  report.tau.assign(tau.begin(), tau.end());
  report.maxLevel = maxLevel;
  if (options.coneFactor > 0.0) report.window = ConeWindow{report.tau, options.coneFactor, options.coneCap};
  const ConeWindow* window = report.window ? &*report.window : nullptr;
  report.perLevel.resize(static_cast<std::size_t>(maxLevel) + 1);
  for (int m = 0; m <= maxLevel; ++m) report.perLevel[static_cast<std::size_t>(m)].level = m;

  // Breadth-first refinement carrying the obstacles that meet each pending cube.
  struct Pending {
    GridIndex k;
    std::vector<std::uint32_t> ids;
  };
  std::vector<Pending> pending;
  {
    const ShellIndex index(field);
    for (const auto& k : detail::rootIndices(d)) {
      const WhitneyCube c = makeCube(d, 0, k);
      std::array<double, kMaxDim> lo{};
      std::array<double, kMaxDim> hi{};
      c.bounds(lo.data(), hi.data());
      Pending p{k, {}};
      index.forEachIntersectingBox(lo.data(), hi.data(), [&](std::size_t i) {
        if (ballMeetsCube(field, i, c)) p.ids.push_back(static_cast<std::uint32_t>(i));
      });
      std::sort(p.ids.begin(), p.ids.end());
      if (!p.ids.empty()) pending.push_back(std::move(p));
    }
  }
  const int capPower = d - 2;
  std::vector<double> unitMax(static_cast<std::size_t>(maxLevel) + 1, 0.0);
  for (int level = 0; level <= maxLevel && !pending.empty(); ++level) {
    std::vector<Pending> next;
    LevelSum& sum = report.perLevel[static_cast<std::size_t>(level)];
    for (auto& p : pending) {
      const WhitneyCube c = makeCube(d, level, p.k);
      if (!(c.minNormSquared() < 1.0)) continue;
      if (!windowMayMeet(window, c)) continue;
      if (whitneyAccepts(c)) {
        CapInterval cap;
        for (auto i : p.ids) {
          const double v = ipow(field.radius(i), capPower);
          cap.upper += v;
          if (ballInsideCube(field, i, c)) cap.lower = std::max(cap.lower, v);
        }
        const double rho = distance(c.center.data(), report.tau.data(), d);
        const double factor = c.qk * c.qk / ipow(rho, d);
        CubeTerm t{level, p.k, c.qk, rho, cap.lower, cap.upper, factor * cap.lower, factor * cap.upper};
        ++sum.cubes;
        auto& unit = unitMax[static_cast<std::size_t>(level)];
        unit = std::max(unit, cap.upper * std::pow(c.qk, 2.0 - d));
        sum.lower += t.termLower;
        sum.upper += t.termUpper;
        if (options.keepCubes) report.perCube.push_back(t);
        continue;
      }
      if (level == maxLevel) continue;
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        Pending child;
        for (int i = 0; i < d; ++i) {
          const auto u = static_cast<std::size_t>(i);
          child.k[u] = 2 * p.k[u] + ((mask >> (d - 1 - i)) & 1u);
        }
        const WhitneyCube cc = makeCube(d, level + 1, child.k);
        for (auto i : p.ids) {
          if (ballMeetsCube(field, i, cc)) child.ids.push_back(i);
        }
        if (!child.ids.empty()) next.push_back(std::move(child));
      }
    }
    std::sort(next.begin(), next.end(), [d](const auto& a, const auto& b) { return detail::lexLess(a.k, b.k, d); });
    pending = std::move(next);
  }

  double cl = 0.0;
  double cu = 0.0;
  for (auto& s : report.perLevel) {
    cl += s.lower;
    cu += s.upper;
    s.cumulativeLower = cl;
    s.cumulativeUpper = cu;
  }
  report.totalLower = cl;
  report.totalUpper = cu;

  if (field.empty()) {
    report.verdict = Verdict::Converges;
    report.upperTail = {Verdict::Converges, -std::numeric_limits<double>::infinity(), TailRule::AllZero};
    report.lowerTail = report.upperTail;
    report.note = "empty field";
  } else {
    const auto [lo, hi] = completeLevels(field, maxLevel, options.classifyFrom);
    report.classifiedFrom = lo;
    report.classifiedTo = hi;
    // Shells sit every log2 K levels, so single levels alternate; classify running sums over
    // that many levels instead (same convergence for non-negative terms).
    const int w = std::max(1, static_cast<int>(std::ceil(std::log2(field.shells().K) - 1e-9)));
    if (hi - lo + 2 - w < 8) {
      report.note = "fewer than " + std::to_string(7 + w) + " complete levels in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]; not classified";
    } else {
      std::vector<double> upper;
      std::vector<double> lower;
      for (int m = lo; m + w - 1 <= hi; ++m) {
        double u = 0.0;
        double l = 0.0;
        for (int i = m; i < m + w; ++i) {
          u += report.perLevel[static_cast<std::size_t>(i)].upper;
          l += report.perLevel[static_cast<std::size_t>(i)].lower;
        }
        upper.push_back(u);
        lower.push_back(l);
      }
      report.upperTail = classifyTail(upper, lo, options.margin);
      report.lowerTail = classifyTail(lower, lo, options.margin);
      if (report.upperTail.verdict == Verdict::Converges) {
        report.verdict = Verdict::Converges;
      } else if (report.lowerTail.verdict == Verdict::Diverges) {
        report.verdict = Verdict::Diverges;
      }
    }
  }

  if (window != nullptr && !field.empty()) {
    report.ringConstant = measureRingConstant(d);
    // Cubes beyond ring n = coneFactor carry at most (1/n)^d q^{2-d} cap each.
    double ringTail = 0.0;
    for (int n = static_cast<int>(options.coneFactor); n < 100000; ++n) ringTail += 1.0 / (static_cast<double>(n) * n);
    for (double unit : unitMax) report.truncationEstimate += report.ringConstant * unit * ringTail;
  }
  return report;
}

}  // namespace champagne
