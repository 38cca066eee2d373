#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "profile.hpp"
#include "shells.hpp"

namespace champagne {

/// Region {x : |x - tau| <= coneFactor (1 - |x|) + coneCap} around a boundary point tau.
/// Used to restrict both the Whitney enumeration and field generation to a neighbourhood of tau.
struct ConeWindow {
  std::vector<double> tau;
  double coneFactor = 8.0;
  double coneCap = 0.0;

  int dimension() const { return static_cast<int>(tau.size()); }

  bool contains(const double* x, int d) const {
    return distance(x, tau.data(), d) <= coneFactor * (1.0 - norm(x, d)) + coneCap;
  }

  /// Conservative test for the box [lo, hi]: false only if no point of the box is in the window.
  bool mayIntersectBox(const double* lo, const double* hi, int d) const {
    std::array<double, kMaxDim> origin{};
    const double minTau = std::sqrt(boxDistanceSquared(tau.data(), lo, hi, d));
    const double minNorm = std::sqrt(boxDistanceSquared(origin.data(), lo, hi, d));
    return minTau <= coneFactor * (1.0 - minNorm) + coneCap;
  }
};

/// Closed ball B(center, radius).
struct Obstacle {
  std::vector<double> center;
  double radius = 0.0;
};

/// Metadata carried with a field: the shells it was built on, the profile and spacing constants.
struct FieldInfo {
  int dimension = 3;
  ShellGeometry shells;
  std::optional<RadiusProfile> profile;
  /// Declared separation constant; 0 when unknown.
  double epsilon = 0.0;
  /// Empirical uniform-density constant; NaN when not measured.
  double densityR = std::numeric_limits<double>::quiet_NaN();
  /// Generator target separation; NaN for hand-built fields.
  double sep = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::uint64_t> seed;
  /// Non-empty when the field was generated only inside these windows.
  std::vector<ConeWindow> windows;
};

/// Immutable collection of closed balls inside the unit ball of R^d.
///
/// Centres are stored flat (row-major, stride d). Each obstacle is tagged with its annulus index:
/// the smallest j with |centre| <= rho_j under the field's K.
class ObstacleField {
 public:
  ObstacleField(FieldInfo info, std::vector<double> centers, std::vector<double> radii)
      : info_(std::move(info)), centers_(std::move(centers)), radii_(std::move(radii)) {
    const int d = info_.dimension;
    checkDimension(d);
    if (centers_.size() != radii_.size() * static_cast<std::size_t>(d)) {
      throw ConfigurationError("centre array size does not match radius count times dimension");
    }
    for (const auto& w : info_.windows) {
      if (w.dimension() != d) throw ConfigurationError("window dimension does not match field dimension");
    }
    norms_.resize(radii_.size());
    annuli_.resize(radii_.size());
    for (std::size_t i = 0; i < radii_.size(); ++i) {
      const double r = radii_[i];
      if (!(r > 0.0) || !std::isfinite(r)) {
        throw ConfigurationError("obstacle " + std::to_string(i) + " has non-positive radius");
      }
      norms_[i] = norm(center(i), d);
      if (!(norms_[i] + r < 1.0)) {
        throw ConfigurationError("obstacle " + std::to_string(i) + " is not strictly inside the unit ball");
      }
      annuli_[i] = info_.shells.annulusOf(norms_[i]);
    }
  }

  ObstacleField(FieldInfo info, const std::vector<Obstacle>& obstacles)
      : ObstacleField(std::move(info), flattenCenters(obstacles), radiiOf(obstacles)) {}

  /// Field with no obstacles.
  static ObstacleField empty(int d, ShellGeometry shells = {}) {
    FieldInfo info;
    info.dimension = d;
    info.shells = shells;
    return ObstacleField(std::move(info), std::vector<double>{}, std::vector<double>{});
  }

  const FieldInfo& info() const { return info_; }
  int dimension() const { return info_.dimension; }
  const ShellGeometry& shells() const { return info_.shells; }
  const std::optional<RadiusProfile>& profile() const { return info_.profile; }

  std::size_t size() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }

  const double* center(std::size_t i) const { return centers_.data() + i * static_cast<std::size_t>(dimension()); }
  double radius(std::size_t i) const { return radii_[i]; }
  double centerNorm(std::size_t i) const { return norms_[i]; }
  int annulus(std::size_t i) const { return annuli_[i]; }

  std::span<const double> centers() const { return centers_; }
  std::span<const double> radii() const { return radii_; }

  Obstacle obstacle(std::size_t i) const {
    return Obstacle{std::vector<double>(center(i), center(i) + dimension()), radius(i)};
  }

  /// Deepest annulus index present, or -1 for an empty field.
  int maxAnnulus() const {
    int m = -1;
    for (int a : annuli_) m = std::max(m, a);
    return m;
  }

  /// Same metadata, obstacles for which keep(i) holds, in the original order.
  template <class Pred>
  ObstacleField subset(Pred keep) const {
    const auto d = static_cast<std::size_t>(dimension());
    std::vector<double> c;
    std::vector<double> r;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!keep(i)) continue;
      c.insert(c.end(), center(i), center(i) + d);
      r.push_back(radius(i));
    }
    return ObstacleField(info_, std::move(c), std::move(r));
  }

  /// Obstacles whose annulus index lies in [lo, hi].
  ObstacleField annulusRange(int lo, int hi) const {
    return subset([&](std::size_t i) { return annuli_[i] >= lo && annuli_[i] <= hi; });
  }

  ObstacleField withInfo(FieldInfo info) const {
    info.dimension = info_.dimension;
    return ObstacleField(std::move(info), centers_, radii_);
  }

 private:
  static std::vector<double> flattenCenters(const std::vector<Obstacle>& obstacles) {
    std::vector<double> out;
    for (const auto& o : obstacles) out.insert(out.end(), o.center.begin(), o.center.end());
    return out;
  }

  static std::vector<double> radiiOf(const std::vector<Obstacle>& obstacles) {
    std::vector<double> out;
    out.reserve(obstacles.size());
    for (const auto& o : obstacles) out.push_back(o.radius);
    return out;
  }

  FieldInfo info_;
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<double> norms_;
  std::vector<int> annuli_;
};

/// Signed distance from x to the surface of obstacle i: |x - centre| - r.
/// The single definition shared by the spatial index and every brute-force scan.
inline double surfaceDistance(const ObstacleField& field, std::size_t i, const double* x) {
  return distance(x, field.center(i), field.dimension()) - field.radius(i);
}

}  // namespace champagne
