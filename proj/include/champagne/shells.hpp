#pragma once

#include <cfloat>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace champagne {

/// Spheres S_j of radius rho_j = 1 - K^{-j}; annulus A_j lies between S_{j-1} and S_j.
/// [jMin, jMax] is the populated range (empty when jMax < jMin).
struct ShellGeometry {
  double K = 5.0;
  int jMin = 1;
  int jMax = 0;

  static ShellGeometry make(double K, int jMin, int jMax) {
    if (!(K > 1.0) || !std::isfinite(K)) throw DomainError("shell ratio K must be > 1");
    if (jMin < 0) throw DomainError("jMin must be >= 0");
    return ShellGeometry{K, jMin, jMax};
  }

  bool empty() const { return jMax < jMin; }

  /// K^{-j}: the distance from S_j to the unit sphere.
  double gap(int j) const {
    if (j < 0) throw DomainError("shell index must be >= 0, got " + std::to_string(j));
    const double g = std::pow(K, -static_cast<double>(j));
    if (!(g >= DBL_MIN)) throw RangeError("K^-j underflows for j = " + std::to_string(j));
    return g;
  }

  /// rho_j = 1 - K^{-j}. Rejects j where rho_j would round to 1.
  double radius(int j) const {
    const double g = gap(j);
    if (g < DBL_EPSILON) {
      throw RangeError("shell j = " + std::to_string(j) + " is closer to the unit sphere than machine resolution");
    }
    return 1.0 - g;
  }

  /// Largest j whose radius is representable below 1.
  int maxRepresentableShell() const { return static_cast<int>(std::floor(-std::log(DBL_EPSILON) / std::log(K))); }

  /// Smallest j >= 0 with |x| <= rho_j, tolerant to rounding of points placed on S_j.
  int annulusOf(double pointNorm) const {
    if (!(pointNorm >= 0.0 && pointNorm < 1.0)) throw DomainError("point is not inside the unit ball");
    const double g = 1.0 - pointNorm;
    const double s = -std::log(g) / std::log(K);
    const double tol = 1e-9 + 4.0 * DBL_EPSILON / (g * std::log(K));
    const double j = std::ceil(s - tol);
    return j < 0.0 ? 0 : static_cast<int>(j);
  }
};

inline double shellRadius(const ShellGeometry& shells, int j) { return shells.radius(j); }

}  // namespace champagne
