#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace champagne {

/// Largest supported ambient dimension. Points are stored in fixed arrays of this size.
inline constexpr int kMaxDim = 8;

using Coords = std::array<double, kMaxDim>;

inline void checkDimension(int d) {
  if (d < 3 || d > kMaxDim) {
    throw DomainError("dimension must be in [3, " + std::to_string(kMaxDim) + "], got " + std::to_string(d));
  }
}

inline double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const double* a, int d) { return std::sqrt(dot(a, a, d)); }

inline double distanceSquared(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double distance(const double* a, const double* b, int d) { return std::sqrt(distanceSquared(a, b, d)); }

inline double norm(std::span<const double> a) { return norm(a.data(), static_cast<int>(a.size())); }

/// x^n by repeated multiplication, so scaling x by a power of two scales the result exactly.
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

/// Volume of the unit ball in R^d.
inline double unitBallVolume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double unitSphereArea(int d) { return d * unitBallVolume(d); }

/// Squared distance from x to the axis-aligned box [lo, hi].
inline double boxDistanceSquared(const double* x, const double* lo, const double* hi, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = 0.0;
    if (x[i] < lo[i]) {
      t = lo[i] - x[i];
    } else if (x[i] > hi[i]) {
      t = x[i] - hi[i];
    }
    s += t * t;
  }
  return s;
}

/// Squared distance from x to the farthest point of the box [lo, hi].
inline double boxFarthestSquared(const double* x, const double* lo, const double* hi, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double t = std::max(std::abs(x[i] - lo[i]), std::abs(hi[i] - x[i]));
    s += t * t;
  }
  return s;
}

namespace detail {

inline constexpr std::array<unsigned, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

inline double radicalInverse(unsigned base, std::size_t index) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace detail

/// Halton point `index` in [0,1)^dims, optionally shifted (Cranley-Patterson rotation).
inline void haltonPoint(std::size_t index, int dims, double* out, const double* shift = nullptr) {
  for (int k = 0; k < dims; ++k) {
    double v = detail::radicalInverse(detail::kPrimes[static_cast<std::size_t>(k)], index);
    if (shift != nullptr) {
      v += shift[k];
      v -= std::floor(v);
    }
    out[k] = v;
  }
}

/// Maps uniforms in [0,1)^{2*ceil(d/2)} to a unit vector in R^d through Box-Muller.
inline void uniformsToDirection(const double* u, int d, double* out) {
  double n2 = 0.0;
  for (int i = 0; i < d; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - u[i]));
    const double a = 2.0 * std::numbers::pi * u[i + 1];
    out[i] = r * std::cos(a);
    if (i + 1 < d) out[i + 1] = r * std::sin(a);
  }
  for (int i = 0; i < d; ++i) n2 += out[i] * out[i];
  if (n2 == 0.0) {
    out[0] = 1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (int i = 0; i < d; ++i) out[i] *= inv;
}

/// n deterministic, roughly uniform points on S^{d-1}, flattened row-major (n x d).
/// d = 3 uses a Fibonacci lattice; other dimensions use Halton points pushed through Box-Muller.
inline std::vector<double> quasiUniformSphere(int d, std::size_t n) {
  std::vector<double> pts(n * static_cast<std::size_t>(d));
  if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * static_cast<double>(i);
      pts[3 * i] = rho * std::cos(a);
      pts[3 * i + 1] = rho * std::sin(a);
      pts[3 * i + 2] = z;
    }
    return pts;
  }
  std::array<double, kMaxDim + 1> u{};
  const int dims = d + (d % 2);
  for (std::size_t i = 0; i < n; ++i) {
    haltonPoint(i + 1, dims, u.data());
    uniformsToDirection(u.data(), d, &pts[i * static_cast<std::size_t>(d)]);
  }
  return pts;
}

}  // namespace champagne
