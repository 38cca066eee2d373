#pragma once

#include <algorithm>
#include <cmath>

#include "geometry.hpp"
#include "rng.hpp"

namespace champagne {

/// Unit vector uniformly distributed on the spherical cap of half-angle theta around the unit vector axis.
/// The polar angle is drawn from psi^{d-2} on [0, theta] and thinned by (sin psi / psi)^{d-2}.
inline void capDirection(const double* axis, double theta, int d, CounterRng& rng, double* out) {
  theta = std::min(theta, std::numbers::pi);
  double psi = 0.0;
  for (;;) {
    psi = theta * std::pow(rng.uniform(), 1.0 / (d - 1));
    const double ratio = psi > 0.0 ? std::sin(psi) / psi : 1.0;
    if (rng.uniform() < ipow(ratio, d - 2)) break;
  }
  std::array<double, kMaxDim> v{};
  double n2 = 0.0;
  do {
    rng.direction(d, v.data());
    const double p = dot(v.data(), axis, d);
    for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] -= p * axis[i];
    n2 = dot(v.data(), v.data(), d);
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  for (int i = 0; i < d; ++i) out[i] = c * axis[i] + s * v[static_cast<std::size_t>(i)] * inv;
}

/// Half-angle of the cap on a sphere of radius rho whose boundary lies at chord distance `chord` from its pole.
inline double capAngleForChord(double chord, double rho) {
  const double h = chord / (2.0 * rho);
  return h >= 1.0 ? std::numbers::pi : 2.0 * std::asin(h);
}

}  // namespace champagne
