#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "classify.hpp"
#include "criteria.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "spacing.hpp"

namespace champagne {

/// Kelvin-pair barrier for one obstacle B(lambda, r) in the unit ball:
/// u(x) = (r/|x - lambda|)^{d-2}, u*(x) = (r/(|x| |x* - lambda|))^{d-2}, x* = x/|x|^2.
struct SandwichBound {
  /// u - u*: harmonic, zero on the unit sphere, at most 1 on the obstacle.
  double lower = 0.0;
  /// 2 (u - u*), capped at 1.
  double upper = 0.0;
  /// sup of u* over the obstacle surface is <= 1/2, so `upper` dominates the harmonic measure.
  bool upperValid = false;
  double uStarMax = 0.0;
  /// u(x): hitting probability of the obstacle in all of R^d; always an upper bound.
  double freeSpace = 0.0;
};

/// |x| |x* - lambda| without forming x*: sqrt(1 - 2 x.lambda + |x|^2 |lambda|^2).
inline double kelvinDistance(const double* x, const double* lambda, int d) {
  const double xl = dot(x, lambda, d);
  const double v = 1.0 - 2.0 * xl + dot(x, x, d) * dot(lambda, lambda, d);
  return std::sqrt(std::max(0.0, v));
}

/// Closed-form sup of u* over the sphere |y - lambda| = r, attained on the ray through lambda.
inline double kelvinSupOnObstacle(double lambdaNorm, double r, int d) {
  return ipow(r / (1.0 - lambdaNorm * (lambdaNorm + r)), d - 2);
}

inline SandwichBound sandwich(std::span<const double> lambda, double r, std::span<const double> x, int d) {
  checkDimension(d);
  if (static_cast<int>(lambda.size()) != d || static_cast<int>(x.size()) != d) {
    throw DomainError("sandwich: point dimension mismatch");
  }
  if (!(r > 0.0)) throw DomainError("sandwich: radius must be positive");
  const double a = norm(lambda);
  if (!(a + r < 1.0)) throw DomainError("sandwich: obstacle is not inside the unit ball");
  const double xn = norm(x);
  if (xn > 1.0) throw DomainError("sandwich: x lies outside the closed unit ball");
  const double toCentre = distance(x.data(), lambda.data(), d);
  if (!(toCentre > r)) throw DomainError("sandwich: x lies inside the obstacle");

  SandwichBound out;
  const double u = ipow(r / toCentre, d - 2);
  out.freeSpace = u;
  out.uStarMax = kelvinSupOnObstacle(a, r, d);
  out.upperValid = out.uStarMax <= 0.5;
  if (xn == 1.0) {
    out.lower = 0.0;
  } else {
    const double uStar = ipow(r / kelvinDistance(x.data(), lambda.data(), d), d - 2);
    out.lower = std::max(0.0, u - uStar);
  }
  out.upper = std::min(1.0, 2.0 * out.lower);
  return out;
}

/// Harmonic measure of the inner sphere of {r < |x| < 1} at |x| = s.
inline double exactConcentric(double r, double s, int d) {
  checkDimension(d);
  if (!(0.0 < r && r < s && s <= 1.0)) throw DomainError("exactConcentric needs 0 < r < s <= 1");
  if (s == 1.0) return 0.0;
  return (std::pow(s, 2.0 - d) - 1.0) / (std::pow(r, 2.0 - d) - 1.0);
}

enum class BoundKind { UnionTail, ProductAvoidance };

inline std::string toString(BoundKind k) { return k == BoundKind::UnionTail ? "UnionTail" : "ProductAvoidance"; }

struct BoundTerm {
  int j = 0;
  /// Union: sum of sandwich upper bounds at the origin over obstacles in A_j.
  double explicitPart = 0.0;
  /// Union: count-times-barrier estimate for A_j beyond the generated range.
  double analyticPart = 0.0;
  /// Product: t_j.
  double factor = 0.0;
  std::size_t obstacles = 0;
  bool certified = true;
};

/// Depth from which the total union bound is guaranteed below 1 (threshold r and n_r).
struct GuaranteeDepth {
  double threshold = 0.0;
  std::optional<double> r;
  std::optional<int> nR;
  double tailIntegral = std::numeric_limits<double>::quiet_NaN();
};

struct BoundReport {
  BoundKind kind = BoundKind::UnionTail;
  std::vector<BoundTerm> perShellTerms;
  double value = 0.0;
  /// First j from which the per-shell conditions verifiably hold; -1 if none.
  int validFromJ = -1;
  bool certified = true;
  std::vector<std::string> notes;

  // UnionTail
  int fromDepth = 0;
  double explicitTotal = 0.0;
  double analyticTotal = 0.0;
  int analyticFrom = 0;
  std::optional<Verdict> analyticVerdict;
  std::optional<GuaranteeDepth> guarantee;

  // ProductAvoidance
  std::string parity;
  int annulusStride = 1;
  double boundK = 0.0;
  double densityR = std::numeric_limits<double>::quiet_NaN();
  int lastAnnulus = 0;
};

namespace detail {

/// log of the analytic term for A_j: (2^d d K^2/eps^d) K^{(d-1)j} 4K(d-2) (phi_{j-1}/rho_{j-1})^{d-2} K^{-j}.
inline double logAnalyticUnionTerm(const RadiusProfile& profile, int d, double K, double eps, int j) {
  const double logK = std::log(K);
  const double gPrev = std::pow(K, -static_cast<double>(j - 1));
  const double logRhoPrev = std::log1p(-gPrev);
  return d * std::log(2.0) + std::log(static_cast<double>(d)) + 2.0 * logK - d * std::log(eps) +
         (d - 1) * j * logK + std::log(4.0 * K * (d - 2)) + (d - 2) * (profile.logAtGap(gPrev) - logRhoPrev) - j * logK;
}

/// Per-shell barrier check for the analytic part: 1 - (K phi_{j-1}/((K-1)K^{-j}))^{d-2} >= 1/2.
inline bool analyticBarrierHolds(const RadiusProfile& profile, int d, double K, int j) {
  const double gPrev = std::pow(K, -static_cast<double>(j - 1));
  // K phi_{j-1} / ((K-1) K^{-j}) = K^2/(K-1) * phi_{j-1}/K^{-(j-1)} / K
  const double ratio = K / (K - 1.0) * profile.ratioAtGap(gPrev);
  return ipow(ratio, d - 2) <= 0.5;
}

}  // namespace detail

/// Tail integrals of phi^{d-2}/(1-t)^{d-1} from rho_m to 1 for m = 0..shells-1, from shell
/// increments plus a remainder fitted to the classified tail. Empty when the increments do not converge.
inline std::vector<double> tailIntegrals(const RadiusProfile& profile, int d, double K, int shells = 256) {
  if (profile.upperLimit() < 1.0) return {};
  const double logK = std::log(K);
  std::vector<double> inc;
  std::vector<double> logs;
  for (int j = 1; j <= shells; ++j) {
    if (std::pow(K, -static_cast<double>(j)) < DBL_MIN) break;
    const double v = detail::integrateInS(profile, d, (j - 1) * logK, j * logK);
    inc.push_back(v);
    logs.push_back(v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity());
  }
  if (logs.size() < 8) return {};
  const auto c = classifyLogTail(logs, 1);
  if (c.verdict != Verdict::Converges) return {};
  double rem = 0.0;
  const double last = inc.back();
  if (c.rule == TailRule::Geometric) {
    const double q = std::exp(c.tailExponent);
    rem = last * q / (1.0 - q);
  } else if (c.rule == TailRule::PowerFit) {
    rem = last * static_cast<double>(inc.size()) / (c.tailExponent - 1.0);
  }
  std::vector<double> tails(inc.size());
  double acc = rem;
  for (std::size_t k = inc.size(); k-- > 0;) {
    acc += inc[k];
    tails[k] = acc;  // from rho_k
  }
  return tails;
}

/// Smallest shell m whose tail integral is below eps^d (K-1)^{d-2} / (2^{d+1} d (d-2) K^{2d-1});
/// then r = rho_m and n_r = m.
inline GuaranteeDepth guaranteeDepth(const RadiusProfile& profile, int d, double K, double eps) {
  GuaranteeDepth out;
  out.threshold = std::pow(eps, d) * std::pow(K - 1.0, d - 2) /
                  (std::pow(2.0, d + 1) * d * (d - 2) * std::pow(K, 2 * d - 1));
  const auto tails = tailIntegrals(profile, d, K);
  for (std::size_t m = 0; m < tails.size(); ++m) {
    if (tails[m] < out.threshold) {
      out.tailIntegral = tails[m];
      out.r = -std::expm1(-static_cast<double>(m) * std::log(K));
      out.nR = static_cast<int>(m);
      return out;
    }
  }
  return out;
}

/// Upper bound on the probability that Brownian motion from the origin hits any obstacle in
/// annuli >= fromDepth: explicit sandwich bounds for generated obstacles, plus the counting
/// estimate for shells beyond the generated range when a profile and epsilon are known.
inline BoundReport unionTailBound(const ObstacleField& field, int fromDepth, int analyticWindow = 4096) {
  BoundReport report;
  report.kind = BoundKind::UnionTail;
  report.fromDepth = fromDepth;
  const int d = field.dimension();
  const auto& sh = field.shells();
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);

  const int top = std::max(field.maxAnnulus(), sh.jMax);
  std::vector<BoundTerm> terms;
  for (int j = std::max(fromDepth, 0); j <= top; ++j) terms.push_back(BoundTerm{j});
  const int base = std::max(fromDepth, 0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const int a = field.annulus(i);
    if (a < fromDepth) continue;
    const double* c = field.center(i);
    const auto sb = sandwich(std::span<const double>(c, static_cast<std::size_t>(d)), field.radius(i), origin, d);
    BoundTerm& t = terms[static_cast<std::size_t>(a - base)];
    ++t.obstacles;
    if (sb.upperValid) {
      t.explicitPart += sb.upper;
    } else {
      t.certified = false;
      t.explicitPart += sb.freeSpace;
    }
  }
  double explicitTotal = 0.0;
  for (const auto& t : terms) explicitTotal += t.explicitPart;
  report.explicitTotal = explicitTotal;

  // validFromJ: first j after which every shell's obstacles satisfy the barrier condition.
  report.validFromJ = base;
  for (const auto& t : terms) {
    if (!t.certified) report.validFromJ = t.j + 1;
  }
  bool anyUncertified = std::any_of(terms.begin(), terms.end(), [](const auto& t) { return !t.certified; });
  if (anyUncertified) {
    report.notes.push_back("some obstacles fail the barrier condition; their free-space hitting probability is used");
  }

  double analytic = 0.0;
  const int j0 = std::max({sh.jMax + 1, fromDepth, 2});
  report.analyticFrom = j0;
  const auto& profile = field.profile();
  const double eps = field.info().epsilon;
  if (profile && eps > 0.0 && profile->upperLimit() >= 1.0) {
    std::vector<double> logs;
    for (int j = j0; j < j0 + analyticWindow; ++j) {
      if (std::pow(sh.K, -static_cast<double>(j - 1)) < DBL_MIN) break;
      logs.push_back(detail::logAnalyticUnionTerm(*profile, d, sh.K, eps, j));
    }
    if (logs.size() < 8) {
      analytic = std::numeric_limits<double>::infinity();
      report.analyticVerdict = Verdict::Inconclusive;
      report.notes.push_back("analytic extension has too few representable shells");
    } else {
      const auto c = classifyLogTail(logs, j0);
      report.analyticVerdict = c.verdict;
      if (c.verdict != Verdict::Converges) {
        analytic = std::numeric_limits<double>::infinity();
        report.notes.push_back("analytic extension is not summable (" + toString(c.verdict) + ")");
      } else {
        for (std::size_t k = 0; k < logs.size(); ++k) {
          const int j = j0 + static_cast<int>(k);
          BoundTerm t{j};
          t.analyticPart = std::exp(logs[k]);
          t.certified = detail::analyticBarrierHolds(*profile, d, sh.K, j);
          if (!t.certified) report.validFromJ = std::max(report.validFromJ, j + 1);
          analytic += t.analyticPart;
          if (k < 64) terms.push_back(t);
        }
        const double last = std::exp(logs.back());
        if (c.rule == TailRule::Geometric) {
          const double q = std::exp(c.tailExponent);
          analytic += last * q / (1.0 - q);
        } else if (c.rule == TailRule::PowerFit) {
          analytic += last * (j0 + static_cast<double>(logs.size())) / (c.tailExponent - 1.0);
        }
      }
    }
    if (std::isfinite(analytic) && report.validFromJ > j0) {
      report.notes.push_back("barrier condition fails for some analytic shells before j = " + std::to_string(report.validFromJ));
      anyUncertified = true;
    }
    report.guarantee = guaranteeDepth(*profile, d, sh.K, eps);
  } else if (!field.empty() || profile) {
    report.notes.push_back("no analytic extension: profile or epsilon unavailable; bound covers generated obstacles only");
  }
  report.analyticTotal = analytic;
  report.value = explicitTotal + analytic;
  report.certified = !anyUncertified;
  report.perShellTerms = std::move(terms);
  return report;
}

enum class Parity { Even, Odd };

inline std::string toString(Parity p) { return p == Parity::Even ? "even" : "odd"; }

inline bool matchesParity(int j, Parity p) { return (j % 2 == 0) == (p == Parity::Even); }

struct ProductOptions {
  Parity parity = Parity::Even;
  /// Field shells per bound annulus; 0 picks the smallest stride m with K^m > max{4, (1+R)/(1-R)}.
  int annulusStride = 0;
  /// Probe count used when the field carries no density constant.
  std::size_t probeCount = 4096;
};

/// Smallest stride m with K^m > max{4, (1+R)/(1-R)}.
inline int productStride(double K, double R) {
  if (!(R < 1.0)) throw ConfigurationError("density constant R must be < 1 for the product bound");
  const double need = std::max(4.0, (1.0 + R) / (1.0 - R));
  int m = 1;
  while (!(std::pow(K, m) > need)) ++m;
  return m;
}

/// Bound annulus containing field annulus a under stride m.
inline int boundAnnulus(int a, int m) { return a <= 0 ? 0 : (a + m - 1) / m; }

/// Field restricted to the obstacles whose bound annulus has the given parity.
inline ObstacleField parityThinned(const ObstacleField& field, Parity parity, int stride = 1) {
  return field.subset([&](std::size_t i) { return matchesParity(boundAnnulus(field.annulus(i), stride), parity); });
}

/// Upper bound on the avoidance probability of the parity-thinned field: prod (1 - t_j) over
/// bound annuli j of that parity from validFromJ on, with
/// t_j = [1 - (rho_{j+1}/(D rho_{j-1}))^{d-2}] (phi_j / ((K-1) K^{-j}))^{d-2}, D = K/(K-1),
/// evaluated on bound annuli of ratio K_b = K^m so that K_b > max{4, (1+R)/(1-R)}.
/// phi_j is the smallest radius present in bound annulus j.
inline BoundReport productAvoidanceBound(const ObstacleField& field, const ProductOptions& options = {}) {
  BoundReport report;
  report.kind = BoundKind::ProductAvoidance;
  report.parity = toString(options.parity);
  const int d = field.dimension();
  const auto& sh = field.shells();
  if (field.empty()) {
    report.value = 1.0;
    report.notes.push_back("empty field; bound is vacuous");
    return report;
  }
  double R = field.info().densityR;
  if (std::isnan(R)) {
    R = validateSpacing(field, options.probeCount, field.info().seed.value_or(0)).densityREmpirical;
    report.notes.push_back("density constant measured on the fly");
  }
  report.densityR = R;
  if (!(R < 1.0)) throw ConfigurationError("density constant R = " + std::to_string(R) + " >= 1: need K > max{4, (1+R)/(1-R)}");
  const double need = std::max(4.0, (1.0 + R) / (1.0 - R));
  int m = options.annulusStride;
  if (m == 0) {
    m = productStride(sh.K, R);
    if (m > 1) report.notes.push_back("annuli coarsened by stride " + std::to_string(m) + " to satisfy K > max{4, (1+R)/(1-R)}");
  } else if (m < 0 || !(std::pow(sh.K, m) > need)) {
    throw ConfigurationError("K^m = " + std::to_string(std::pow(sh.K, m)) + " must exceed max{4, (1+R)/(1-R)} = " +
                             std::to_string(need));
  }
  report.annulusStride = m;
  const double Kb = std::pow(sh.K, m);
  report.boundK = Kb;
  const double D = Kb / (Kb - 1.0);

  // Bound annuli fully inside the generated shell range.
  const int first = std::max(2, (sh.jMin - 1 + m - 1) / m + 1);
  const int last = sh.jMax / m;
  report.lastAnnulus = last;

  std::vector<double> minRadius(static_cast<std::size_t>(std::max(last, 0)) + 2, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const int jb = boundAnnulus(field.annulus(i), m);
    if (jb >= 0 && jb <= last) {
      auto& slot = minRadius[static_cast<std::size_t>(jb)];
      slot = std::min(slot, field.radius(i));
    }
  }

  report.validFromJ = -1;
  double logValue = 0.0;
  for (int j = 2; j <= last; ++j) {
    const double rhoNext = 1.0 - std::pow(Kb, -static_cast<double>(j + 1));
    const double rhoPrev = 1.0 - std::pow(Kb, -static_cast<double>(j - 1));
    if (report.validFromJ < 0 && rhoNext / rhoPrev < 0.5 * (1.0 + D)) report.validFromJ = j;
    if (j < first || !matchesParity(j, options.parity)) continue;
    BoundTerm t{j};
    const double phi = minRadius[static_cast<std::size_t>(j)];
    t.certified = report.validFromJ >= 0;
    if (std::isfinite(phi)) {
      const double geometric = 1.0 - ipow(rhoNext / (D * rhoPrev), d - 2);
      const double scale = ipow(phi / ((Kb - 1.0) * std::pow(Kb, -static_cast<double>(j))), d - 2);
      t.factor = std::clamp(geometric * scale, 0.0, std::nextafter(1.0, 0.0));
    }
    if (t.certified) logValue += std::log1p(-t.factor);
    report.perShellTerms.push_back(t);
  }
  report.value = std::exp(logValue);
  if (report.perShellTerms.empty()) report.notes.push_back("no complete bound annulus of this parity; bound is vacuous");
  return report;
}

}  // namespace champagne
