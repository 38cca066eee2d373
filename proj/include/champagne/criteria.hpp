#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "classify.hpp"
#include "geometry.hpp"
#include "profile.hpp"
#include "shells.hpp"

namespace champagne {

enum class CriterionMethod { Integral, ShellSeries, Wiener };

inline std::string toString(CriterionMethod m) {
  switch (m) {
    case CriterionMethod::Integral:
      return "Integral";
    case CriterionMethod::ShellSeries:
      return "ShellSeries";
    default:
      return "Wiener";
  }
}

struct SeriesTerm {
  int j = 0;
  double value = 0.0;
  /// log(value); finite even when value itself over- or underflows.
  double logValue = 0.0;
};

struct CriterionReport {
  CriterionMethod method = CriterionMethod::ShellSeries;
  int dimension = 3;
  ShellGeometry shells;
  std::vector<SeriesTerm> terms;
  std::vector<double> partialSums;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> tailExponent;
  TailRule rule = TailRule::PowerFit;
  /// Set when the requested range was cut short (K^-j underflow or table range).
  bool truncated = false;
  int lastEvaluatedJ = 0;
  std::string note;
};

namespace detail {

/// Largest j <= jMax whose gap is usable with this profile; jMin - 1 if none.
inline int lastUsableShell(const RadiusProfile& profile, const ShellGeometry& shells) {
  int last = shells.jMin - 1;
  const double upper = profile.upperLimit();
  for (int j = shells.jMin; j <= shells.jMax; ++j) {
    const double g = std::pow(shells.K, -static_cast<double>(j));
    if (!(g >= DBL_MIN)) break;
    if (upper < 1.0 && !(1.0 - g <= upper)) break;
    last = j;
  }
  return last;
}

inline void finishReport(CriterionReport& report, double margin) {
  double sum = 0.0;
  std::vector<double> logs;
  for (const auto& t : report.terms) {
    sum += t.value;
    report.partialSums.push_back(sum);
    logs.push_back(t.logValue);
  }
  if (logs.size() < 8) {
    report.verdict = Verdict::Inconclusive;
    report.note = "fewer than 8 terms; not classified";
    return;
  }
  const auto c = classifyLogTail(logs, report.terms.front().j, margin);
  report.verdict = c.verdict;
  report.rule = c.rule;
  if (!std::isnan(c.tailExponent)) report.tailExponent = c.tailExponent;
}

/// (phi(t)/(1-t))^{d-2} at t = 1 - e^{-s}: the integrand after substitution.
inline double substitutedIntegrand(const RadiusProfile& profile, int d, double s) {
  return ipow(profile.ratioAtGap(std::exp(-s)), d - 2);
}

inline double integrateInS(const RadiusProfile& profile, int d, double s0, double s1) {
  if (!(s1 > s0)) return 0.0;
  std::vector<double> cuts{s0};
  for (double t : profile.breakpoints()) {
    const double s = -std::log1p(-t);
    if (s > s0 && s < s1) cuts.push_back(s);
  }
  cuts.push_back(s1);
  double total = 0.0;
  auto f = [&](double s) { return substitutedIntegrand(profile, d, s); };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    // Unit-length pieces keep exponential integrands well resolved.
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil(b - a)));
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + (b - a) * p / pieces;
      const double hi = (p + 1 == pieces) ? b : a + (b - a) * (p + 1) / pieces;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-12);
    }
  }
  return total;
}

}  // namespace detail

/// Integral of phi(t)^{d-2} / (1-t)^{d-1} over [a, b], computed in s = -log(1-t).
inline double integralPartial(const RadiusProfile& profile, int d, double a, double b) {
  checkDimension(d);
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("lower limit must lie in [0,1)");
  if (!(b < 1.0)) throw DomainError("upper limit must be < 1; the improper endpoint is handled by the classifier");
  if (b < a) throw DomainError("integration limits out of order");
  if (b > profile.upperLimit()) throw DomainError("upper limit beyond the profile's table range");
  if (a == b) return 0.0;
  return detail::integrateInS(profile, d, -std::log1p(-a), -std::log1p(-b));
}

/// Terms (phi(rho_j) K^j)^{d-2}, j in [jMin, jMax], with partial sums and a tail verdict.
inline CriterionReport shellSeries(const RadiusProfile& profile, int d, const ShellGeometry& shells,
                                   double margin = 0.1) {
  checkDimension(d);
  ShellGeometry::make(shells.K, shells.jMin, shells.jMax);
  CriterionReport report;
  report.method = CriterionMethod::ShellSeries;
  report.dimension = d;
  report.shells = shells;
  const int last = detail::lastUsableShell(profile, shells);
  report.truncated = last < shells.jMax;
  report.lastEvaluatedJ = last;
  const double logK = std::log(shells.K);
  for (int j = shells.jMin; j <= last; ++j) {
    const double g = std::pow(shells.K, -static_cast<double>(j));
    const double value = ipow(profile.ratioAtGap(g), d - 2);
    // log via the profile so the classifier never sees an overflowed term
    const double logValue = (d - 2) * (profile.logAtGap(g) + j * logK);
    report.terms.push_back({j, value, logValue});
  }
  detail::finishReport(report, margin);
  if (report.truncated) report.note += (report.note.empty() ? "" : "; ") + std::string("range truncated at j = ") + std::to_string(last);
  return report;
}

/// Integral increments over [rho_{j-1}, rho_j], j in [jMin, jMax]. Partial sums equal
/// integralPartial(profile, d, rho_{jMin-1}, rho_j).
inline CriterionReport integralSeries(const RadiusProfile& profile, int d, const ShellGeometry& shells,
                                      double margin = 0.1) {
  checkDimension(d);
  ShellGeometry::make(shells.K, shells.jMin, shells.jMax);
  CriterionReport report;
  report.method = CriterionMethod::Integral;
  report.dimension = d;
  report.shells = shells;
  const int last = detail::lastUsableShell(profile, shells);
  report.truncated = last < shells.jMax;
  report.lastEvaluatedJ = last;
  const double logK = std::log(shells.K);
  for (int j = std::max(shells.jMin, 1); j <= last; ++j) {
    const double value = detail::integrateInS(profile, d, (j - 1) * logK, j * logK);
    report.terms.push_back({j, value, value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity()});
  }
  detail::finishReport(report, margin);
  if (report.truncated) report.note += (report.note.empty() ? "" : "; ") + std::string("range truncated at j = ") + std::to_string(last);
  return report;
}

}  // namespace champagne
