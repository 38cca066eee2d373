#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace champagne {

enum class Verdict { Converges, Diverges, Inconclusive };

inline std::string toString(Verdict v) {
  switch (v) {
    case Verdict::Converges:
      return "Converges";
    case Verdict::Diverges:
      return "Diverges";
    default:
      return "Inconclusive";
  }
}

/// Which rule fired.
enum class TailRule { AllZero, NonVanishing, Geometric, PowerFit, VanishingTail };

inline std::string toString(TailRule r) {
  switch (r) {
    case TailRule::AllZero:
      return "all-zero";
    case TailRule::NonVanishing:
      return "non-vanishing";
    case TailRule::Geometric:
      return "geometric";
    case TailRule::VanishingTail:
      return "vanishing-tail";
    default:
      return "power-fit";
  }
}

struct TailClassification {
  Verdict verdict = Verdict::Inconclusive;
  /// Slope of log term against index for the geometric rule, exponent p for the power rule,
  /// -inf when every term is zero, NaN for the non-vanishing rule.
  double tailExponent = std::numeric_limits<double>::quiet_NaN();
  TailRule rule = TailRule::PowerFit;
};

namespace detail {

/// Least-squares slope of y against x.
inline double fitSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace detail

/// Classifies a series from the logarithms of its terms (-inf for zero terms).
/// Index of logTerms[i] is firstIndex + i.
inline TailClassification classifyLogTail(std::span<const double> logTerms, int firstIndex = 1, double margin = 0.1) {
  const std::size_t n = logTerms.size();
  if (n < 8) throw DomainError("tail classification needs at least 8 terms, got " + std::to_string(n));
  if (firstIndex < 1) throw DomainError("series index must start at 1 or later");
  for (double l : logTerms) {
    if (std::isnan(l)) throw DomainError("series term is NaN");
  }

  const double top = *std::max_element(logTerms.begin(), logTerms.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    return {Verdict::Converges, -std::numeric_limits<double>::infinity(), TailRule::AllZero};
  }
  if (top == std::numeric_limits<double>::infinity()) {
    return {Verdict::Diverges, std::numeric_limits<double>::quiet_NaN(), TailRule::NonVanishing};
  }

  // (i) terms that do not vanish
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  double firstMax = 0.0;
  for (std::size_t i = 0; i < q; ++i) firstMax = std::max(firstMax, std::exp(logTerms[i] - top));
  double lastMean = 0.0;
  for (std::size_t i = n - q; i < n; ++i) lastMean += std::exp(logTerms[i] - top);
  lastMean /= static_cast<double>(q);
  if (lastMean >= 0.5 * firstMax) {
    return {Verdict::Diverges, std::numeric_limits<double>::quiet_NaN(), TailRule::NonVanishing};
  }

  // Fits use the last half of the window; zero terms are dropped.
  std::vector<double> js;
  std::vector<double> logJs;
  std::vector<double> ys;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (!std::isfinite(logTerms[i])) continue;
    const double j = static_cast<double>(firstIndex) + static_cast<double>(i);
    js.push_back(j);
    logJs.push_back(std::log(j));
    ys.push_back(logTerms[i]);
  }
  if (js.size() < 3) return {Verdict::Converges, -std::numeric_limits<double>::infinity(), TailRule::VanishingTail};

  // (ii) geometric decay
  const double slope = detail::fitSlope(js, ys);
  if (slope < -margin) return {Verdict::Converges, slope, TailRule::Geometric};

  // (iii) power law j^{-p}
  const double p = -detail::fitSlope(logJs, ys);
  if (p > 1.0 + margin) return {Verdict::Converges, p, TailRule::PowerFit};
  if (p < 1.0 - margin) return {Verdict::Diverges, p, TailRule::PowerFit};
  return {Verdict::Inconclusive, p, TailRule::PowerFit};
}

/// Classifies a series of non-negative terms: (i) non-vanishing terms diverge, (ii) geometric
/// decay converges, (iii) a fitted power j^{-p} converges for p > 1 + margin and diverges for
/// p < 1 - margin. Anything else is Inconclusive.
inline TailClassification classifyTail(std::span<const double> terms, int firstIndex = 1, double margin = 0.1) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (double t : terms) {
    if (t < 0.0 || std::isnan(t)) throw DomainError("series terms must be non-negative");
    logs.push_back(t == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(t));
  }
  return classifyLogTail(logs, firstIndex, margin);
}

/// Combines verdicts of the same series, ignoring Inconclusive. True when no two definite verdicts differ.
inline bool mutuallyConsistent(std::initializer_list<Verdict> verdicts) {
  bool sawConv = false;
  bool sawDiv = false;
  for (Verdict v : verdicts) {
    sawConv = sawConv || v == Verdict::Converges;
    sawDiv = sawDiv || v == Verdict::Diverges;
  }
  return !(sawConv && sawDiv);
}

}  // namespace champagne
