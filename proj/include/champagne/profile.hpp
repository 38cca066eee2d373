#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace champagne {

/// phi(t) = c (1 - t)^alpha
struct PowerLaw {
  double c;
  double alpha;
};

/// phi(t) = c (1 - t) / log(e / (1 - t))^beta
struct PowerLog {
  double c;
  double beta;
};

/// Knots (t_i, phi_i) with left-constant steps: phi(t) = phi_i for t_i <= t < t_{i+1}.
struct StepTable {
  std::vector<std::pair<double, double>> knots;
};

/// Radius profile phi: [0,1) -> (0,1), non-increasing. Obstacle radii are r = phi(|centre|).
///
/// Every evaluation is also available in terms of the gap g = 1 - t, which the criteria use near
/// the boundary where 1 - t is not representable from t.
class RadiusProfile {
 public:
  using Kind = std::variant<PowerLaw, PowerLog, StepTable>;

  explicit RadiusProfile(Kind kind) : kind_(std::move(kind)) { validate(); }

  static RadiusProfile powerLaw(double c, double alpha) { return RadiusProfile(PowerLaw{c, alpha}); }
  static RadiusProfile powerLog(double c, double beta) { return RadiusProfile(PowerLog{c, beta}); }
  static RadiusProfile table(std::vector<std::pair<double, double>> knots) {
    return RadiusProfile(StepTable{std::move(knots)});
  }

  const Kind& kind() const { return kind_; }

  /// phi(t); t must lie in [0, 1) (and within the knot range for tables).
  double operator()(double t) const {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("profile evaluated outside [0,1): t = " + std::to_string(t));
    if (const auto* tab = std::get_if<StepTable>(&kind_)) return tableValue(*tab, t);
    return atGap(1.0 - t);
  }

  /// phi(1 - g) for g in (0, 1].
  double atGap(double g) const {
    checkGap(g);
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PowerLaw>) {
            return k.c * std::pow(g, k.alpha);
          } else if constexpr (std::is_same_v<T, PowerLog>) {
            return k.c * g / std::pow(1.0 - std::log(g), k.beta);
          } else {
            return tableValue(k, 1.0 - g);
          }
        },
        kind_);
  }

  /// phi(1 - g) / g, evaluated without forming phi when it would underflow.
  double ratioAtGap(double g) const {
    checkGap(g);
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PowerLaw>) {
            return k.c * std::pow(g, k.alpha - 1.0);
          } else if constexpr (std::is_same_v<T, PowerLog>) {
            return k.c / std::pow(1.0 - std::log(g), k.beta);
          } else {
            return tableValue(k, 1.0 - g) / g;
          }
        },
        kind_);
  }

  /// log phi(1 - g); finite even where phi itself underflows.
  double logAtGap(double g) const {
    checkGap(g);
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PowerLaw>) {
            return std::log(k.c) + k.alpha * std::log(g);
          } else if constexpr (std::is_same_v<T, PowerLog>) {
            return std::log(k.c) + std::log(g) - k.beta * std::log(1.0 - std::log(g));
          } else {
            return std::log(tableValue(k, 1.0 - g));
          }
        },
        kind_);
  }

  /// Knot abscissae for tables (integration breakpoints); empty otherwise.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (const auto* tab = std::get_if<StepTable>(&kind_)) {
      for (const auto& [t, v] : tab->knots) out.push_back(t);
    }
    return out;
  }

  /// Largest t the profile accepts (tables stop at their last knot).
  double upperLimit() const {
    if (const auto* tab = std::get_if<StepTable>(&kind_)) return tab->knots.back().first;
    return 1.0;
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PowerLaw>) return "PowerLaw";
          if constexpr (std::is_same_v<T, PowerLog>) return "PowerLog";
          return "Table";
        },
        kind_);
  }

 private:
  void validate() const {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PowerLaw>) {
            if (!(k.c > 0.0) || !(k.alpha > 0.0)) throw SchemaError("PowerLaw needs c > 0 and alpha > 0");
          } else if constexpr (std::is_same_v<T, PowerLog>) {
            if (!(k.c > 0.0) || !(k.beta > 0.0)) throw SchemaError("PowerLog needs c > 0 and beta > 0");
          } else {
            if (k.knots.empty()) throw SchemaError("table profile has no knots");
            for (std::size_t i = 0; i < k.knots.size(); ++i) {
              const auto [t, v] = k.knots[i];
              if (!(t >= 0.0 && t < 1.0)) throw SchemaError("table knot outside [0,1)");
              if (!(v > 0.0)) throw SchemaError("table value must be positive");
              if (i > 0 && !(t > k.knots[i - 1].first)) throw SchemaError("table knots are not strictly increasing");
              if (i > 0 && v > k.knots[i - 1].second) throw SchemaError("table values increase; profile must be non-increasing");
            }
          }
        },
        kind_);
  }

  static void checkGap(double g) {
    if (!(g > 0.0 && g <= 1.0)) throw DomainError("profile gap outside (0,1]: g = " + std::to_string(g));
  }

  static double tableValue(const StepTable& tab, double t) {
    const auto& knots = tab.knots;
    if (t < knots.front().first || t > knots.back().first) {
      throw DomainError("t = " + std::to_string(t) + " outside table range [" + std::to_string(knots.front().first) +
                        ", " + std::to_string(knots.back().first) + "]");
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double value, const auto& knot) { return value < knot.first; });
    return std::prev(it)->second;
  }

  Kind kind_;
};

/// Free-function spelling of phi(t).
inline double profileEval(const RadiusProfile& profile, double t) { return profile(t); }

}  // namespace champagne
