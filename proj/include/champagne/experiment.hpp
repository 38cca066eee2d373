#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bounds.hpp"
#include "criteria.hpp"
#include "field_io.hpp"
#include "generate.hpp"
#include "report_json.hpp"
#include "whitney.hpp"
#include "wos.hpp"

namespace champagne {

inline constexpr int kExperimentSpecVersion = 1;

/// Battery description. See README for the JSON schema.
struct ExperimentSpec {
  std::string name;
  int dimension = 3;
  ShellGeometry shells;
  /// Absent for an obstacle-free battery.
  std::optional<RadiusProfile> profile;
  double sep = 1.0;
  std::vector<std::uint64_t> seeds{1};
  std::vector<int> depths;
  std::uint64_t trials = 10000;
  double eta = 1e-6;
  /// Shell range for the criteria (K defaults to 5).
  double criteriaK = 5.0;
  int criteriaJMax = 40;
  /// Wiener field: windowed around taus, own K/sep/jMax.
  std::vector<std::vector<double>> taus;
  double wienerK = 4.0;
  double wienerSep = 1.0;
  int wienerJMax = 7;
  int maxLevel = 13;
  double coneFactor = 8.0;
  std::string outputDir = "out";
};

namespace detail {

using SpecJson = nlohmann::json;

inline std::vector<double> numberList(const SpecJson& v, const std::string& at) {
  if (!v.is_array()) throw SchemaError("expected an array of numbers", at);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError("expected a number", at + "/" + std::to_string(i));
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline const SpecJson* optionalKey(const SpecJson& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

}  // namespace detail

inline ExperimentSpec experimentSpecFromJson(const nlohmann::json& j) {
  using detail::integer;
  using detail::number;
  using detail::optionalKey;
  using detail::require;
  if (!j.is_object()) throw SchemaError("experiment spec must be an object", "");
  const auto version = integer(require(j, "specVersion", ""), "/specVersion");
  if (version != kExperimentSpecVersion) throw SchemaError("unsupported specVersion " + std::to_string(version), "/specVersion");

  ExperimentSpec s;
  const auto& name = require(j, "name", "");
  if (!name.is_string() || name.get<std::string>().empty()) throw SchemaError("expected a non-empty string", "/name");
  s.name = name.get<std::string>();
  s.dimension = static_cast<int>(integer(require(j, "dimension", ""), "/dimension"));
  if (s.dimension < 3 || s.dimension > kMaxDim) throw SchemaError("dimension out of range [3, 8]", "/dimension");

  const auto& sh = require(j, "shells", "");
  try {
    s.shells = ShellGeometry::make(number(require(sh, "K", "/shells"), "/shells/K"),
                                   static_cast<int>(integer(require(sh, "jMin", "/shells"), "/shells/jMin")),
                                   static_cast<int>(integer(require(sh, "jMax", "/shells"), "/shells/jMax")));
  } catch (const DomainError& e) {
    throw SchemaError(e.what(), "/shells");
  }
  const auto& prof = require(j, "profile", "");
  if (!prof.is_null()) s.profile = profileFromJson(prof, "/profile");
  if (auto* v = optionalKey(j, "sep")) {
    s.sep = number(*v, "/sep");
    if (!(s.sep > 0.0)) throw SchemaError("sep must be positive", "/sep");
  }
  const auto& seeds = require(j, "seeds", "");
  if (!seeds.is_array() || seeds.empty()) throw SchemaError("expected a non-empty array of seeds", "/seeds");
  s.seeds.clear();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!seeds[i].is_number_unsigned()) throw SchemaError("expected a non-negative integer", "/seeds/" + std::to_string(i));
    s.seeds.push_back(seeds[i].get<std::uint64_t>());
  }
  const auto& depths = require(j, "depths", "");
  if (!depths.is_array() || depths.empty()) throw SchemaError("expected a non-empty array of depths", "/depths");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const auto v = integer(depths[i], "/depths/" + std::to_string(i));
    if (v < 0 || (i > 0 && v <= s.depths.back())) throw SchemaError("depths must be increasing and >= 0", "/depths/" + std::to_string(i));
    s.depths.push_back(static_cast<int>(v));
  }
  const auto trials = integer(require(j, "trials", ""), "/trials");
  if (trials < 1) throw SchemaError("trials must be >= 1", "/trials");
  s.trials = static_cast<std::uint64_t>(trials);
  if (auto* v = optionalKey(j, "eta")) {
    s.eta = number(*v, "/eta");
    if (!(s.eta > 0.0 && s.eta < 1e-2)) throw SchemaError("eta must lie in (0, 1e-2)", "/eta");
  }
  if (auto* c = optionalKey(j, "criteria")) {
    if (auto* v = optionalKey(*c, "K")) s.criteriaK = number(*v, "/criteria/K");
    if (auto* v = optionalKey(*c, "jMax")) s.criteriaJMax = static_cast<int>(integer(*v, "/criteria/jMax"));
    if (!(s.criteriaK > 1.0)) throw SchemaError("K must be > 1", "/criteria/K");
  }
  if (auto* w = optionalKey(j, "wiener")) {
    const std::string at = "/wiener";
    if (auto* v = optionalKey(*w, "taus")) {
      if (v->is_number_integer()) {
        const auto n = v->get<std::int64_t>();
        if (n < 1) throw SchemaError("tau count must be >= 1", at + "/taus");
        const auto pts = quasiUniformSphere(s.dimension, static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
          s.taus.emplace_back(pts.begin() + i * s.dimension, pts.begin() + (i + 1) * s.dimension);
        }
      } else if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i) {
          const std::string tp = at + "/taus/" + std::to_string(i);
          auto tau = detail::numberList((*v)[i], tp);
          if (static_cast<int>(tau.size()) != s.dimension) throw SchemaError("tau has the wrong dimension", tp);
          if (std::abs(norm(tau) - 1.0) > 1e-12) throw SchemaError("tau must lie on the unit sphere", tp);
          s.taus.push_back(std::move(tau));
        }
      } else {
        throw SchemaError("expected a count or a list of points", at + "/taus");
      }
    }
    if (auto* v = optionalKey(*w, "K")) s.wienerK = number(*v, at + "/K");
    if (auto* v = optionalKey(*w, "sep")) s.wienerSep = number(*v, at + "/sep");
    if (auto* v = optionalKey(*w, "jMax")) s.wienerJMax = static_cast<int>(integer(*v, at + "/jMax"));
    if (auto* v = optionalKey(*w, "maxLevel")) s.maxLevel = static_cast<int>(integer(*v, at + "/maxLevel"));
    if (auto* v = optionalKey(*w, "coneFactor")) s.coneFactor = number(*v, at + "/coneFactor");
    if (!(s.wienerK > 1.0)) throw SchemaError("K must be > 1", at + "/K");
    if (s.maxLevel < 4 || s.maxLevel > kMaxWhitneyLevel) throw SchemaError("maxLevel must lie in [4, 40]", at + "/maxLevel");
  }
  if (s.taus.empty()) {
    const auto pts = quasiUniformSphere(s.dimension, 8);
    for (int i = 0; i < 8; ++i) s.taus.emplace_back(pts.begin() + i * s.dimension, pts.begin() + (i + 1) * s.dimension);
  }
  if (auto* v = optionalKey(j, "outputDir")) {
    if (!v->is_string()) throw SchemaError("expected a string", "/outputDir");
    s.outputDir = v->get<std::string>();
  }
  return s;
}

inline ExperimentSpec readExperimentSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open spec file " + path, "");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "");
  }
  return experimentSpecFromJson(j);
}

struct ExperimentCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentResult {
  Json summary;
  std::vector<ExperimentCheck> checks;
  bool consistent = true;
  int exitCode() const { return consistent ? 0 : 2; }
};

namespace detail {

inline void writeText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

inline std::string utcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Definite verdicts agree: that verdict; none definite or a conflict: Inconclusive.
inline Verdict combineVerdicts(const std::vector<Verdict>& vs) {
  bool conv = false;
  bool div = false;
  for (auto v : vs) {
    conv = conv || v == Verdict::Converges;
    div = div || v == Verdict::Diverges;
  }
  if (conv && !div) return Verdict::Converges;
  if (div && !conv) return Verdict::Diverges;
  return Verdict::Inconclusive;
}

inline champagne::Json sourced(champagne::Json value, const std::string& source) { return champagne::Json{{"value", std::move(value)}, {"source", source}}; }

}  // namespace detail

/// Runs every module on one battery and writes field.json, wiener_field.json, criteria.json,
/// wiener.json, bounds.json, sweep.csv and summary.json into spec.outputDir.
inline ExperimentResult runExperiment(const ExperimentSpec& spec, unsigned workers = 0) {
  namespace fs = std::filesystem;
  const fs::path dir(spec.outputDir);
  fs::create_directories(dir);
  ExperimentResult result;
  const int d = spec.dimension;
  const std::uint64_t fieldSeed = spec.seeds.front();

  // Field
  GenerateOptions gen;
  gen.workers = workers;
  ObstacleField field = spec.profile ? generateRegularField(d, spec.shells, *spec.profile, spec.sep, fieldSeed, gen)
                                     : ObstacleField::empty(d, spec.shells);
  detail::writeText(dir / "field.json", fieldToJson(field));

  // Criteria
  Json criteria;
  Verdict shellVerdict = Verdict::Converges;
  Verdict integralVerdict = Verdict::Converges;
  if (spec.profile) {
    const auto cs = ShellGeometry::make(spec.criteriaK, 1, spec.criteriaJMax);
    const auto series = shellSeries(*spec.profile, d, cs);
    const auto integral = integralSeries(*spec.profile, d, cs);
    shellVerdict = series.verdict;
    integralVerdict = integral.verdict;
    criteria = Json{{"shellSeries", toJson(series)}, {"integral", toJson(integral)}};
  } else {
    criteria = Json{{"shellSeries", Json{{"verdict", "Converges"}, {"note", "no obstacles"}}},
                    {"integral", Json{{"verdict", "Converges"}, {"note", "no obstacles"}}}};
  }
  detail::writeText(dir / "criteria.json", criteria.dump(2) + "\n");

  // Wiener
  Json wiener{{"reports", Json::array()}};
  std::vector<Verdict> wienerVerdicts;
  {
    ObstacleField wfield = ObstacleField::empty(d, ShellGeometry::make(spec.wienerK, 1, spec.wienerJMax));
    if (spec.profile) {
      GenerateOptions wopt;
      wopt.workers = workers;
      for (const auto& tau : spec.taus) wopt.windows.push_back(ConeWindow{tau, spec.coneFactor, 0.0});
      wfield = generateRegularField(d, ShellGeometry::make(spec.wienerK, 1, spec.wienerJMax), *spec.profile,
                                    spec.wienerSep, fieldSeed, wopt);
    }
    detail::writeText(dir / "wiener_field.json", fieldToJson(wfield));
    WienerOptions wo;
    wo.coneFactor = spec.coneFactor;
    wo.keepCubes = false;
    for (const auto& tau : spec.taus) {
      const auto rep = wienerSeries(wfield, tau, spec.maxLevel, wo);
      wienerVerdicts.push_back(rep.verdict);
      wiener["reports"].push_back(toJson(rep));
    }
  }
  detail::writeText(dir / "wiener.json", wiener.dump(2) + "\n");

  // Simulation
  const ShellIndex index(field);
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  std::vector<int> depths = spec.depths;
  depths.push_back(kAllDepths);
  std::string csv = "seed,depth,pHat,ciLow,ciHigh,tailBound\n";
  Json brackets = Json::array();
  bool decreasing = true;
  std::vector<std::vector<HarmonicEstimate>> sweeps;
  for (auto seed : spec.seeds) {
    WalkConfig cfg;
    cfg.trials = spec.trials;
    cfg.boundaryTol = spec.eta;
    cfg.seed = seed;
    cfg.workers = workers;
    auto rows = depthSweep(field, index, origin, cfg, depths);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& e = rows[k];
      if (k > 0 && e.pHat > rows[k - 1].pHat) decreasing = false;
      const std::string line = sweepCsv({e}, false);
      csv += std::to_string(seed) + "," + line;
      brackets.push_back(Json{{"seed", seed},
                              {"depth", depthJson(e.depth)},
                              {"pHat", jsonNumber(e.pHat)},
                              {"low", jsonNumber(e.ciLow)},
                              {"high", jsonNumber(e.ciHigh)},
                              {"certifiedLow", jsonNumber(e.bracketLow())},
                              {"source", "sweep.csv#seed=" + std::to_string(seed) + ",depth=" + depthJson(e.depth).dump()}});
    }
    sweeps.push_back(std::move(rows));
  }
  detail::writeText(dir / "sweep.csv", csv);

  // Bounds
  Json bounds{{"unionTail", Json::array()}, {"product", Json::object()}};
  std::vector<double> unionValues;
  for (int J : spec.depths) {
    const auto ub = tailBoundForDepth(field, J);
    unionValues.push_back(ub.value);
    bounds["unionTail"].push_back(toJson(ub));
  }
  std::optional<BoundReport> product;
  if (!field.empty()) {
    for (Parity p : {Parity::Even, Parity::Odd}) {
      ProductOptions po;
      po.parity = p;
      const auto pb = productAvoidanceBound(field, po);
      bounds["product"][toString(p)] = toJson(pb);
      if (p == Parity::Even) product = pb;
    }
  }
  detail::writeText(dir / "bounds.json", bounds.dump(2) + "\n");

  // Consistency
  auto check = [&](std::string name, bool ok, std::string detailText) {
    result.checks.push_back({std::move(name), ok, std::move(detailText)});
    result.consistent = result.consistent && ok;
  };
  check("criteria-integral-wiener agree", mutuallyConsistent({shellVerdict, integralVerdict, detail::combineVerdicts(wienerVerdicts)}),
        toString(shellVerdict) + "/" + toString(integralVerdict) + "/" + toString(detail::combineVerdicts(wienerVerdicts)));
  for (std::size_t s = 0; s < sweeps.size(); ++s) {
    const auto& rows = sweeps[s];
    const auto& deepest = rows.back();
    const double n = static_cast<double>(deepest.escapes + deepest.absorbed);
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      // Walks escaping at depth J but absorbed in the full field hit an obstacle beyond J.
      const double q = n > 0 ? static_cast<double>(rows[k].escapes - deepest.escapes) / n : 0.0;
      const double sigma = n > 0 ? std::sqrt(q * (1.0 - q) / n) : 0.0;
      std::ostringstream msg;
      msg << "seed " << spec.seeds[s] << " depth " << rows[k].depth << ": hit-beyond " << q << " vs bound "
          << unionValues[k];
      check("union bound dominates", q - 3.0 * sigma <= unionValues[k], msg.str());
    }
  }
  if (product) {
    WalkConfig cfg;
    cfg.trials = spec.trials;
    cfg.boundaryTol = spec.eta;
    cfg.seed = spec.seeds.front();
    cfg.workers = workers;
    const auto thinned = parityThinned(field, Parity::Even, product->annulusStride);
    const auto est = runWalks(thinned, ShellIndex(thinned), origin, cfg, false);
    std::ostringstream msg;
    msg << "thinned avoidance " << est.pHat << " vs bound " << product->value;
    check("product bound dominates", est.pHat - 3.0 * est.sigma <= product->value, msg.str());
    bounds["productSimulation"] = toJson(est);
  }

  Json checks = Json::array();
  for (const auto& c : result.checks) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  Json wienerPerTau = Json::array();
  for (std::size_t i = 0; i < wienerVerdicts.size(); ++i) {
    wienerPerTau.push_back(detail::sourced(toString(wienerVerdicts[i]), "wiener.json#/reports/" + std::to_string(i) + "/verdict"));
  }
  Json unionJson = Json::array();
  for (std::size_t k = 0; k < spec.depths.size(); ++k) {
    unionJson.push_back(Json{{"depth", spec.depths[k]},
                             {"value", jsonNumber(unionValues[k])},
                             {"source", "bounds.json#/unionTail/" + std::to_string(k) + "/value"}});
  }
  result.summary = Json{
      {"specVersion", kExperimentSpecVersion},
      {"name", spec.name},
      {"timestamp", detail::utcTimestamp()},
      {"criteria", detail::sourced(toString(shellVerdict), "criteria.json#/shellSeries/verdict")},
      {"integral", detail::sourced(toString(integralVerdict), "criteria.json#/integral/verdict")},
      {"wiener", Json{{"value", toString(detail::combineVerdicts(wienerVerdicts))}, {"source", "wiener.json#/reports/*/verdict"}, {"perTau", wienerPerTau}}},
      {"bounds",
       Json{{"unionTail", unionJson},
            {"productEven", product ? detail::sourced(jsonNumber(product->value), "bounds.json#/product/even/value") : Json(nullptr)}}},
      {"simulation", Json{{"brackets", brackets}, {"pHatNonIncreasing", detail::sourced(decreasing, "sweep.csv#pHat")}}},
      {"consistency", Json{{"consistent", result.consistent}, {"checks", checks}}}};
  detail::writeText(dir / "bounds.json", bounds.dump(2) + "\n");
  detail::writeText(dir / "summary.json", result.summary.dump(2) + "\n");
  return result;
}

}  // namespace champagne
