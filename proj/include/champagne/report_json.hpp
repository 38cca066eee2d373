#pragma once

#include <cmath>
#include <string>

#include "json.hpp"

#include "bounds.hpp"
#include "classify.hpp"
#include "criteria.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "spacing.hpp"
#include "whitney.hpp"
#include "wos.hpp"

namespace champagne {

using Json = nlohmann::ordered_json;

/// JSON has no infinities: +-inf become the strings "inf"/"-inf", NaN becomes null.
inline Json jsonNumber(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline Json toJson(const TailClassification& c) {
  return Json{{"verdict", toString(c.verdict)}, {"tailExponent", jsonNumber(c.tailExponent)}, {"rule", toString(c.rule)}};
}

inline Json toJson(const CriterionReport& r) {
  Json terms = Json::array();
  for (const auto& t : r.terms) terms.push_back(Json{{"j", t.j}, {"value", jsonNumber(t.value)}, {"log", jsonNumber(t.logValue)}});
  Json sums = Json::array();
  for (double s : r.partialSums) sums.push_back(jsonNumber(s));
  return Json{{"method", toString(r.method)},
              {"dimension", r.dimension},
              {"K", r.shells.K},
              {"jMin", r.shells.jMin},
              {"jMax", r.shells.jMax},
              {"verdict", toString(r.verdict)},
              {"tailExponent", r.tailExponent ? jsonNumber(*r.tailExponent) : Json(nullptr)},
              {"rule", toString(r.rule)},
              {"truncated", r.truncated},
              {"lastEvaluatedJ", r.lastEvaluatedJ},
              {"note", r.note},
              {"terms", terms},
              {"partialSums", sums}};
}

inline Json toJson(const WienerReport& r, bool includeCubes = false) {
  Json levels = Json::array();
  for (const auto& s : r.perLevel) {
    levels.push_back(Json{{"level", s.level},
                          {"cubes", s.cubes},
                          {"lower", s.lower},
                          {"upper", s.upper},
                          {"cumulativeLower", s.cumulativeLower},
                          {"cumulativeUpper", s.cumulativeUpper}});
  }
  Json out{{"tau", r.tau},
           {"maxLevel", r.maxLevel},
           {"coneFactor", r.window ? jsonNumber(r.window->coneFactor) : Json(nullptr)},
           {"verdict", toString(r.verdict)},
           {"upper", toJson(r.upperTail)},
           {"lower", toJson(r.lowerTail)},
           {"classifiedLevels", Json::array({r.classifiedFrom, r.classifiedTo})},
           {"totalLower", r.totalLower},
           {"totalUpper", r.totalUpper},
           {"ringConstant", r.ringConstant},
           {"truncationEstimate", jsonNumber(r.truncationEstimate)},
           {"note", r.note},
           {"perLevel", levels},
           {"contributingCubes", r.perCube.size()}};
  if (includeCubes) {
    Json cubes = Json::array();
    const auto d = r.tau.size();
    for (const auto& c : r.perCube) {
      cubes.push_back(Json{{"level", c.level},
                           {"gridIndex", std::vector<std::int64_t>(c.gridIndex.begin(), c.gridIndex.begin() + static_cast<std::ptrdiff_t>(d))},
                           {"rho", c.rho},
                           {"capLower", c.capLower},
                           {"capUpper", c.capUpper},
                           {"termLower", c.termLower},
                           {"termUpper", c.termUpper}});
    }
    out["perCube"] = cubes;
  }
  return out;
}

inline Json toJson(const SandwichBound& s) {
  return Json{{"lower", s.lower}, {"upper", s.upper}, {"upperValid", s.upperValid}, {"uStarMax", s.uStarMax}, {"freeSpace", s.freeSpace}};
}

inline Json toJson(const BoundReport& r) {
  Json terms = Json::array();
  for (const auto& t : r.perShellTerms) {
    Json tj{{"j", t.j}, {"certified", t.certified}};
    if (r.kind == BoundKind::UnionTail) {
      tj["explicit"] = jsonNumber(t.explicitPart);
      tj["analytic"] = jsonNumber(t.analyticPart);
      tj["obstacles"] = t.obstacles;
    } else {
      tj["t"] = jsonNumber(t.factor);
    }
    terms.push_back(tj);
  }
  Json out{{"kind", toString(r.kind)},
           {"value", jsonNumber(r.value)},
           {"validFromJ", r.validFromJ},
           {"certified", r.certified},
           {"notes", r.notes}};
  if (r.kind == BoundKind::UnionTail) {
    out["fromDepth"] = r.fromDepth;
    out["explicitTotal"] = jsonNumber(r.explicitTotal);
    out["analyticTotal"] = jsonNumber(r.analyticTotal);
    out["analyticFrom"] = r.analyticFrom;
    out["analyticVerdict"] = r.analyticVerdict ? Json(toString(*r.analyticVerdict)) : Json(nullptr);
    if (r.guarantee) {
      out["guarantee"] = Json{{"threshold", jsonNumber(r.guarantee->threshold)},
                              {"r", r.guarantee->r ? jsonNumber(*r.guarantee->r) : Json(nullptr)},
                              {"nR", r.guarantee->nR ? Json(*r.guarantee->nR) : Json(nullptr)},
                              {"tailIntegral", jsonNumber(r.guarantee->tailIntegral)}};
    }
  } else {
    out["parity"] = r.parity;
    out["annulusStride"] = r.annulusStride;
    out["boundK"] = r.boundK;
    out["densityR"] = jsonNumber(r.densityR);
    out["lastAnnulus"] = r.lastAnnulus;
  }
  out["perShellTerms"] = terms;
  return out;
}

inline Json depthJson(int depth) { return depth == kAllDepths ? Json("all") : Json(depth); }

inline Json toJson(const HarmonicEstimate& e) {
  return Json{{"depth", depthJson(e.depth)},
              {"trials", e.trials},
              {"requestedTrials", e.requestedTrials},
              {"escapes", e.escapes},
              {"absorbed", e.absorbed},
              {"censored", e.censored},
              {"pHat", jsonNumber(e.pHat)},
              {"sigma", e.sigma},
              {"ciLow", e.ciLow},
              {"ciHigh", e.ciHigh},
              {"tailBound", jsonNumber(e.tailBound)},
              {"tailCertified", e.tailCertified},
              {"bracket", Json::array({jsonNumber(e.bracketLow()), jsonNumber(e.bracketHigh())})},
              {"censoringFlagged", e.censoringFlagged},
              {"partial", e.partial},
              {"totalSteps", e.totalSteps}};
}

inline Json toJson(const SpacingReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairViolations) pairs.push_back(Json{{"outer", p.outer}, {"inner", p.inner}, {"ratio", p.ratio}});
  Json probes = Json::array();
  for (const auto& p : r.probeViolations) probes.push_back(Json{{"probe", p.probe}, {"point", p.point}, {"ratio", p.ratio}});
  return Json{{"epsilonEmpirical", jsonNumber(r.epsilonEmpirical)},
              {"densityREmpirical", jsonNumber(r.densityREmpirical)},
              {"vacuous", r.vacuous},
              {"probes", r.probesEvaluated},
              {"pairViolations", pairs},
              {"probeViolations", probes}};
}

/// Sweep table: depth,pHat,ciLow,ciHigh,tailBound.
inline std::string sweepCsv(const std::vector<HarmonicEstimate>& rows, bool header = true) {
  std::string out = header ? "depth,pHat,ciLow,ciHigh,tailBound\n" : "";
  for (const auto& e : rows) {
    out += (e.depth == kAllDepths ? std::string("all") : std::to_string(e.depth)) + "," + formatDouble(e.pHat) + "," +
           formatDouble(e.ciLow) + "," + formatDouble(e.ciHigh) + "," +
           (std::isinf(e.tailBound) ? std::string("inf") : formatDouble(e.tailBound)) + "\n";
  }
  return out;
}

}  // namespace champagne
