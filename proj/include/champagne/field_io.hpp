#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "field.hpp"

namespace champagne {

inline constexpr int kFieldSpecVersion = 1;

/// Shortest text that reads back to the same double: 17 significant digits.
inline std::string formatDouble(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline std::string profileJson(const RadiusProfile& p) {
  std::ostringstream out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          out << "{\"kind\": \"PowerLaw\", \"params\": {\"c\": " << formatDouble(k.c)
              << ", \"alpha\": " << formatDouble(k.alpha) << "}}";
        } else if constexpr (std::is_same_v<T, PowerLog>) {
          out << "{\"kind\": \"PowerLog\", \"params\": {\"c\": " << formatDouble(k.c)
              << ", \"beta\": " << formatDouble(k.beta) << "}}";
        } else {
          out << "{\"kind\": \"Table\", \"params\": {\"knots\": [";
          for (std::size_t i = 0; i < k.knots.size(); ++i) {
            out << (i ? ", " : "") << "[" << formatDouble(k.knots[i].first) << ", " << formatDouble(k.knots[i].second)
                << "]";
          }
          out << "]}}";
        }
      },
      p.kind());
  return out.str();
}

inline std::string vectorJson(const double* v, int d) {
  std::string s = "[";
  for (int i = 0; i < d; ++i) {
    if (i) s += ", ";
    s += formatDouble(v[i]);
  }
  return s + "]";
}

using Json = nlohmann::json;

inline const Json& require(const Json& obj, const std::string& key, const std::string& at) {
  if (!obj.is_object()) throw SchemaError("expected an object", at);
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing required key '" + key + "'", at + "/" + key);
  return *it;
}

inline double number(const Json& v, const std::string& at) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw SchemaError("expected a number", at);
}

inline std::int64_t integer(const Json& v, const std::string& at) {
  if (!v.is_number_integer()) throw SchemaError("expected an integer", at);
  return v.get<std::int64_t>();
}

}  // namespace detail

/// Profile from {"kind": ..., "params": {...}}. `at` is the JSON pointer of the object.
inline RadiusProfile profileFromJson(const nlohmann::json& j, const std::string& at) {
  using detail::number;
  using detail::require;
  const auto& kindNode = require(j, "kind", at);
  if (!kindNode.is_string()) throw SchemaError("expected a string", at + "/kind");
  const auto kind = kindNode.get<std::string>();
  const auto& params = require(j, "params", at);
  const std::string pp = at + "/params";
  try {
    if (kind == "PowerLaw") {
      return RadiusProfile::powerLaw(number(require(params, "c", pp), pp + "/c"),
                                     number(require(params, "alpha", pp), pp + "/alpha"));
    }
    if (kind == "PowerLog") {
      return RadiusProfile::powerLog(number(require(params, "c", pp), pp + "/c"),
                                     number(require(params, "beta", pp), pp + "/beta"));
    }
    if (kind == "Table") {
      const auto& knots = require(params, "knots", pp);
      if (!knots.is_array()) throw SchemaError("expected an array", pp + "/knots");
      std::vector<std::pair<double, double>> out;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        const std::string kp = pp + "/knots/" + std::to_string(i);
        if (!knots[i].is_array() || knots[i].size() != 2) throw SchemaError("expected a [t, phi] pair", kp);
        out.emplace_back(number(knots[i][0], kp + "/0"), number(knots[i][1], kp + "/1"));
      }
      return RadiusProfile::table(std::move(out));
    }
  } catch (const SchemaError& e) {
    if (!e.pointer().empty()) throw;
    throw SchemaError(e.what(), pp);
  }
  throw SchemaError("unknown profile kind '" + kind + "'", at + "/kind");
}

inline std::string profileToJson(const RadiusProfile& p) { return detail::profileJson(p); }

/// Field document. Doubles use 17 significant digits so reading it back is bit-exact.
inline std::string fieldToJson(const ObstacleField& field) {
  const auto& info = field.info();
  const int d = field.dimension();
  std::ostringstream out;
  out << "{\n";
  out << "  \"specVersion\": " << kFieldSpecVersion << ",\n";
  out << "  \"dimension\": " << d << ",\n";
  out << "  \"K\": " << formatDouble(info.shells.K) << ",\n";
  out << "  \"jMin\": " << info.shells.jMin << ",\n";
  out << "  \"jMax\": " << info.shells.jMax << ",\n";
  out << "  \"profile\": " << (info.profile ? detail::profileJson(*info.profile) : std::string("null")) << ",\n";
  out << "  \"epsilon\": " << formatDouble(info.epsilon) << ",\n";
  out << "  \"densityR\": " << formatDouble(info.densityR) << ",\n";
  out << "  \"sep\": " << formatDouble(info.sep) << ",\n";
  out << "  \"seed\": " << (info.seed ? std::to_string(*info.seed) : std::string("null")) << ",\n";
  out << "  \"windows\": [";
  for (std::size_t w = 0; w < info.windows.size(); ++w) {
    const auto& win = info.windows[w];
    out << (w ? ", " : "") << "{\"tau\": " << detail::vectorJson(win.tau.data(), d)
        << ", \"coneFactor\": " << formatDouble(win.coneFactor) << ", \"coneCap\": " << formatDouble(win.coneCap)
        << "}";
  }
  out << "],\n";
  out << "  \"obstacles\": [";
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << (i ? ",\n    " : "\n    ") << "{\"center\": " << detail::vectorJson(field.center(i), d)
        << ", \"radius\": " << formatDouble(field.radius(i)) << "}";
  }
  out << (field.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

inline ObstacleField fieldFromJson(const nlohmann::json& j) {
  using detail::integer;
  using detail::number;
  using detail::require;
  if (!j.is_object()) throw SchemaError("field document must be an object", "");
  if (j.contains("specVersion")) {
    const auto v = integer(j["specVersion"], "/specVersion");
    if (v != kFieldSpecVersion) throw SchemaError("unsupported specVersion " + std::to_string(v), "/specVersion");
  }
  FieldInfo info;
  info.dimension = static_cast<int>(integer(require(j, "dimension", ""), "/dimension"));
  if (info.dimension < 3 || info.dimension > kMaxDim) throw SchemaError("dimension out of range", "/dimension");
  const int d = info.dimension;
  try {
    info.shells = ShellGeometry::make(number(require(j, "K", ""), "/K"),
                                      static_cast<int>(integer(require(j, "jMin", ""), "/jMin")),
                                      static_cast<int>(integer(require(j, "jMax", ""), "/jMax")));
  } catch (const DomainError& e) {
    throw SchemaError(e.what(), "/K");
  }
  if (j.contains("profile") && !j["profile"].is_null()) info.profile = profileFromJson(j["profile"], "/profile");
  if (j.contains("epsilon")) info.epsilon = number(j["epsilon"], "/epsilon");
  if (j.contains("densityR")) info.densityR = number(j["densityR"], "/densityR");
  if (j.contains("sep")) info.sep = number(j["sep"], "/sep");
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("expected a non-negative integer", "/seed");
    info.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("windows")) {
    const auto& ws = j["windows"];
    if (!ws.is_array()) throw SchemaError("expected an array", "/windows");
    for (std::size_t w = 0; w < ws.size(); ++w) {
      const std::string at = "/windows/" + std::to_string(w);
      ConeWindow win;
      const auto& tau = require(ws[w], "tau", at);
      if (!tau.is_array() || tau.size() != static_cast<std::size_t>(d)) {
        throw SchemaError("tau must have " + std::to_string(d) + " coordinates", at + "/tau");
      }
      for (std::size_t i = 0; i < tau.size(); ++i) win.tau.push_back(number(tau[i], at + "/tau/" + std::to_string(i)));
      if (ws[w].contains("coneFactor")) win.coneFactor = number(ws[w]["coneFactor"], at + "/coneFactor");
      if (ws[w].contains("coneCap")) win.coneCap = number(ws[w]["coneCap"], at + "/coneCap");
      info.windows.push_back(std::move(win));
    }
  }
  const auto& obs = require(j, "obstacles", "");
  if (!obs.is_array()) throw SchemaError("expected an array", "/obstacles");
  std::vector<double> centers;
  std::vector<double> radii;
  centers.reserve(obs.size() * static_cast<std::size_t>(d));
  radii.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string at = "/obstacles/" + std::to_string(i);
    const auto& c = require(obs[i], "center", at);
    if (!c.is_array() || c.size() != static_cast<std::size_t>(d)) {
      throw SchemaError("center must have " + std::to_string(d) + " coordinates", at + "/center");
    }
    for (std::size_t k = 0; k < c.size(); ++k) centers.push_back(number(c[k], at + "/center/" + std::to_string(k)));
    radii.push_back(number(require(obs[i], "radius", at), at + "/radius"));
  }
  try {
    return ObstacleField(std::move(info), std::move(centers), std::move(radii));
  } catch (const ConfigurationError& e) {
    throw SchemaError(e.what(), "/obstacles");
  }
}

inline ObstacleField fieldFromJsonText(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "");
  }
  return fieldFromJson(j);
}

inline ObstacleField readField(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open field file " + path, "");
  std::stringstream buf;
  buf << in.rdbuf();
  return fieldFromJsonText(buf.str());
}

inline void writeField(const ObstacleField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << fieldToJson(field);
}

}  // namespace champagne
