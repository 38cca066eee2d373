#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "champagne/champagne.hpp"

namespace {

using namespace champagne;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInconsistent = 2;

std::vector<std::string> splitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parseDouble(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigurationError("cannot parse " + what + ": '" + s + "'");
  }
  if (used != s.size()) throw ConfigurationError("cannot parse " + what + ": '" + s + "'");
  return v;
}

std::vector<double> parseVector(const std::string& s) {
  std::vector<double> v;
  for (const auto& part : splitOn(s, ',')) v.push_back(parseDouble(part, "vector component"));
  return v;
}

std::vector<int> parseDepths(const std::string& s) {
  std::vector<int> v;
  for (const auto& part : splitOn(s, ',')) {
    if (part == "all") {
      v.push_back(kAllDepths);
    } else {
      v.push_back(static_cast<int>(parseDouble(part, "depth")));
    }
  }
  return v;
}

// powerlaw:c=0.1,alpha=2 | powerlog:c=0.1,beta=2 | table:0=0.1,0.5=0.05
RadiusProfile parseProfile(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigurationError("profile must look like kind:key=value,...");
  const std::string kind = text.substr(0, colon);
  std::vector<std::pair<std::string, double>> kv;
  for (const auto& part : splitOn(text.substr(colon + 1), ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigurationError("profile parameter without '=': " + part);
    kv.emplace_back(part.substr(0, eq), parseDouble(part.substr(eq + 1), "profile parameter"));
  }
  auto get = [&](const std::string& key) {
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
    }
    throw ConfigurationError("profile " + kind + " needs parameter " + key);
  };
  if (kind == "powerlaw") return RadiusProfile::powerLaw(get("c"), get("alpha"));
  if (kind == "powerlog") return RadiusProfile::powerLog(get("c"), get("beta"));
  if (kind == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& [k, v] : kv) knots.emplace_back(parseDouble(k, "table knot"), v);
    return RadiusProfile::table(std::move(knots));
  }
  throw ConfigurationError("unknown profile kind '" + kind + "'");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emitJson(const Json& j, const std::string& path) { emit(j.dump(2) + "\n", path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Avoidability of regularly spaced ball fields: criteria, bounds and walk-on-spheres.\n"
               "Worker threads: CHAMPAGNE_WORKERS (default: hardware concurrency)."};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a regularly spaced obstacle field");
  int genDim = 3;
  double genK = 5.0;
  std::string genProfile;
  double genSep = 1.0;
  int genJMin = 1;
  int genJMax = 6;
  std::uint64_t genSeed = 1;
  std::string genOut;
  std::vector<std::string> genWindows;
  double genCone = 8.0;
  gen->add_option("--dim", genDim, "Dimension d >= 3")->capture_default_str();
  gen->add_option("--K", genK, "Shell ratio K > 1")->capture_default_str();
  gen->add_option("--profile", genProfile, "powerlaw:c=..,alpha=.. | powerlog:c=..,beta=.. | table:t=phi,...")->required();
  gen->add_option("--sep", genSep, "Separation multiple of the shell gap")->capture_default_str();
  gen->add_option("--jmin", genJMin, "First shell")->capture_default_str();
  gen->add_option("--jmax", genJMax, "Last shell")->capture_default_str();
  gen->add_option("--seed", genSeed, "RNG seed")->capture_default_str();
  gen->add_option("--window", genWindows, "Restrict to a cone around tau (x,y,z); repeatable");
  gen->add_option("--cone-factor", genCone, "Cone width factor for --window")->capture_default_str();
  gen->add_option("--out", genOut, "Output file (default stdout)");

  // criteria
  auto* crit = app.add_subcommand("criteria", "Shell-series and integral criteria");
  std::string critProfile;
  int critDim = 3;
  double critK = 5.0;
  int critJMax = 40;
  std::string critTau;
  std::string critField;
  int critMaxLevel = 12;
  std::string critOut;
  crit->add_option("--profile", critProfile, "Radius profile")->required();
  crit->add_option("--dim", critDim, "Dimension d >= 3")->capture_default_str();
  crit->add_option("--K", critK, "Shell ratio K > 1")->capture_default_str();
  crit->add_option("--jmax", critJMax, "Last shell index")->capture_default_str();
  crit->add_option("--tau", critTau, "Boundary point for an extra Wiener check (needs --field)");
  crit->add_option("--field", critField, "Field for the Wiener check");
  crit->add_option("--max-level", critMaxLevel, "Whitney depth for the Wiener check")->capture_default_str();
  crit->add_option("--out", critOut, "Output file (default stdout)");

  // wiener
  auto* wien = app.add_subcommand("wiener", "Wiener-type series at a boundary point");
  std::string wField;
  std::string wTau;
  int wMaxLevel = 12;
  double wCone = 8.0;
  bool wCubes = false;
  std::string wOut;
  wien->add_option("--field", wField, "Field JSON")->required();
  wien->add_option("--tau", wTau, "Unit boundary point x,y,z")->required();
  wien->add_option("--max-level", wMaxLevel, "Whitney depth")->capture_default_str();
  wien->add_option("--cone-factor", wCone, "Cone factor; <= 0 evaluates the whole ball")->capture_default_str();
  wien->add_flag("--cubes", wCubes, "Include per-cube terms");
  wien->add_option("--out", wOut, "Output file (default stdout)");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Certified harmonic-measure bounds");
  std::string bField;
  std::string bKind = "union";
  int bFrom = -1;
  std::string bParity = "even";
  int bStride = 0;
  std::string bLambda;
  double bRadius = 0.0;
  std::string bPoint;
  std::string bOut;
  bnd->add_option("--field", bField, "Field JSON (union, product)");
  bnd->add_option("--kind", bKind, "union | product | sandwich")
      ->check(CLI::IsMember({"union", "product", "sandwich"}))
      ->capture_default_str();
  bnd->add_option("--from-depth", bFrom, "Union bound from this annulus (default: first)");
  bnd->add_option("--parity", bParity, "even | odd (product)")->check(CLI::IsMember({"even", "odd"}))->capture_default_str();
  bnd->add_option("--stride", bStride, "Annulus stride for the product bound (0 = auto)")->capture_default_str();
  bnd->add_option("--lambda", bLambda, "Obstacle centre (sandwich)");
  bnd->add_option("--radius", bRadius, "Obstacle radius (sandwich)");
  bnd->add_option("--x", bPoint, "Evaluation point (sandwich; default origin)");
  bnd->add_option("--out", bOut, "Output file (default stdout)");

  // simulate / sweep share walk options
  struct WalkArgs {
    std::string field;
    std::uint64_t trials = 10000;
    double eta = 1e-6;
    std::uint64_t seed = 0;
    std::uint64_t maxSteps = 1000000;
    std::string start;
    std::string out;
  };
  auto addWalkOptions = [](CLI::App* sub, WalkArgs& a) {
    sub->add_option("--field", a.field, "Field JSON")->required();
    sub->add_option("--trials", a.trials, "Number of walks")->capture_default_str();
    sub->add_option("--eta", a.eta, "Absorption shell width")->capture_default_str();
    sub->add_option("--seed", a.seed, "RNG seed")->capture_default_str();
    sub->add_option("--max-steps", a.maxSteps, "Steps before a walk is censored")->capture_default_str();
    sub->add_option("--start", a.start, "Start point (default origin)");
    sub->add_option("--out", a.out, "Output file (default stdout)");
  };
  auto* sim = app.add_subcommand("simulate", "Walk-on-spheres estimate at one truncation depth");
  WalkArgs simArgs;
  std::string simDepth = "all";
  addWalkOptions(sim, simArgs);
  sim->add_option("--depth", simDepth, "Truncation depth J or 'all'")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Coupled estimates at several truncation depths");
  WalkArgs swArgs;
  std::string swDepths;
  std::string swCsv;
  addWalkOptions(sweep, swArgs);
  sweep->add_option("--depths", swDepths, "Increasing depths, e.g. 4,6,8,10,all")->required();
  sweep->add_option("--csv", swCsv, "Also write depth,pHat,ciLow,ciHigh,tailBound here");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a battery described by a spec file");
  std::string expSpec;
  std::string expOutDir;
  exp->add_option("spec", expSpec, "Experiment spec JSON")->required();
  exp->add_option("--output-dir", expOutDir, "Override outputDir");

  CLI11_PARSE(app, argc, argv);

  auto walkConfig = [](const WalkArgs& a) {
    WalkConfig c;
    c.trials = a.trials;
    c.boundaryTol = a.eta;
    c.seed = a.seed;
    c.maxSteps = a.maxSteps;
    return c;
  };
  auto startPoint = [](const WalkArgs& a, const ObstacleField& f) {
    if (a.start.empty()) return std::vector<double>(static_cast<std::size_t>(f.dimension()), 0.0);
    return parseVector(a.start);
  };

  try {
    if (gen->parsed()) {
      GenerateOptions opts;
      for (const auto& w : genWindows) opts.windows.push_back(ConeWindow{parseVector(w), genCone, 0.0});
      const auto field = generateRegularField(genDim, ShellGeometry::make(genK, genJMin, genJMax), parseProfile(genProfile),
                                              genSep, genSeed, opts);
      emit(fieldToJson(field), genOut);
    } else if (crit->parsed()) {
      const auto profile = parseProfile(critProfile);
      const auto shells = ShellGeometry::make(critK, 1, critJMax);
      const auto series = shellSeries(profile, critDim, shells);
      const auto integral = integralSeries(profile, critDim, shells);
      Json out{{"shellSeries", toJson(series)}, {"integral", toJson(integral)}};
      if (!critTau.empty() || !critField.empty()) {
        if (critTau.empty() || critField.empty()) throw ConfigurationError("--tau and --field go together");
        const auto field = readField(critField);
        out["wiener"] = toJson(wienerSeries(field, parseVector(critTau), critMaxLevel));
      }
      emitJson(out, critOut);
    } else if (wien->parsed()) {
      const auto field = readField(wField);
      WienerOptions opts;
      opts.coneFactor = wCone;
      opts.keepCubes = wCubes;
      emitJson(toJson(wienerSeries(field, parseVector(wTau), wMaxLevel, opts), wCubes), wOut);
    } else if (bnd->parsed()) {
      if (bKind == "sandwich") {
        if (bLambda.empty() || !(bRadius > 0.0)) throw ConfigurationError("sandwich needs --lambda and --radius");
        const auto lambda = parseVector(bLambda);
        const auto x = bPoint.empty() ? std::vector<double>(lambda.size(), 0.0) : parseVector(bPoint);
        emitJson(toJson(sandwich(lambda, bRadius, x, static_cast<int>(lambda.size()))), bOut);
      } else {
        if (bField.empty()) throw ConfigurationError("--field is required for " + bKind);
        const auto field = readField(bField);
        if (bKind == "union") {
          const int from = bFrom >= 0 ? bFrom : field.shells().jMin;
          emitJson(toJson(unionTailBound(field, from)), bOut);
        } else {
          ProductOptions po;
          po.parity = bParity == "even" ? Parity::Even : Parity::Odd;
          po.annulusStride = bStride;
          emitJson(toJson(productAvoidanceBound(field, po)), bOut);
        }
      }
    } else if (sim->parsed()) {
      const auto field = readField(simArgs.field);
      auto cfg = walkConfig(simArgs);
      cfg.truncationDepth = parseDepths(simDepth).at(0);
      const ShellIndex index(field);
      emitJson(toJson(runWalks(field, index, startPoint(simArgs, field), cfg)), simArgs.out);
    } else if (sweep->parsed()) {
      const auto field = readField(swArgs.field);
      const ShellIndex index(field);
      const auto depths = parseDepths(swDepths);
      const auto rows = depthSweep(field, index, startPoint(swArgs, field), walkConfig(swArgs), depths);
      Json arr = Json::array();
      for (const auto& r : rows) arr.push_back(toJson(r));
      emitJson(arr, swArgs.out);
      if (!swCsv.empty()) emit(sweepCsv(rows), swCsv);
    } else if (exp->parsed()) {
      auto spec = readExperimentSpec(expSpec);
      if (!expOutDir.empty()) spec.outputDir = expOutDir;
      const auto result = runExperiment(spec);
      for (const auto& c : result.checks) {
        std::cerr << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
      }
      std::cout << result.summary.dump(2) << "\n";
      return result.consistent ? kExitOk : kExitInconsistent;
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
