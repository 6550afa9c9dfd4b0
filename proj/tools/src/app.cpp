#include "nonlocal_cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"

#include "nonlocal/barrier.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/version.hpp"
#include "nonlocal_cli/reports.hpp"

namespace nonlocal::cli {
namespace {

struct Context {
  Json config;
  Common common;
};

Context prepare(const Invocation& inv) {
  Context ctx{inv.config, {}};
  if (!ctx.config.is_object()) throw ConfigError("", "config must be a JSON object");
  if (inv.seed) ctx.config["seed"] = *inv.seed;
  if (inv.tol) {
    if (!(*inv.tol > 0.0)) throw ConfigError("/tolerance/abs", "--tol must be > 0");
    ctx.config["tolerance"]["abs"] = *inv.tol;
    ctx.config["tolerance"]["rel"] = *inv.tol;
  }
  Section root(ctx.config, "");
  ctx.common = parseCommon(root);
  return ctx;
}

// Exponent from "gamma", or from "kappa" through the midpoint rule.
double barrierExponent(Section node, FractionalOrder s) {
  if (node.has("gamma")) {
    const double g = node.number("gamma");
    node.require(g > 0.0 && g < s.order(), "gamma",
                 "barrier exponent must satisfy γ ∈ (0, 2s); got gamma = " + formatNumber(g) +
                     " with 2s = " + formatNumber(s.order()));
    return g;
  }
  const double kappa = node.number("kappa", 0.0);
  node.require(kappa >= 0.0 && kappa < s.order(), "kappa", "must lie in [0, 2s)");
  const double g = gammaRule(s, kappa);
  node.setDefault("gamma", g);
  return g;
}

Json errorJson(const Error& e) {
  Json out{{"message", e.what()}};
  if (const auto* c = dynamic_cast<const CertificationFailure*>(&e)) {
    out["type"] = "certificationFailure";
    out["point"] = toJson(c->point());
    out["value"] = c->value();
    out["bound"] = c->bound();
  } else if (const auto* p = dynamic_cast<const PreconditionFailure*>(&e)) {
    out["type"] = "preconditionFailure";
    out["point"] = toJson(p->point());
  } else if (dynamic_cast<const StabilityError*>(&e)) {
    out["type"] = "stability";
  } else if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    out["type"] = "convergence";
    out["residual"] = c->residual();
  } else {
    out["type"] = "error";
  }
  return out;
}

Outcome runEval(Context& ctx) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const auto s = ctx.common.s;
  const SpectralMeasure mu = parseMeasure(root.child("measure"), n);
  const ScalarField u = parseField(root.child("field"), n, s, ctx.common.seed);
  Section ev = root.childOrEmpty("eval");
  std::vector<Vec> points;
  if (ev.has("points")) {
    Json& list = ev.raw("points");
    if (!list.is_array() || list.empty()) {
      throw ConfigError(ev.at("points"), "expected a nonempty array of points");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      Json wrapper{{"x", list[i]}};
      Section p(wrapper, ev.at("points"));
      try {
        points.push_back(p.vector("x", n));
      } catch (const ConfigError&) {
        throw ConfigError(ev.at("points") + "/" + std::to_string(i),
                          "expected a point with " + std::to_string(n) + " finite entries");
      }
    }
  } else {
    Section sweep = ev.childOrEmpty("sweep");
    const long count = sweep.integer("count", 11);
    sweep.require(count >= 1 && count <= 100000, "count", "must lie in [1, 100000]");
    const double maxRadius = sweep.number("maxRadius", 10.0);
    sweep.require(maxRadius >= 0.0, "maxRadius", "must be >= 0");
    const auto dirs = spreadDirections(n, static_cast<int>(count), ctx.common.seed);
    for (long i = 0; i < count; ++i) {
      const double r = count == 1 ? 0.0 : maxRadius * static_cast<double>(i) / (count - 1);
      points.push_back(r * dirs[static_cast<std::size_t>(i)]);
    }
  }
  std::optional<double> expected;
  if (ev.has("expected")) expected = ev.number("expected");

  Outcome out;
  out.pass = true;
  Json evals = Json::array();
  std::vector<std::vector<double>> rows;
  for (const Vec& x : points) {
    const OperatorEval e = evalI(u, x, mu, s, ctx.common.tol);
    Json row = toJson(e);
    row["x"] = toJson(x);
    if (expected) {
      const bool ok = std::abs(e.value - *expected) <= e.budget() + ctx.common.tol.absTol;
      row["withinBudget"] = ok;
      out.pass = out.pass && ok;
    }
    evals.push_back(row);
    rows.push_back({e.value, e.budget()});
  }
  out.report["result"] = Json{{"evaluations", evals}};
  out.csv = csvTable(points, {"value", "budget"}, rows);
  return out;
}

Outcome runLambda(Context& ctx) {
  Section root(ctx.config, "");
  const SpectralMeasure mu = parseMeasure(root.child("measure"), ctx.common.dimension);
  const NondegeneracyReport r = lambdaEstimate(mu, ctx.common.s);
  Outcome out;
  out.report["result"] = toJson(r);
  out.pass = !r.degenerate;
  return out;
}

Outcome runBarrier(Context& ctx) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const auto s = ctx.common.s;
  const SpectralMeasure mu = parseMeasure(root.child("measure"), n);
  const double gamma = barrierExponent(root.childOrEmpty("barrier"), s);
  const BarrierField b = buildBarrier(gamma, s, n);
  Outcome out;
  Json result{{"gamma", gamma}, {"hessianSup", b.hessianSup()}, {"propertiesHold", true}};
  try {
    result["certificate"] = toJson(certifyBarrier(b, mu, s, ctx.common.tol));
    out.pass = true;
  } catch (const CertificationFailure& e) {
    result["error"] = errorJson(e);
    out.pass = false;
  }
  out.report["result"] = result;
  return out;
}

Outcome runLemma(Context& ctx, LemmaId id) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const auto s = ctx.common.s;
  const SpectralMeasure mu = parseMeasure(root.child("measure"), n);
  Section lemma = root.childOrEmpty("lemma");
  const double gamma = barrierExponent(lemma, s);
  SampleSpec sample;
  const long points = lemma.integer("points", id == LemmaId::P3 ? 100 : 200);
  lemma.require(points >= 1 && points <= 100000, "points", "must lie in [1, 100000]");
  sample.points = static_cast<int>(points);
  sample.maxRadius = lemma.number("maxRadius", 1e3);
  lemma.require(sample.maxRadius >= 1.0, "maxRadius", "must be >= 1");
  sample.seed = ctx.common.seed;
  const ScalarField field = root.has("field")
                                ? parseField(root.child("field"), n, s, ctx.common.seed)
                                : buildBarrier(gamma, s, n).field();
  const LemmaReport r = verifyLemma(id, field, gamma, mu, s, sample, ctx.common.tol);
  Outcome out;
  out.report["result"] = toJson(r);
  out.pass = r.pass;
  return out;
}

Outcome runReplay(Context& ctx, std::optional<Side> side) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const auto s = ctx.common.s;
  const SpectralMeasure mu = parseMeasure(root.child("measure"), n);
  const ScalarField u = parseField(root.child("field"), n, s, ctx.common.seed);
  const Nonlinearity f = parseNonlinearity(root.child("nonlinearity"));
  Section rp = root.childOrEmpty("replay");
  rp.setDefault("x0", std::vector<double>(static_cast<std::size_t>(n), 0.0));
  const Vec x0 = rp.vector("x0", n);
  ReplayOptions options;
  options.tolerance = ctx.common.tol;
  options.epsilonSchedule = rp.numbers("epsilonSchedule", options.epsilonSchedule);
  rp.require(!options.epsilonSchedule.empty(), "epsilonSchedule", "must be nonempty");
  for (std::size_t i = 0; i < options.epsilonSchedule.size(); ++i) {
    const bool ok = options.epsilonSchedule[i] > 0.0 &&
                    (i == 0 || options.epsilonSchedule[i] < options.epsilonSchedule[i - 1]);
    rp.require(ok, "epsilonSchedule/" + std::to_string(i),
               "epsilon values must be positive and strictly decreasing");
  }
  options.residual = rp.number("residual", 0.0);
  rp.require(options.residual >= 0.0, "residual", "must be >= 0");
  if (rp.has("certifiedC")) {
    options.certifiedC = rp.number("certifiedC");
    rp.require(*options.certifiedC >= 0.0, "certifiedC", "must be >= 0");
  }
  Section search = rp.childOrEmpty("search");
  const long ppa = search.integer("pointsPerAxis", 0);
  search.require(ppa == 0 || (ppa >= 3 && ppa <= 100001), "pointsPerAxis",
                 "must be 0 (automatic) or in [3, 100001]");
  options.search.pointsPerAxis = static_cast<int>(ppa);
  options.search.fineRadius = search.number("fineRadius", 1e-3);
  search.require(options.search.fineRadius > 0.0, "fineRadius", "must be > 0");
  const long keep = search.integer("keep", 3);
  search.require(keep >= 1 && keep <= 64, "keep", "must lie in [1, 64]");
  options.search.keep = static_cast<int>(keep);
  const double kappa = u.growth().kappa;
  if (!(kappa < s.order())) {
    throw ConfigError("/field", "growth exponent must satisfy kappa ∈ [0, 2s); got kappa = " +
                                    formatNumber(kappa));
  }

  const std::vector<ReplayReport> reports =
      side ? oneSidedReplay(u, f, mu, s, x0, *side, options) : replay(u, f, mu, s, x0, options);
  Outcome out;
  out.pass = true;
  Json list = Json::array();
  for (const ReplayReport& r : reports) {
    list.push_back(toJson(r));
    out.pass = out.pass && r.consistent;
  }
  Json result{{"reports", list}};
  if (side) result["side"] = *side == Side::Upper ? "upper" : "lower";
  out.report["result"] = result;
  return out;
}

Outcome runFlow(Context& ctx) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const auto s = ctx.common.s;
  const SpectralMeasure mu = parseMeasure(root.child("measure"), n);
  const Nonlinearity f = parseNonlinearity(root.child("nonlinearity"));
  Section fl = root.childOrEmpty("flow");
  const long N = fl.integer("gridSize", 64);
  fl.require(N >= 2 && N <= 4096 && N % 2 == 0, "gridSize", "must be even and in [2, 4096]");
  const double L = fl.number("boxLength", 8.0 * std::numbers::pi);
  fl.require(L > 0.0, "boxLength", "must be > 0");
  FlowOptions options;
  options.dt = fl.number("dt", 0.02);
  fl.require(options.dt > 0.0, "dt", "must be > 0");
  options.steps = fl.integer("steps", 300000);
  fl.require(options.steps >= 0, "steps", "must be >= 0");
  const long window = fl.integer("window", 100);
  fl.require(window >= 1, "window", "must be >= 1");
  options.window = static_cast<int>(window);
  const double oscTol = fl.number("oscillationTol", 1e-4);
  const double limitTol = fl.number("limitTol", 1e-6);

  auto initial = [&] {
    if (fl.has("initial")) {
      const ScalarField u0 = parseField(fl.child("initial"), n, s, ctx.common.seed);
      return PeriodicGrid::sample(u0, n, static_cast<int>(N), L);
    }
    const long maxMode = fl.integer("maxMode", 4);
    fl.require(maxMode >= 1 && 2 * maxMode < N, "maxMode", "must lie in [1, gridSize/2)");
    return randomSmoothGrid(n, static_cast<int>(N), L, ctx.common.seed,
                            static_cast<int>(maxMode));
  };
  const PeriodicGrid grid = initial();
  const double bound = 1.0 / (SpectralOperator(n, static_cast<int>(N), L, multiplier(mu, s))
                                  .maxSymbol() +
                              f.lipschitz(grid.min(), grid.max()));
  fl.require(options.dt <= bound, "dt",
             "time step exceeds the stability bound " + formatNumber(bound));

  Outcome out;
  try {
    const FlowReport r = periodicFlow(grid, f, mu, s, options);
    Json result = toJson(r);
    out.pass = r.monotoneOscillation && r.finalOscillation <= oscTol &&
               std::abs(r.fAtLimit) <= limitTol;
    out.report["result"] = result;
    std::vector<Vec> points;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.finalValues.size(); ++i) {
      points.push_back(grid.point(i));
      rows.push_back({r.finalValues[i]});
    }
    out.csv = csvTable(points, {"value"}, rows);
  } catch (const StabilityError& e) {
    out.report["result"] = Json{{"error", errorJson(e)}};
    out.pass = false;
  }
  return out;
}

Outcome runClassify(Context& ctx) {
  Section root(ctx.config, "");
  const int n = ctx.common.dimension;
  const ScalarField u = parseField(root.child("field"), n, ctx.common.s, ctx.common.seed);
  Section cl = root.childOrEmpty("classify");
  const double kappa = cl.number("kappa", u.growth().kappa);
  cl.require(kappa >= 0.0, "kappa", "must be >= 0");
  const Classification c = classifySolution(u, kappa, ctx.common.seed);
  Outcome out;
  out.report["result"] = toJson(c);
  out.pass = !c.inconsistentWithKappa;
  return out;
}

}  // namespace

std::string commandName(Command command) {
  switch (command) {
    case Command::Eval: return "eval";
    case Command::Lambda: return "lambda";
    case Command::Barrier: return "barrier";
    case Command::Lemma: return "lemma";
    case Command::Replay: return "replay";
    case Command::OneSided: return "one-sided";
    case Command::Flow: return "flow";
    case Command::Classify: return "classify";
  }
  return "?";
}

Outcome execute(const Invocation& inv) {
  Context ctx = prepare(inv);
  Outcome out;
  Json options = Json::object();
  try {
    switch (inv.command) {
      case Command::Eval: out = runEval(ctx); break;
      case Command::Lambda: out = runLambda(ctx); break;
      case Command::Barrier: out = runBarrier(ctx); break;
      case Command::Lemma:
        if (!inv.lemma) throw ConfigError("", "lemma needs --id P1|P2|P3");
        options["id"] = toString(*inv.lemma);
        out = runLemma(ctx, *inv.lemma);
        break;
      case Command::Replay: out = runReplay(ctx, std::nullopt); break;
      case Command::OneSided:
        if (!inv.side || *inv.side == Side::Both) {
          throw ConfigError("", "one-sided needs --side upper|lower");
        }
        options["side"] = *inv.side == Side::Upper ? "upper" : "lower";
        out = runReplay(ctx, inv.side);
        break;
      case Command::Flow: out = runFlow(ctx); break;
      case Command::Classify: out = runClassify(ctx); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError&) {
    throw;
  } catch (const Error& e) {
    out.report["result"] = Json{{"error", errorJson(e)}};
    out.pass = false;
  }
  Json report{{"schemaVersion", kSchemaVersion},
              {"version", kVersion},
              {"command", commandName(inv.command)},
              {"options", options},
              {"config", ctx.config},
              {"result", out.report["result"]},
              {"pass", out.pass}};
  out.report = std::move(report);
  return out;
}

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical front-end for anisotropic nonlocal operators"};
  app.require_subcommand(1);
  std::string configPath;
  std::string outDir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string lemmaId;
  std::string side;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", configPath, "JSON config file")->required();
    sub->add_option("--out", outDir, "Directory for report.json and sweep.csv");
    sub->add_option("--seed", seed, "Overrides the config seed");
    sub->add_option("--tol", tol, "Overrides the absolute and relative tolerance");
  };
  std::map<CLI::App*, Command> commands;
  auto add = [&](Command c, const std::string& help) {
    CLI::App* sub = app.add_subcommand(commandName(c), help);
    common(sub);
    commands[sub] = c;
    return sub;
  };
  add(Command::Eval, "Evaluate I u at points or along a sweep");
  add(Command::Lambda, "Nondegeneracy constants of the measure");
  add(Command::Barrier, "Build and certify the barrier");
  add(Command::Lemma, "Verify one barrier lemma bound")
      ->add_option("--id", lemmaId, "P1, P2 or P3")
      ->required()
      ->check(CLI::IsMember({"P1", "P2", "P3"}));
  add(Command::Replay, "Replay the two-sided comparison argument");
  add(Command::OneSided, "Replay one branch of the comparison argument")
      ->add_option("--side", side, "upper or lower")
      ->required()
      ->check(CLI::IsMember({"upper", "lower"}));
  add(Command::Flow, "Run the periodic flow u_t = I u - f(u)");
  add(Command::Classify, "Classify a field as constant, affine or neither");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  Invocation inv;
  for (const auto& [sub, c] : commands) {
    if (sub->parsed()) inv.command = c;
  }
  inv.seed = seed;
  inv.tol = tol;
  if (!lemmaId.empty()) inv.lemma = parseLemmaId(lemmaId);
  if (!side.empty()) inv.side = side == "upper" ? Side::Upper : Side::Lower;

  Outcome outcome;
  try {
    std::ifstream in(configPath);
    if (!in) {
      err << "error: cannot read config file " << configPath << '\n';
      return 2;
    }
    inv.config = Json::parse(in);
    outcome = execute(inv);
  } catch (const Json::parse_error& e) {
    err << "error: " << configPath << ": " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  const std::filesystem::path dir(outDir);
  {
    std::ofstream report(dir / "report.json", std::ios::binary);
    report << outcome.report.dump(2) << '\n';
    if (!report) {
      err << "error: cannot write " << (dir / "report.json").string() << '\n';
      return 2;
    }
  }
  if (!outcome.csv.empty()) {
    std::ofstream csv(dir / "sweep.csv", std::ios::binary);
    csv << outcome.csv;
  }
  out << commandName(inv.command) << ": " << (outcome.pass ? "PASS" : "FAIL") << " ("
      << (dir / "report.json").string() << ")\n";
  return outcome.pass ? 0 : 1;
}

}  // namespace nonlocal::cli
