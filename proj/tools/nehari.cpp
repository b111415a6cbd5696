// nehari: command-line front end.
//
//   nehari fiber|extremal|solve|sweep|verify --config PATH [--out DIR] [--seed N]
//          [--lambda X] [--branch plus|minus] [--format json|csv]
//
// Exit codes: 0 ok, 1 verify found failures, 2 malformed config or usage,
// 3 hypothesis violated, 4 numeric failure, 5 I/O failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nehari/config.hpp"
#include "nehari/error.hpp"
#include "nehari/field_io.hpp"
#include "nehari/format.hpp"
#include "nehari/report.hpp"
#include "nehari/suite.hpp"

namespace fs = std::filesystem;
using namespace nehari;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::string> branch;
  std::string format = "json";
};

struct Context {
  RunConfig cfg;
  Flags flags;
  fs::path out;
  bool csv() const { return flags.format == "csv"; }
};

Json config_echo(const RunConfig& cfg) {
  Json j = config_to_json(cfg);
  if (j.contains("run")) j["run"].erase("out");
  return j;
}

void emit(const Context& ctx, const std::string& stem, const Json& doc, std::string_view schema_name,
          const std::string& csv) {
  if (ctx.csv()) {
    write_text_file(ctx.out / (stem + ".csv"), csv);
  } else {
    require_schema(doc, schema_name);
    write_text_file(ctx.out / (stem + ".json"), dump_json(doc));
  }
}

// Writes u and v with sidecars; returns the file names relative to the output directory.
Json write_pair(const Context& ctx, const std::string& stem, const FieldPair& z, const Json& provenance) {
  Json files;
  for (auto [name, f] : {std::pair{"u", &z.u}, std::pair{"v", &z.v}}) {
    const std::string file = stem + "_" + name + ".bin";
    write_field_binary(ctx.out / file, *f);
    Json prov = provenance;
    prov["component"] = name;
    write_field_sidecar(ctx.out / (stem + "_" + name + ".json"), *f, prov);
    if (ctx.csv() && f->grid->spec().dim == 1) write_field_csv(ctx.out / (stem + "_" + name + ".csv"), *f);
    files[name] = file;
  }
  return files;
}

int run_fiber(Context& ctx) {
  const FiberCoefficients& c = ctx.cfg.fiber;
  c.validate();
  std::vector<double> levels = ctx.cfg.fiber_levels;
  if (ctx.flags.lambda) levels = {*ctx.flags.lambda};

  CriticalPoints cp;
  cp.t_n = critical_point(c, FiberKind::nehari);
  cp.t_e = critical_point(c, FiberKind::energy);
  cp.lambda_n = lambda_peak(c, FiberKind::nehari);
  cp.lambda_e = lambda_peak(c, FiberKind::energy);
  std::vector<std::pair<double, LevelRoots>> roots;
  for (double l : levels) roots.emplace_back(l, roots_at_level(c, l));

  Json doc;
  doc["command"] = "fiber";
  doc["coefficients"] = to_json(c);
  doc["critical_points"] = to_json(cp);
  doc["closed_forms"] = c.p == c.q ? to_json(closed_forms_pq(c)) : Json(nullptr);
  doc["levels"] = Json::array();
  for (const auto& [l, r] : roots) doc["levels"].push_back(to_json(l, r));
  emit(ctx, "fiber", doc, "fiber", level_roots_csv(cp, roots));

  std::cout << "t_n = " << format_double(cp.t_n) << "  Lambda_n = " << format_double(cp.lambda_n) << '\n'
            << "t_e = " << format_double(cp.t_e) << "  Lambda_e = " << format_double(cp.lambda_e) << '\n';
  for (const auto& [l, r] : roots) {
    std::cout << "lambda = " << format_double(l) << ": ";
    if (r.empty) std::cout << "no roots\n";
    else
      std::cout << "t+ = " << format_double(r.t_plus) << "  t- = " << format_double(r.t_minus)
                << (r.degenerate ? "  (degenerate)" : "") << '\n';
  }
  return 0;
}

int run_extremal(Context& ctx) {
  const Problem prob = Problem::build(ctx.cfg.problem);
  const TrialFamily fam = ctx.cfg.trial_family();
  const ExtremalOptions eo = ctx.cfg.extremal_options();
  std::vector<ExtremalEstimate> est{estimate_extremal(prob, fam, ExtremalKind::star, eo),
                                    estimate_extremal(prob, fam, ExtremalKind::sub, eo)};

  std::vector<FieldPair> samples{est[0].argmin, est[1].argmin};
  for (int m = 0; m < fam.count; ++m) samples.push_back(fam.member(prob, m, fam.initial_params(prob, m)));
  EmbeddingEstimate emb;
  emb.r = ctx.cfg.problem.eta();
  emb.lower = embedding_constant_lb(prob, emb.r, samples);
  emb.certified = embedding_constant_certified(prob, emb.r);
  emb.safety_factor = ctx.cfg.safety_factor;

  Json doc;
  doc["command"] = "extremal";
  doc["family"] = Json{{"descriptor", fam.descriptor()},
                       {"kind", std::string(to_string(fam.kind))},
                       {"count", fam.count},
                       {"restarts", ctx.cfg.family.restarts},
                       {"polish", ctx.cfg.family.polish}};
  doc["estimates"] = Json::array();
  for (const auto& e : est) {
    Json j = to_json(e);
    const Json prov{{"command", "extremal"}, {"kind", std::string(to_string(e.kind))}, {"value", e.value}};
    j["argmin"] = write_pair(ctx, "extremal_" + std::string(to_string(e.kind)), e.argmin, prov);
    doc["estimates"].push_back(j);
  }
  doc["embedding"] = to_json(emb);
  doc["bounds"] = Json{{"certified", to_json(diagnostic_bounds(prob, emb.certified))},
                       {"safety", to_json(diagnostic_bounds(prob, emb.safety()))}};
  emit(ctx, "extremal", doc, "extremal", members_csv(est));

  std::cout << "lambda^* estimate (upper bound) = " << format_double(est[0].value) << '\n'
            << "lambda_* estimate (upper bound) = " << format_double(est[1].value) << '\n'
            << "S_" << format_double(emb.r) << ": sampled " << format_double(emb.lower) << ", certified "
            << format_double(emb.certified) << '\n';
  return 0;
}

int run_solve(Context& ctx) {
  const Problem prob = Problem::build(ctx.cfg.problem);
  const double lambda = ctx.cfg.problem.lambda;
  std::vector<Branch> branches{Branch::plus, Branch::minus};
  if (ctx.flags.branch) branches = {branch_from(*ctx.flags.branch)};

  const SolverOptions opts = ctx.cfg.solver_options();
  VerifyOptions vo;
  vo.battery_size = opts.battery_size;
  vo.battery_random = opts.battery_random;
  vo.seed = opts.seed;
  vo.tol_residual = opts.tol_residual;
  vo.bounds = diagnostic_bounds(prob, embedding_constant_certified(prob, ctx.cfg.problem.eta()));
  const FieldPair init = default_initial_pair(prob);

  Json doc;
  doc["command"] = "solve";
  doc["lambda"] = lambda;
  doc["solutions"] = Json::array();
  std::string csv = "branch,lambda,energy,d1,d2,A,B,P,Q,class,tol,residual,iterations,newton_steps,converged\n";
  for (Branch b : branches) {
    const NehariSolution sol = minimize_branch(prob, b, init, lambda, opts);
    const std::string name(to_string(b));
    Json j = to_json(sol);
    j["verify"] = Json::array();
    for (const auto& c : verify_solution(prob, sol, vo).checks) j["verify"].push_back(to_json(c));
    j["files"] = write_pair(ctx, "solution_" + name, sol.pair,
                            Json{{"command", "solve"}, {"branch", name}, {"lambda", lambda},
                                 {"energy", sol.energy}, {"seed", ctx.cfg.seed}});
    doc["solutions"].push_back(j);
    const auto& s = sol.breakdown.summary;
    csv += name + ',' + format_double(lambda) + ',' + format_double(sol.energy) + ',' +
           format_double(sol.breakdown.d1) + ',' + format_double(sol.breakdown.d2) + ',' + format_double(s.A) +
           ',' + format_double(s.B) + ',' + format_double(s.P) + ',' + format_double(s.Q) + ',' +
           std::string(to_string(sol.classification.tag)) + ',' + format_double(sol.classification.tol) + ',' +
           format_double(sol.residual) + ',' + std::to_string(sol.iterations) + ',' +
           std::to_string(sol.newton_steps) + ',' + (sol.converged ? "1" : "0") + '\n';
    std::cout << name << ": energy = " << format_double(sol.energy) << "  residual = " << format_double(sol.residual)
              << "  class = " << to_string(sol.classification.tag) << '\n';
  }
  emit(ctx, "solve", doc, "solve", csv);
  return 0;
}

int run_sweep(Context& ctx) {
  const Problem prob = Problem::build(ctx.cfg.problem);
  const ExtremalEstimate star =
      estimate_extremal(prob, ctx.cfg.trial_family(), ExtremalKind::star, ctx.cfg.extremal_options());
  std::vector<double> lambdas;
  for (int i = 1; i <= ctx.cfg.sweep_points; ++i)
    lambdas.push_back(ctx.cfg.sweep_fraction * star.value * i / ctx.cfg.sweep_points);
  SolverOptions opts = ctx.cfg.solver_options();
  opts.lambda_star_hint = star.value;
  const SweepReport rep = sweep(prob, lambdas, default_initial_pair(prob), opts, star.argmin);

  Json doc;
  doc["command"] = "sweep";
  doc["lambda_star_est"] = star.value;
  doc["fraction"] = ctx.cfg.sweep_fraction;
  doc["rows"] = Json::array();
  for (const auto& r : rep.rows) doc["rows"].push_back(to_json(r));
  doc["checks"] = Json{{"plus_nonincreasing", rep.plus_nonincreasing()},
                       {"minus_nonincreasing", rep.minus_nonincreasing()},
                       {"no_zero_below", rep.no_zero_below(0.99 * star.value)},
                       {"frozen_scales_monotone", rep.frozen_scales_monotone()},
                       {"all_ok", rep.all_ok()}};
  emit(ctx, "sweep", doc, "sweep", sweep_csv(rep.rows));

  std::cout << "lambda^* estimate = " << format_double(star.value) << '\n';
  for (const auto& r : rep.rows)
    std::cout << "lambda = " << format_double(r.lambda) << "  C+ = " << (r.ok_plus ? format_double(r.c_plus) : "failed")
              << "  C- = " << (r.ok_minus ? format_double(r.c_minus) : "failed") << '\n';
  return 0;
}

int run_verify(Context& ctx) {
  InvariantSuite suite(ctx.cfg);
  const std::vector<SuiteCheck> checks = suite.run_all();
  int failures = 0;
  Json list = Json::array();
  std::string csv = "suite,name,passed,value,threshold\n";
  for (const auto& c : checks) {
    if (!c.passed) ++failures;
    list.push_back(to_json(c));
    csv += c.suite + ',' + c.name + ',' + (c.passed ? "1" : "0") + ',' + format_double(c.value) + ',' +
           format_double(c.threshold) + '\n';
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << "  " << format_double(c.value)
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
  }
  Json doc;
  doc["command"] = "verify";
  doc["seed"] = ctx.cfg.seed;
  doc["samples"] = ctx.cfg.verify_samples;
  doc["passed"] = failures == 0;
  doc["failures"] = failures;
  doc["estimates"] = suite.estimates_json();
  doc["config"] = config_echo(ctx.cfg);
  doc["checks"] = list;
  emit(ctx, "verify", doc, "verify", csv);
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nehari-manifold solver for fractional singular elliptic systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "Run configuration (key = value text or JSON)")->required();
  app.add_option("--out", flags.out, "Output directory (overrides run.out)");
  app.add_option("--seed", flags.seed, "Random seed (overrides run.seed)");
  app.add_option("--lambda", flags.lambda, "Override problem.lambda (fiber: the level to solve for)");
  app.add_option("--branch", flags.branch, "Restrict solve to one branch")->check(CLI::IsMember({"plus", "minus"}));
  app.add_option("--format", flags.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  int (*action)(Context&) = nullptr;
  app.add_subcommand("fiber", "Critical points and level roots of the fiber maps")->callback([&] { action = run_fiber; });
  app.add_subcommand("extremal", "Estimate lambda^* and lambda_* over the trial family")->callback([&] {
    action = run_extremal;
  });
  app.add_subcommand("solve", "Minimize on both Nehari branches at problem.lambda")->callback([&] {
    action = run_solve;
  });
  app.add_subcommand("sweep", "Continuation in lambda below lambda^*")->callback([&] { action = run_sweep; });
  app.add_subcommand("verify", "Run the invariant suite")->callback([&] { action = run_verify; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    ctx.flags = flags;
    ctx.cfg = load_config(flags.config);
    if (flags.out) ctx.cfg.out_dir = *flags.out;
    if (flags.seed) ctx.cfg.seed = *flags.seed;
    if (flags.lambda) ctx.cfg.problem.lambda = *flags.lambda;
    validate_run_config(ctx.cfg);
    ctx.out = ctx.cfg.out_dir;
    ensure_directory(ctx.out);
    return action(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 5;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
