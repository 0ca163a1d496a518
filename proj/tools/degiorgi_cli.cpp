// Command-line front end: solve problems, run verification groups, print the
// constants ledgers, and run the shadow-optimality and Hoelder pipelines.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

#include "degiorgi/suite.hpp"

namespace fs = std::filesystem;
using namespace degiorgi;

namespace {

struct CommonOpts {
  std::string config_file;
  int n = -1;
  double h = -1;
  double lambda = -1, Lambda = -1;
  std::int64_t seed = -1;
  int directions = -1;
  double sobolev_s = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->set_help_flag("--help", "print help and exit");  // frees -h for --h
  cmd->add_option("--config", o.config_file, "JSON run-config file (flags override it)");
  cmd->add_option("--n", o.n, "dimension (2 or 3)");
  cmd->add_option("--h", o.h, "mesh width");
  cmd->add_option("--lambda", o.lambda, "lower ellipticity bound");
  cmd->add_option("--Lambda", o.Lambda, "upper ellipticity bound");
  cmd->add_option("--seed", o.seed, "base seed for all randomness");
  cmd->add_option("--directions", o.directions, "spherical direction sample size");
  cmd->add_option("--sobolev-s", o.sobolev_s, "override the Sobolev constant S");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig build_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_file.empty())
    cfg = RunConfig::from_json(Json::parse(io::read_text(o.config_file)));
  if (o.n > 0) cfg.n = o.n;
  if (o.h > 0) cfg.h = o.h;
  if (o.lambda > 0 || o.Lambda > 0) {
    const double lam = o.lambda > 0 ? o.lambda : 1.0;
    const double Lam = o.Lambda > 0 ? o.Lambda : lam;
    cfg.ellipticity = {{lam, Lam}};
    cfg.kinds = lam == Lam ? std::vector<std::string>{"identity"}
                           : std::vector<std::string>{"checkerboard", "random-rotation"};
  }
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.directions > 0) cfg.directions = o.directions;
  if (o.sobolev_s > 0) cfg.sobolev_s = o.sobolev_s;
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

int cmd_constants(const CommonOpts& o) {
  const int n = o.n > 0 ? o.n : 2;
  const double lam = o.lambda > 0 ? o.lambda : 1.0;
  const double Lam = o.Lambda > 0 ? o.Lambda : lam;
  const double p = default_sobolev_exponent(n);
  const double S = o.sobolev_s > 0 ? o.sobolev_s : cone_sobolev_bound(n, p);
  const ConstantsLedger L = ConstantsLedger::make(n, lam, Lam, S, p);
  const OscillationLedger O = OscillationLedger::from(L);
  std::printf("n       = %d\nlambda  = %g\nLambda  = %g\n", n, lam, Lam);
  std::printf("S       = %.12g%s\n", S,
              o.sobolev_s > 0 ? "  (override)" : "  (analytic cone lower bound)");
  std::printf("p       = %g\n", L.p);
  std::printf("C1      = %.12g\n", L.c1());
  std::printf("C2      = %.12g\n", L.c2());
  std::printf("A       = %.12g%s\n", L.shift_a(),
              L.shift_a_is_closed_form() ? "" : "  (re-derived for n = 2, exponent p)");
  std::printf("eps0    = %.12g\n", O.eps0);
  std::printf("eps1    = %.12g\n", O.eps1);
  std::printf("k0      = %.12g\n", O.k0);
  std::printf("gamma   = 1 - 2^(%.6g)  (float: %.17g)\n", O.log2_one_minus_gamma, O.gamma);
  std::printf("alpha   = 2^(%.6g)      (float: %.17g)\n", O.log2_alpha_theory,
              O.alpha_theory);
  return 0;
}

int cmd_solve(const CommonOpts& o, const std::string& kind, const std::string& boundary,
              double radius) {
  const int n = o.n > 0 ? o.n : 2;
  const double h = o.h > 0 ? o.h : (n == 3 ? 1.0 / 16 : 1.0 / 64);
  const double lam = o.lambda > 0 ? o.lambda : 1.0;
  const double Lam = o.Lambda > 0 ? o.Lambda : lam;
  const std::uint64_t seed = o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : 7;

  DomainPtr dom = BallDomain::make(n, radius, h);
  const CoefficientField coef =
      make_coefficients(dom, coefficient_kind_from_string(kind), lam, Lam, seed);
  WeakProblem p{&coef, boundary_function(boundary)};
  SolveStats stats;
  const ScalarField u = solve(p, &stats);
  const double resid = weak_residual(u, coef, Mode::Solution);
  std::printf("solved: %zu unknowns, %d iterations, relative residual %.3e\n",
              dom->cell_count(), stats.iterations, stats.rel_residual);
  std::printf("weak residual (solution mode): %.3e\n", resid);

  const fs::path out = o.out.empty() ? fs::path("out") : fs::path(o.out);
  fs::create_directories(out);
  io::dump_field(u, out / "solution");
  io::dump_coefficients(coef, out / "coefficients");
  io::write_json(out / "solve_report.json",
                 Json{{"n", n},
                      {"h", h},
                      {"radius", radius},
                      {"kind", kind},
                      {"lambda", lam},
                      {"Lambda", Lam},
                      {"seed", seed},
                      {"boundary", boundary},
                      {"iterations", stats.iterations},
                      {"solver_residual", stats.rel_residual},
                      {"weak_residual", resid}});
  std::printf("wrote %s/{solution.{json,csv},coefficients.{json,csv},solve_report.json}\n",
              out.string().c_str());
  return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& group) {
  RunConfig cfg = build_config(o);
  cfg.groups = group == "all" ? "all" : group;
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  const RunOutcome out = run_suite(cfg);
  int pass = 0, fail = 0, skip = 0;
  for (const auto& r : out.report.reports) {
    if (r.skipped) {
      ++skip;
      continue;
    }
    (r.pass ? pass : fail)++;
    if (!r.pass)
      std::printf("FAIL  %-40s %s %s\n", r.lemma_id.c_str(), r.inputs.field_id.c_str(),
                  r.note.c_str());
  }
  std::printf("%d passed, %d failed, %d skipped; report in %s/suite_report.json\n", pass,
              fail, skip, cfg.out_dir.c_str());
  return out.ok() ? 0 : 1;
}

int cmd_trees(const CommonOpts& o, double eps, double delta, bool scaling) {
  RunConfig cfg = build_config(o);
  cfg.n = 2;
  cfg.groups = "shadow";
  cfg.trees = true;
  cfg.trees_eps = eps;
  cfg.trees_delta = delta;
  cfg.trees_scaling = scaling;
  cfg.shadow_l2_cases = 0;
  cfg.shadow_shooting_cases = 0;
  cfg.shadow_oracle_cases = 0;
  cfg.shadow_minshadow_cases = 0;
  cfg.determinism_check = false;
  cfg.refinement_checks = false;
  cfg.boundaries = {"x1"};
  cfg.ellipticity = {{1, 1}};
  cfg.kinds = {"identity"};
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  const RunOutcome out = run_suite(cfg);
  for (const auto& r : out.report.reports)
    if (r.lemma_id.rfind("shadow.trees", 0) == 0)
      std::printf("%-28s %s  %s\n", r.lemma_id.c_str(), r.pass ? "PASS" : "FAIL",
                  r.extra.dump().c_str());
  // Dump the construction so the sets are inspectable.
  DomainPtr amb = BallDomain::make(2, 1.0, cfg.h);
  const TreesExample ex = build_trees_example(amb, eps, delta);
  io::dump_cellset(ex.e1, fs::path(cfg.out_dir) / "trees_e1");
  io::dump_cellset(ex.e2, fs::path(cfg.out_dir) / "trees_e2");
  return out.ok() ? 0 : 1;
}

int cmd_holder(const CommonOpts& o, const std::string& kind, const std::string& boundary) {
  const int n = o.n > 0 ? o.n : 2;
  const double h = o.h > 0 ? o.h : (n == 3 ? 1.0 / 16 : 1.0 / 64);
  const double lam = o.lambda > 0 ? o.lambda : 1.0;
  const double Lam = o.Lambda > 0 ? o.Lambda : 100.0;
  const std::uint64_t seed = o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : 7;

  DomainPtr dom = BallDomain::make(n, 2.0, h);
  const CoefficientField coef =
      make_coefficients(dom, coefficient_kind_from_string(kind), lam, Lam, seed);
  WeakProblem p{&coef, boundary_function(boundary)};
  const ScalarField u = solve(p);
  const Certificate cert{Mode::Solution, weak_residual(u, coef, Mode::Solution), 1e-6};

  const double pexp = default_sobolev_exponent(n);
  const double S = o.sobolev_s > 0 ? o.sobolev_s : cone_sobolev_bound(n, pexp);
  const ConstantsLedger L = ConstantsLedger::make(n, lam, Lam, S, pexp);
  const OscillationLedger OL = OscillationLedger::from(L);
  std::vector<double> radii;
  for (double r = 2.0; 2 * r / h >= 4.0 - 1e-12; r /= 2) radii.push_back(r);
  const HolderReport hr = holder_exponent(u, radii, OL, cert);
  std::printf("alpha_measured = %.6f  (fit error %.2e)\n", hr.alpha_measured,
              hr.fit_error);
  std::printf("alpha_theory   = 2^(%.6g)\n", OL.log2_alpha_theory);
  for (const auto& [r, osc] : hr.scales)
    std::printf("  radius %-8g osc %.6e\n", r, osc);
  std::printf("%s\n", hr.report.pass ? "PASS" : "FAIL");
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    io::write_json(fs::path(o.out) / "holder_report.json", hr.report.to_json());
  }
  return hr.report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification workbench for divergence-form elliptic equations on balls"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  CommonOpts opt;

  auto* c_solve = app.add_subcommand("solve", "solve one Dirichlet problem and dump it");
  std::string kind = "identity", boundary = "x1";
  double radius = 1.0;
  add_common(c_solve, opt);
  c_solve->add_option("--kind", kind, "identity|checkerboard|random-rotation");
  c_solve->add_option("--boundary", boundary, "one|x1|x2|x1x2|quad|cubic|affine");
  c_solve->add_option("--radius", radius, "ball radius");

  auto* c_verify = app.add_subcommand("verify", "run verification groups");
  std::string group = "all";
  add_common(c_verify, opt);
  c_verify->add_option("group", group, "energy|degiorgi|shadow|oscillation|all")
      ->check(CLI::IsMember({"energy", "degiorgi", "shadow", "oscillation", "all"}));

  auto* c_constants = app.add_subcommand("constants", "print the constants ledgers");
  add_common(c_constants, opt);

  auto* c_trees = app.add_subcommand("trees", "shadow-optimality example");
  double eps = 0.125, delta = 0.03125;
  bool no_scaling = false;
  add_common(c_trees, opt);
  c_trees->add_option("--eps", eps, "tree spacing (<= 1/8)");
  c_trees->add_option("--delta", delta, "tree diameter (< eps)");
  c_trees->add_flag("--no-scaling", no_scaling, "skip the delta-squared scaling run");

  auto* c_holder = app.add_subcommand("holder", "multiscale oscillation exponent");
  std::string hkind = "checkerboard", hboundary = "x1x2";
  add_common(c_holder, opt);
  c_holder->add_option("--kind", hkind, "coefficient kind");
  c_holder->add_option("--boundary", hboundary, "boundary data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_solve->parsed()) return cmd_solve(opt, kind, boundary, radius);
    if (c_verify->parsed()) return cmd_verify(opt, group);
    if (c_constants->parsed()) return cmd_constants(opt);
    if (c_trees->parsed()) return cmd_trees(opt, eps, delta, !no_scaling);
    if (c_holder->parsed()) return cmd_holder(opt, hkind, hboundary);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
