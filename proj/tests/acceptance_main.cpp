// Acceptance suite: runs the full default verification campaign and prints
// one pass/fail line per criterion. Exit status is nonzero when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>

#include "degiorgi/suite.hpp"

using namespace degiorgi;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gate {
  bool all_pass = true;
  int index = 0;

  void line(const std::string& name, bool pass, const std::string& detail) {
    ++index;
    std::printf("[criterion %2d] %s  %-34s %s\n", index, pass ? "PASS" : "FAIL",
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
};

struct ReportScan {
  int count = 0;
  int failed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
};

ReportScan scan(const SuiteReport& R, const std::string& prefix) {
  ReportScan s;
  for (const auto& r : R.reports) {
    if (r.lemma_id.rfind(prefix, 0) != 0) continue;
    if (r.skipped) continue;
    ++s.count;
    if (!r.pass) ++s.failed;
    if (std::isfinite(r.margin)) s.worst_margin = std::min(s.worst_margin, r.margin);
  }
  return s;
}

const LemmaReport* find(const SuiteReport& R, const std::string& id) {
  for (const auto& r : R.reports)
    if (r.lemma_id == id) return &r;
  return nullptr;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double group_seconds(const Json& timings, const char* key) {
  return timings.contains(key) ? timings[key].get<double>() / 1000.0 : 0.0;
}

}  // namespace

int main() {
  Gate gate;

  std::printf("== default campaign: n = 2, h = 1/64 ==\n");
  RunConfig cfg;  // stock defaults: n = 2, h = 1/64, full corpus
  const auto t0 = Clock::now();
  const RunOutcome out = run_suite(cfg);
  const double wall2d = seconds_since(t0);
  const SuiteReport& R = out.report;

  // 1. Solver convergence on B_1 with data x1, x1x2 (reproduced exactly) and
  //    the quadratic harmonic probe (genuine second-order ratio).
  {
    bool pass = true;
    std::string detail;
    double slowest = 0;
    for (const std::string d : {"x1", "x1x2", "quart"}) {
      const LemmaReport* r = find(R, "solver.convergence." + d);
      pass = pass && r && r->pass;
      if (r && r->extra.contains("exact"))
        detail += d + ":" +
                  (r->extra["exact"].get<bool>()
                       ? std::string("exact")
                       : fmt("ratio=%.2f", r->extra["ratio"].get<double>())) +
                  " ";
      // Per-case runtime, timed on a fresh run of the same case.
      const auto tcase = Clock::now();
      (void)detail::solver_convergence_case(cfg.n, cfg.h, d, cfg.solver_tol);
      slowest = std::max(slowest, seconds_since(tcase));
    }
    pass = pass && slowest < 10.0;
    gate.line("solver convergence", pass, detail + fmt("per-case %.1fs<10s", slowest));
  }

  // 2. Caccioppoli estimates across the whole corpus.
  {
    const ReportScan s = scan(R, "energy.caccioppoli");
    const LemmaReport* cert = find(R, "corpus.certification");
    const int members =
        cert ? cert->extra["members"].get<int>() : 0;
    const double tsec = group_seconds(out.timings, "energy");
    const bool pass = s.count > 0 && s.failed == 0 && members >= 50 && cert->pass &&
                      tsec < 120.0;
    gate.line("caccioppoli (corpus)", pass,
              fmt("%d checks, %d failed, corpus=%d members, energy group %.1fs<120s",
                  s.count, s.failed, members, tsec));
  }

  // 3. Sobolev gain with the estimated S; estimate stable under refinement;
  //    cone bound at least 0.38 for n = 2, p = 4.
  {
    const ReportScan s = scan(R, "energy.sobolev_gain");
    const LemmaReport* sc = find(R, "energy.sobolev_constant");
    const LemmaReport* st = find(R, "energy.sobolev_stability");
    const double cone =
        sc && sc->extra.contains("cone_closed_form")
            ? sc->extra["cone_closed_form"].get<double>()
            : 0.0;
    const bool pass = s.count > 0 && s.failed == 0 && sc && sc->pass && cone >= 0.38 &&
                      st && st->pass;
    gate.line("sobolev gain + constant", pass,
              fmt("%d checks, %d failed, cone=%.4f>=0.38", s.count, s.failed, cone));
  }

  // 4. Halving lemma at r = 1 and r = 1/2 with exact Chebyshev sub-checks.
  {
    const ReportScan s = scan(R, "degiorgi.halving");
    const bool pass = s.count > 0 && s.failed == 0;
    gate.line("halving lemma", pass, fmt("%d checks, %d failed", s.count, s.failed));
  }

  // 5. Dyadic iteration and the local maximum bound, both modes.
  {
    const ReportScan a = scan(R, "degiorgi.center_bound");
    const ReportScan b = scan(R, "degiorgi.local_max");
    const bool pass = a.count > 0 && b.count > 0 && a.failed == 0 && b.failed == 0;
    gate.line("iteration + max bound", pass,
              fmt("%d traces, %d sup-bound checks, %d failed", a.count, b.count,
                  a.failed + b.failed));
  }

  // 6. Shooting geometry campaigns and the exact-oracle comparison.
  {
    const ReportScan l2 = scan(R, "shadow.view_lower_bound");
    const ReportScan sh = scan(R, "shadow.shooting");
    const ReportScan orc = scan(R, "shadow.oracle");
    const double tsec = group_seconds(out.timings, "shadow");
    const bool pass = l2.count >= 20 && sh.count >= 10 && orc.count >= 10 &&
                      l2.failed + sh.failed + orc.failed == 0 && tsec < 60.0;
    gate.line("shooting geometry", pass,
              fmt("l2=%d shooting=%d oracle=%d, %d failed; shadow group %.1fs<60s",
                  l2.count, sh.count, orc.count, l2.failed + sh.failed + orc.failed,
                  tsec));
  }

  // 7. Shadow optimality: trees ratio in [1, 16] and delta^2 scaling.
  {
    const LemmaReport* opt = find(R, "shadow.trees_optimality");
    const LemmaReport* scl = find(R, "shadow.trees_scaling");
    const double ratio =
        opt && opt->extra.contains("ratio_vs_expected")
            ? opt->extra["ratio_vs_expected"].get<double>()
            : 0.0;
    const double expo = scl && scl->extra.contains("exponent")
                            ? scl->extra["exponent"].get<double>()
                            : 0.0;
    const bool pass = opt && opt->pass && scl && scl->pass;
    gate.line("shadow optimality (trees)", pass,
              fmt("ratio=%.2f in [1,16], scaling exponent=%.2f in 2+-0.3", ratio, expo));
  }

  // 8. Oscillation staircase and decay ratio under gamma.
  {
    const ReportScan s = scan(R, "oscillation.decay");
    const bool pass = s.count > 0 && s.failed == 0;
    gate.line("oscillation decay", pass,
              fmt("%d solutions, %d failed", s.count, s.failed));
  }

  // 9. Hoelder exponents: rough medium positive, linear data slope 1 +- 0.05.
  {
    const LemmaReport* rough = find(R, "oscillation.holder_exponent");
    const LemmaReport* lin = find(R, "oscillation.holder_linear");
    const double a_rough =
        rough && rough->extra.contains("alpha_measured")
            ? rough->extra["alpha_measured"].get<double>()
            : 0.0;
    const double a_lin = lin && lin->extra.contains("alpha_measured")
                             ? lin->extra["alpha_measured"].get<double>()
                             : 0.0;
    const bool pass = rough && rough->pass && a_rough > 0 && lin && lin->pass;
    gate.line("hoelder exponents", pass,
              fmt("rough alpha=%.3f>0, linear alpha=%.3f=1+-0.05", a_rough, a_lin));
  }

  // 10. Byte-identical reports for identical configs.
  {
    const LemmaReport* det = find(R, "harness.determinism");
    gate.line("determinism", det && det->pass,
              det ? det->note : std::string("missing report"));
  }

  const bool budget2d = wall2d < 300.0;
  gate.line("2d campaign wall clock", budget2d, fmt("%.1fs < 300s", wall2d));
  gate.line("2d campaign overall", R.overall_pass,
            fmt("%zu reports", R.reports.size()));

  // n = 3 smoke subset.
  std::printf("== smoke campaign: n = 3, h = 1/16 ==\n");
  RunConfig c3;
  c3.n = 3;
  c3.h = 1.0 / 16;
  c3.ellipticity = {{1, 1}, {1, 10}};
  c3.kinds = {"identity", "checkerboard"};
  c3.boundaries = {"x1", "x1x2"};
  c3.directions = 512;
  c3.sobolev_iterations = 60;
  c3.oscillation_levels = 2;
  c3.shadow_l2_cases = 6;
  c3.shadow_shooting_cases = 4;
  c3.shadow_oracle_cases = 0;  // the exact angular oracle is planar
  c3.shadow_minshadow_cases = 2;
  c3.minshadow_interior_probes = 256;
  c3.trees = false;  // planar construction
  c3.refinement_checks = false;
  c3.determinism_check = false;
  const auto t3 = Clock::now();
  const RunOutcome out3 = run_suite(c3);
  const double wall3d = seconds_since(t3);
  gate.line("3d smoke subset", out3.report.overall_pass && wall3d < 300.0,
            fmt("overall=%s, %.1fs < 300s", out3.report.overall_pass ? "pass" : "fail",
                wall3d));

  std::printf("%s\n", gate.all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
  return gate.all_pass ? 0 : 1;
}
