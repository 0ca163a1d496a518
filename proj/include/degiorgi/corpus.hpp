#pragma once

#include <memory>

#include "degiorgi/fem.hpp"
#include "degiorgi/report.hpp"

namespace degiorgi {

/// Corpus generation config: which media, which boundary data, which shifts.
struct CorpusConfig {
  struct CoefCase {
    CoefficientKind kind = CoefficientKind::Identity;
    double lambda = 1, Lambda = 1;
    std::uint64_t seed = 0;
  };
  std::vector<CoefCase> coefficients;
  std::vector<std::string> boundaries;
  std::vector<std::string> truncated_boundaries;  // data whose solutions get shifted cuts
  std::vector<double> shifts;
  double solver_tol = 1e-10;
  double cert_solution_threshold = 1e-6;
  double cert_subsolution_threshold = 0.5;

  static CorpusConfig defaults(std::uint64_t seed) {
    CorpusConfig c;
    c.coefficients = {
        {CoefficientKind::Identity, 1, 1, 0},
        {CoefficientKind::Checkerboard, 1, 10, 0},
        {CoefficientKind::Checkerboard, 1, 100, 0},
        {CoefficientKind::RandomRotation, 1, 10, seed},
        {CoefficientKind::RandomRotation, 1, 100, seed + 1},
    };
    c.boundaries = {"x1", "x1x2", "quad", "affine"};
    c.truncated_boundaries = {"x1", "quad"};
    c.shifts = {0.3};
    return c;
  }
};

struct CorpusMember {
  CorpusMember(std::string id_, ScalarField u_,
               std::shared_ptr<const CoefficientField> coef_, Mode mode_,
               Certificate cert_)
      : id(std::move(id_)),
        u(std::move(u_)),
        coef(std::move(coef_)),
        mode(mode_),
        cert(cert_) {}

  std::string id;
  ScalarField u;
  std::shared_ptr<const CoefficientField> coef;
  Mode mode = Mode::Subsolution;
  Certificate cert;
  // provenance
  std::string kind;
  std::string boundary;
  double lambda = 1, Lambda = 1;
  std::uint64_t seed = 0;
  double shift = 0;
  std::string derivation;  // "solve" | "positive-part" | "truncate-shift"

  bool is_solution() const { return mode == Mode::Solution; }
  ReportInputs report_inputs() const {
    return ReportInputs{id,
                        kind + "-" + io_label(lambda) + "-" + io_label(Lambda),
                        u.domain().h(),
                        u.domain().dim(),
                        lambda,
                        Lambda};
  }
  static std::string io_label(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && (s.back() == '0')) s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Json manifest_entry() const {
    return Json{{"id", id},
                {"kind", kind},
                {"lambda", lambda},
                {"Lambda", Lambda},
                {"seed", seed},
                {"boundary", boundary},
                {"shift", shift},
                {"mode", to_string(mode)},
                {"residual", cert.residual}};
  }
};

struct Corpus {
  DomainPtr domain;
  std::vector<CorpusMember> members;
  std::vector<std::shared_ptr<const CoefficientField>> coefficients;

  Json manifest() const {
    Json arr = Json::array();
    for (const auto& m : members) arr.push_back(m.manifest_entry());
    return arr;
  }
  bool all_certified() const {
    for (const auto& m : members)
      if (!m.cert.ok()) return false;
    return true;
  }
};

/// Solves each (medium, boundary) case and emits the solution, its positive
/// part, and shifted truncations, each certified by its weak residual in the
/// claimed mode.
inline Corpus generate_corpus(const DomainPtr& domain, const CorpusConfig& cfg) {
  Corpus out;
  out.domain = domain;
  for (const auto& cc : cfg.coefficients) {
    auto coef = std::make_shared<const CoefficientField>(
        make_coefficients(domain, cc.kind, cc.lambda, cc.Lambda, cc.seed));
    out.coefficients.push_back(coef);
    const fem::AssembledSystem sys = fem::assemble(*coef);
    const std::string coef_tag = to_string(cc.kind) + "-" +
                                 CorpusMember::io_label(cc.lambda) + "-" +
                                 CorpusMember::io_label(cc.Lambda);
    for (const std::string& bname : cfg.boundaries) {
      WeakProblem p{coef.get(), boundary_function(bname), cfg.solver_tol};
      ScalarField u = solve(p, nullptr, &sys);

      CorpusMember sol("sol-" + coef_tag + "-" + bname, u, coef, Mode::Solution,
                       {Mode::Solution, weak_residual(u, *coef, Mode::Solution, &sys),
                        cfg.cert_solution_threshold});
      sol.kind = to_string(cc.kind);
      sol.boundary = bname;
      sol.lambda = cc.lambda;
      sol.Lambda = cc.Lambda;
      sol.seed = cc.seed;
      sol.derivation = "solve";

      CorpusMember pos = sol;
      pos.id = "pos-" + coef_tag + "-" + bname;
      pos.u = positive_part(u);
      pos.mode = Mode::Subsolution;
      pos.cert = {Mode::Subsolution,
                  weak_residual(pos.u, *coef, Mode::Subsolution, &sys),
                  cfg.cert_subsolution_threshold};
      pos.derivation = "positive-part";

      const bool truncate =
          std::find(cfg.truncated_boundaries.begin(), cfg.truncated_boundaries.end(),
                    bname) != cfg.truncated_boundaries.end();
      if (truncate) {
        for (double c : cfg.shifts) {
          CorpusMember tr = sol;
          tr.id = "trunc-" + coef_tag + "-" + bname + "-c" + CorpusMember::io_label(c);
          tr.u = truncate_shift(u, c);
          tr.mode = Mode::Subsolution;
          tr.cert = {Mode::Subsolution,
                     weak_residual(tr.u, *coef, Mode::Subsolution, &sys),
                     cfg.cert_subsolution_threshold};
          tr.shift = c;
          tr.derivation = "truncate-shift";
          out.members.push_back(std::move(tr));
        }
      }
      out.members.push_back(std::move(sol));
      out.members.push_back(std::move(pos));
    }
  }

  // Two extra truncations so the shifted family also covers the remaining
  // boundary shapes.
  auto add_extra = [&](const std::string& kind, double Lam, const std::string& bname,
                       double c) {
    for (const auto& m : out.members)
      if (m.derivation == "solve" && m.kind == kind && m.Lambda == Lam &&
          m.boundary == bname) {
        CorpusMember tr = m;
        tr.id = "trunc-" + kind + "-" + CorpusMember::io_label(m.lambda) + "-" +
                CorpusMember::io_label(Lam) + "-" + bname + "-c" +
                CorpusMember::io_label(c);
        tr.u = truncate_shift(m.u, c);
        tr.mode = Mode::Subsolution;
        tr.cert = {Mode::Subsolution, weak_residual(tr.u, *tr.coef, Mode::Subsolution),
                   cfg.cert_subsolution_threshold};
        tr.shift = c;
        tr.derivation = "truncate-shift";
        out.members.push_back(std::move(tr));
        return;
      }
  };
  add_extra("identity", 1, "x1x2", 0.3);
  add_extra("checkerboard", 100, "affine", 0.3);
  return out;
}

}  // namespace degiorgi
