#pragma once

#include <optional>
#include <vector>

#include "degiorgi/energy.hpp"
#include "degiorgi/level_set.hpp"

namespace degiorgi {

/// One halving step: m, v = (u - A m)^+, and the verified inequality
/// (avg_{B_{r/2}} v^2)^{1/2} <= (1/2)(avg_{B_r} u^2)^{1/2}, together with the
/// exact discrete Chebyshev bound and the quarter-measure intermediate bound.
struct HalvingOutcome {
  LemmaReport report;
  double m = 0;
  std::optional<ScalarField> v;
};

inline HalvingOutcome lambda_step(const ScalarField& u, const BallDomain& ball,
                                  const BallDomain& half_ball, const ConstantsLedger& L,
                                  const Certificate& cert, double slack,
                                  ReportInputs inputs = {}) {
  detail::require_subsolution_certificate(cert);
  detail::require_nonnegative(u, ball);
  const double A = L.shift_a();

  HalvingOutcome out;
  out.report.lemma_id = "degiorgi.halving";
  out.report.inputs = inputs;
  out.report.constant_name = "A";
  out.report.constant_value = A;
  out.report.slack = slack;

  out.m = l2_average(u, ball);
  if (out.m <= 1e-300) {
    out.report.lhs = 0;
    out.report.rhs = 0;
    out.report.pass = true;
    out.report.note = "trivial: u vanishes on the ball";
    out.v = truncate_shift(u, 0.0);
    return out;
  }

  out.v = truncate_shift(u, A * out.m);
  out.report.lhs = l2_average(*out.v, half_ball);
  out.report.rhs = out.m / 2.0;
  out.report.settle();

  // Chebyshev, exact in discrete form: |{v > 0} cap B_{r/2}| <= |B_r| / A^2.
  const double cheb_lhs = levelset_measure(*out.v, half_ball, Predicate::gt(0)).measure;
  const double cheb_rhs = ball.mask_volume() / (A * A);
  const bool cheb_pass = cheb_lhs <= cheb_rhs;

  // Quarter-measure bound: int_{B_{r/2}} v^2 <= (1/4) |B_{r/2}| m^2.
  double vsq = 0;
  for_each_cell_value(*out.v, half_ball, [&](std::size_t, double x) { vsq += x * x; });
  vsq *= half_ball.cell_volume();
  const double quarter_rhs = 0.25 * half_ball.mask_volume() * sq(out.m);
  const bool quarter_pass = vsq <= quarter_rhs * slack;

  out.report.extra = Json{
      {"m", out.m},
      {"chebyshev", Json{{"lhs", cheb_lhs}, {"rhs", cheb_rhs}, {"pass", cheb_pass}}},
      {"quarter_measure",
       Json{{"lhs", vsq}, {"rhs", quarter_rhs}, {"pass", quarter_pass}}}};
  out.report.pass = out.report.pass && cheb_pass && quarter_pass;
  return out;
}

/// Dyadic truncation trace: v_0 = u, v_{k+1} = (v_k - A m_k)^+ with m_k the
/// L2 average of v_k over B_{2^-k}.
struct IterationTrace {
  struct Step {
    int k = 0;
    double radius = 0;
    double m = 0;       // m_k over B_{2^-k}
    double shift = 0;   // A * m_k applied going to v_{k+1}
    double ratio = 0;   // m_{k+1} / m_k
    bool halved = true;
  };
  std::vector<Step> steps;
  double m0 = 0;
  double cumulative_shift = 0;
  double center_value = 0;
  bool resolution_floor_hit = false;
  LemmaReport report;  // the final center-value bound

  Json steps_json() const {
    Json arr = Json::array();
    for (const auto& s : steps)
      arr.push_back(Json{{"k", s.k},
                         {"radius", s.radius},
                         {"m_k", s.m},
                         {"shift_k", s.shift},
                         {"ratio", json_number(s.ratio)},
                         {"halved", s.halved}});
    return arr;
  }
};

/// Runs the dyadic recursion on B_1 down to the resolution floor (radius 8h)
/// or until m_k < 1e-12 m_0; every performed step must halve within slack and
/// the center value must obey u(0) <= 2 A m_0.
inline IterationTrace iterate_to_point(const ScalarField& u, const ConstantsLedger& L,
                                       const Certificate& cert, double slack,
                                       ReportInputs inputs = {}) {
  detail::require_subsolution_certificate(cert);
  const double A = L.shift_a();
  const BallDomain& dom = u.domain();

  IterationTrace trace;
  trace.report.lemma_id = "degiorgi.center_bound";
  trace.report.inputs = inputs;
  trace.report.constant_name = "A";
  trace.report.constant_value = A;
  trace.report.slack = slack;

  DomainPtr ball = dom.concentric(1.0);
  detail::require_nonnegative(u, *ball);
  ScalarField v = u;
  double m = l2_average(v, *ball);
  trace.m0 = m;
  trace.center_value = u.center_value();

  bool all_halved = true;
  for (int k = 0;; ++k) {
    const double next_radius = std::ldexp(1.0, -(k + 1));
    if (m <= 1e-12 * trace.m0 || trace.m0 == 0) break;
    if (next_radius < 8 * dom.h() - 1e-15) {
      trace.resolution_floor_hit = true;
      break;
    }
    const double shift = A * m;
    v = truncate_shift(v, shift);
    trace.cumulative_shift += shift;
    DomainPtr next_ball = dom.concentric(next_radius);
    const double m_next = l2_average(v, *next_ball);
    IterationTrace::Step s;
    s.k = k + 1;
    s.radius = next_radius;
    s.m = m_next;
    s.shift = shift;
    s.ratio = m > 0 ? m_next / m : 0.0;
    s.halved = m_next <= 0.5 * m * slack;
    all_halved = all_halved && s.halved;
    trace.steps.push_back(s);
    m = m_next;
  }

  // Geometric-series bound on the total shift: A(m_0 + m_1 + ...) <= 2 A m_0.
  const bool series_ok = trace.cumulative_shift <= 2.0 * A * trace.m0 * slack;

  trace.report.lhs = trace.center_value;
  trace.report.rhs = 2.0 * A * trace.m0;
  trace.report.settle();
  trace.report.pass = trace.report.pass && all_halved && series_ok;
  trace.report.extra = Json{{"m0", trace.m0},
                            {"steps", trace.steps_json()},
                            {"cumulative_shift", trace.cumulative_shift},
                            {"series_bound_pass", series_ok},
                            {"resolution_floor_hit", trace.resolution_floor_hit},
                            {"recursion_shift", "A*m_{k-1}"},
                            {"shift_variant_note",
                             "the 2^-k-damped shift variant is inconsistent with the "
                             "geometric series bound; the undamped shift is used"}};
  if (trace.resolution_floor_hit)
    trace.report.note = "partial trace: resolution floor reached before decay target";
  return trace;
}

/// Local maximum bound: sup_{B_{r/2}} u <= 2^{n+1} A (avg_{B_r} u^2)^{1/2}
/// for nonnegative subsolutions; applied to u^+ and u^- for solutions. The
/// concentric form is spot-checked at 8 off-center points.
inline LemmaReport local_max_bound(const ScalarField& u, const BallDomain& ball,
                                   const BallDomain& half_ball, Mode mode,
                                   const ConstantsLedger& L, const Certificate& cert,
                                   double slack, ReportInputs inputs = {}) {
  detail::require_subsolution_certificate(cert);
  if (cert.mode != mode)
    throw std::invalid_argument("local_max_bound: certificate mode mismatch");
  const double A = L.shift_a();
  const int n = u.domain().dim();
  const double factor = std::ldexp(1.0, n + 1) * A;  // 2^{n+1} A

  LemmaReport rep;
  rep.lemma_id = "degiorgi.local_max";
  rep.inputs = inputs;
  rep.constant_name = "A";
  rep.constant_value = A;
  rep.slack = slack;

  double sup_val = 0, sup_pos = 0, sup_neg = 0;
  if (mode == Mode::Subsolution) {
    detail::require_nonnegative(u, ball);
    sup_val = sup_over(u, half_ball);
  } else {
    // Both u^+ and u^- are nonnegative subsolutions; the bound for |u| is
    // exactly the pair of bounds for them.
    for_each_cell_value(u, half_ball, [&](std::size_t, double v) {
      sup_pos = std::max(sup_pos, v);
      sup_neg = std::max(sup_neg, -v);
    });
    sup_val = std::max(sup_pos, sup_neg);
  }
  double msq = 0;
  std::size_t count = 0;
  for_each_cell_value(u, ball, [&](std::size_t, double v) {
    msq += v * v;
    ++count;
  });
  const double avg = std::sqrt(msq / static_cast<double>(count));

  rep.lhs = sup_val;
  rep.rhs = factor * avg;
  rep.settle();

  // Translation spot-check: u(y) <= 2A (avg over |x-y| < r/2 of u^2)^{1/2}.
  const double r = ball.radius();
  const BallDomain& dom = u.domain();
  Json spots = Json::array();
  bool spots_pass = true;
  for (int i = 0; i < 8; ++i) {
    Point y = dom.center();
    if (n == 2) {
      const double th = i * kPi / 4.0;
      y[0] += 0.25 * r * std::cos(th);
      y[1] += 0.25 * r * std::sin(th);
    } else {
      const double s = 0.25 * r / std::sqrt(3.0);
      y[0] += (i & 1) ? s : -s;
      y[1] += (i & 2) ? s : -s;
      y[2] += (i & 4) ? s : -s;
    }
    double local_sq = 0;
    std::size_t local_count = 0;
    for_each_cell_value(u, ball, [&](std::size_t slot, double v) {
      if (dist(dom.cell_center(slot), y, n) < r / 2) {
        local_sq += v * v;
        ++local_count;
      }
    });
    if (local_count == 0) continue;
    const int s = dom.slot(dom.cell_of(y));
    if (s < 0) continue;
    double uy = u[static_cast<std::size_t>(s)];
    if (mode == Mode::Solution) uy = std::abs(uy);
    const double bound = 2.0 * A * std::sqrt(local_sq / static_cast<double>(local_count));
    const bool ok = uy <= bound * slack;
    spots_pass = spots_pass && ok;
    spots.push_back(Json{{"value", uy}, {"bound", bound}, {"pass", ok}});
  }
  rep.pass = rep.pass && spots_pass;
  rep.extra = Json{{"mode", to_string(mode)}, {"translation_spots", spots}};
  if (mode == Mode::Solution) {
    rep.extra["sup_positive_part"] = sup_pos;
    rep.extra["sup_negative_part"] = sup_neg;
  }
  return rep;
}

}  // namespace degiorgi
