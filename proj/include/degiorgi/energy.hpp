#pragma once

#include <functional>
#include <vector>

#include "degiorgi/constants.hpp"
#include "degiorgi/fem.hpp"
#include "degiorgi/report.hpp"

namespace degiorgi {

/// Radial Lipschitz cutoff: 1 on B_{r/2}, linear down to 0 on the boundary of
/// B_r. Its gradient is bounded by 2/r and the checks use that analytic bound
/// rather than discrete differences.
struct CutoffFunction {
  double r = 1.0;

  double value(double rho) const {
    if (rho <= r / 2) return 1.0;
    if (rho >= r) return 0.0;
    return 2.0 * (r - rho) / r;
  }
  double grad_bound() const { return 2.0 / r; }
  /// Analytic |D eta|^2 at radius rho (0 inside B_{r/2}).
  double grad_sq_at(double rho) const {
    return rho < r / 2 ? 0.0 : sq(grad_bound());
  }
};

namespace detail {
inline void require_subsolution_certificate(const Certificate& cert) {
  if (cert.mode != Mode::Subsolution && cert.mode != Mode::Solution)
    throw std::invalid_argument("check requires a certificate");
  if (!cert.ok())
    throw std::invalid_argument("check requires a certified subsolution (residual " +
                                std::to_string(cert.residual) + " above threshold " +
                                std::to_string(cert.threshold) + ")");
}

inline void require_nonnegative(const ScalarField& u, const BallDomain& ball,
                                double tol = 1e-9) {
  double lo = inf_over(u, ball);
  if (lo < -tol)
    throw std::invalid_argument("field is negative beyond tolerance (min " +
                                std::to_string(lo) + ")");
}
}  // namespace detail

/// Caccioppoli energy estimate: int eta^2 |Du|^2 <= C1 int |D eta|^2 u^2 on
/// B_r, plus the specialization r^2 int_{B_{r/2}} |Du|^2 <= 4 C1 int_{B_r} u^2.
inline LemmaReport caccioppoli_check(const ScalarField& u, const CutoffFunction& eta,
                                     const ConstantsLedger& L, const Certificate& cert,
                                     const BallDomain& ball, const BallDomain& half_ball,
                                     double slack, ReportInputs inputs = {}) {
  detail::require_subsolution_certificate(cert);
  detail::require_nonnegative(u, ball);
  const double r = eta.r;
  const int dim = u.domain().dim();
  const Point c0 = u.domain().center();

  LemmaReport rep;
  rep.lemma_id = "energy.caccioppoli";
  rep.inputs = inputs;
  rep.constant_name = "C1";
  rep.constant_value = L.c1();
  rep.slack = slack;

  rep.lhs = gradient_integral(u, r, [&](const Point& x) {
    return sq(eta.value(dist(x, c0, dim)));
  });
  double rhs_sum = 0;
  for_each_cell_value(u, ball, [&](std::size_t slot, double v) {
    const double rho = dist(u.domain().cell_center(slot), c0, dim);
    rhs_sum += eta.grad_sq_at(rho) * v * v;
  });
  rep.rhs = L.c1() * rhs_sum * ball.cell_volume();
  rep.settle();

  // (b)/(c): r^2 int_{B_{r/2}} |Du|^2 <= 4 C1 int_{B_r} u^2.
  double usq = 0;
  for_each_cell_value(u, ball, [&](std::size_t, double v) { usq += v * v; });
  usq *= ball.cell_volume();
  const double lhs_bc = sq(r) * gradient_integral(u, r / 2);
  const double rhs_bc = 4.0 * L.c1() * usq;
  const bool pass_bc = lhs_bc <= rhs_bc * slack;
  rep.extra = Json{{"interior_gradient_bound",
                    Json{{"lhs", json_number(lhs_bc)},
                         {"rhs", json_number(rhs_bc)},
                         {"r", r},
                         {"pass", pass_bc}}}};
  rep.pass = rep.pass && pass_bc;
  (void)half_ball;
  return rep;
}

/// L^p gain over the half ball: ||u||_{L^p(B_{r/2})} <= C2 ||u||_{L^2(B_r)}.
inline LemmaReport sobolev_gain_check(const ScalarField& u, const ConstantsLedger& L,
                                      const Certificate& cert, const BallDomain& ball,
                                      const BallDomain& half_ball, double slack,
                                      ReportInputs inputs = {}) {
  detail::require_subsolution_certificate(cert);
  detail::require_nonnegative(u, ball);

  LemmaReport rep;
  rep.lemma_id = "energy.sobolev_gain";
  rep.inputs = inputs;
  rep.constant_name = "C2";
  rep.constant_value = L.c2();
  rep.slack = slack;
  rep.lhs = lp_norm(u, half_ball, L.p);
  rep.rhs = L.c2() * lp_norm(u, ball, 2.0);
  rep.settle();
  rep.extra = Json{{"p", L.p}};
  return rep;
}

struct SobolevEstimate {
  double value = 0;             // the certified working constant (max of the below)
  double cone_closed_form = 0;  // analytic cone quotient on the exact ball
  double family_value = 0;      // best discrete quotient over the test family
  double ascent_value = 0;      // after projected gradient ascent
  int iterations = 0;
};

namespace detail {

/// Rayleigh data for the discrete Sobolev quotient: exact unit stiffness for
/// the denominator, tensor 3-point Gauss for the L^p numerator, DOFs
/// restricted to cells whose full neighborhood is masked (so the multilinear
/// function provably vanishes outside B_1).
class SobolevQuotient {
 public:
  SobolevQuotient(DomainPtr ball, double p) : ball_(std::move(ball)), p_(p) {
    const BallDomain& dom = *ball_;
    SymMat ident = sym_identity(1.0);
    if (dom.dim() == 2) ident[2] = 0;
    coef_ = std::make_unique<CoefficientField>(
        ball_, std::vector<SymMat>(dom.element_count(), ident), 1.0, 1.0, "identity", 0);
    sys_ = fem::assemble(*coef_);
    admissible_.assign(dom.cell_count(), 1);
    const int kz = dom.dim() == 3 ? 1 : 0;
    for (std::size_t i = 0; i < dom.cell_count(); ++i) {
      const CellIndex c = dom.cells()[i];
      for (int dx = -1; dx <= 1 && admissible_[i]; ++dx)
        for (int dy = -1; dy <= 1 && admissible_[i]; ++dy)
          for (int dz = -kz; dz <= kz; ++dz)
            if (dom.slot(CellIndex{c[0] + dx, c[1] + dy, c[2] + dz}) < 0) {
              admissible_[i] = 0;
              break;
            }
    }
    // Gauss points/weights on [0,1], exact through degree 5.
    const double s = std::sqrt(3.0 / 5.0);
    gp_ = {0.5 - 0.5 * s, 0.5, 0.5 + 0.5 * s};
    gw_ = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  }

  const std::vector<std::uint8_t>& admissible() const { return admissible_; }
  const DomainPtr& ball() const { return ball_; }

  void project(std::vector<double>& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!admissible_[i]) v[i] = 0;
  }

  double denominator_sq(const std::vector<double>& v) const {
    std::vector<double> kv(v.size());
    fem::matvec(sys_, v, kv);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * kv[i];
    return s;
  }

  /// int |v|^p over the reconstruction, plus (optionally) its gradient.
  double numerator_int(const std::vector<double>& v, std::vector<double>* grad) const {
    const BallDomain& dom = *ball_;
    const int dim = dom.dim();
    const int nc = dom.corners_per_element();
    const int nq1 = 3;
    const int nq = dim == 2 ? 9 : 27;
    if (grad) grad->assign(v.size(), 0.0);
    double total = 0;
    double vals[8];
    const double vol = dom.cell_volume();
    for (std::size_t e = 0; e < dom.element_count(); ++e) {
      const auto& refs = dom.element_corners()[e];
      bool any = false;
      for (int c = 0; c < nc; ++c) {
        vals[c] = refs[c] >= 0 ? v[static_cast<std::size_t>(refs[c])] : 0.0;
        any = any || vals[c] != 0.0;
      }
      if (!any) continue;
      for (int q = 0; q < nq; ++q) {
        const int qx = q % nq1, qy = (q / nq1) % nq1, qz = q / (nq1 * nq1);
        const double xi[3] = {gp_[qx], gp_[qy], dim == 3 ? gp_[qz] : 0.0};
        double w = gw_[qx] * gw_[qy] * (dim == 3 ? gw_[qz] : 1.0) * vol;
        double val = 0;
        double shape[8];
        for (int c = 0; c < nc; ++c) {
          double s = 1;
          for (int d = 0; d < dim; ++d) s *= (c & (1 << d)) ? xi[d] : 1.0 - xi[d];
          shape[c] = s;
          val += s * vals[c];
        }
        total += w * std::pow(std::abs(val), p_);
        if (grad) {
          const double dv = p_ * std::pow(std::abs(val), p_ - 1) * (val >= 0 ? 1.0 : -1.0);
          for (int c = 0; c < nc; ++c)
            if (refs[c] >= 0)
              (*grad)[static_cast<std::size_t>(refs[c])] += w * dv * shape[c];
        }
      }
    }
    return total;
  }

  double quotient(const std::vector<double>& v) const {
    const double den = denominator_sq(v);
    if (den <= 0) return 0;
    return std::pow(numerator_int(v, nullptr), 1.0 / p_) / std::sqrt(den);
  }

  /// d/dv log(quotient), projected onto admissible DOFs.
  std::vector<double> log_gradient(const std::vector<double>& v) const {
    std::vector<double> gnum;
    const double inum = numerator_int(v, &gnum);
    std::vector<double> kv(v.size());
    fem::matvec(sys_, v, kv);
    double den = 0;
    for (std::size_t i = 0; i < v.size(); ++i) den += v[i] * kv[i];
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      g[i] = gnum[i] / (p_ * inum) - kv[i] / den;
    project(g);
    return g;
  }

 private:
  DomainPtr ball_;
  double p_;
  std::unique_ptr<CoefficientField> coef_;
  fem::AssembledSystem sys_;
  std::vector<std::uint8_t> admissible_;
  std::array<double, 3> gp_{}, gw_{};
};

}  // namespace detail

/// Certified lower bound for the H_0^1(B_1) -> L^p embedding constant:
/// the analytic cone quotient, improved by the best discrete quotient over a
/// radial test family and projected gradient ascent with a monotone line
/// search. Every discrete candidate vanishes outside a strictly interior
/// region, so its quotient really is a lower bound for the unit ball.
inline SobolevEstimate estimate_sobolev_constant(const DomainPtr& unit_ball, double p,
                                                 int max_iterations = 200) {
  if (!(p > 2)) throw std::invalid_argument("estimate_sobolev_constant: need p > 2");
  const int n = unit_ball->dim();
  if (std::abs(unit_ball->radius() - 1.0) > 1e-12)
    throw std::invalid_argument("estimate_sobolev_constant: expects the unit ball");

  detail::SobolevQuotient Q(unit_ball, p);
  SobolevEstimate est;
  est.cone_closed_form = cone_sobolev_bound(n, p);

  const std::vector<std::function<double(double)>> profiles = {
      [](double r) { return 1.0 - r; },
      [](double r) { return 1.0 - r * r; },
      [](double r) { return sq(1.0 - r * r); },
  };
  std::vector<double> best;
  for (const auto& prof : profiles) {
    std::vector<double> v(unit_ball->cell_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double rho = dist(unit_ball->cell_center(i), unit_ball->center(), n);
      if (Q.admissible()[i] && rho < 1.0) v[i] = std::max(prof(rho), 0.0);
    }
    const double q = Q.quotient(v);
    if (q > est.family_value) {
      est.family_value = q;
      best = std::move(v);
    }
  }

  // Projected gradient ascent on log(quotient) with a backtracking
  // (monotone) line search.
  std::vector<double> v = best;
  double q = est.family_value;
  double vnorm = 0;
  for (double x : v) vnorm += x * x;
  double step = 0.1 * std::sqrt(vnorm / static_cast<double>(v.size()) + 1e-30);
  int it = 0;
  for (; it < max_iterations; ++it) {
    const std::vector<double> g = Q.log_gradient(v);
    double gnorm = 0;
    for (double x : g) gnorm += x * x;
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-14) break;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      std::vector<double> cand = v;
      for (std::size_t i = 0; i < v.size(); ++i) cand[i] += step / gnorm * g[i];
      Q.project(cand);
      const double qc = Q.quotient(cand);
      if (qc > q) {
        v = std::move(cand);
        const double gain = (qc - q) / q;
        q = qc;
        step *= 1.4;
        accepted = true;
        if (gain < 1e-10) it = max_iterations;  // converged
        break;
      }
      step *= 0.5;
      if (step < 1e-16) break;
    }
    if (!accepted) break;
  }
  if (it > max_iterations) it = max_iterations;
  est.ascent_value = q;
  est.iterations = it;
  est.value = std::max({est.cone_closed_form, est.family_value, est.ascent_value});
  return est;
}

}  // namespace degiorgi
