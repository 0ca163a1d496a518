#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "degiorgi/coefficients.hpp"
#include "degiorgi/field.hpp"

namespace degiorgi {

enum class Mode { Solution, Subsolution };

inline std::string to_string(Mode m) {
  return m == Mode::Solution ? "solution" : "subsolution";
}

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

/// Result of a weak_residual certification run.
struct Certificate {
  Mode mode = Mode::Subsolution;
  double residual = std::numeric_limits<double>::infinity();
  double threshold = 0;
  bool ok() const { return residual <= threshold; }
};

namespace fem {

/// Element stiffness for continuous multilinear elements on an h-cube with a
/// constant coefficient matrix, integrated exactly (tensor 2-point Gauss).
inline void element_matrix(const SymMat& a, double h, int dim, double* K /* nc*nc */) {
  const int nc = 1 << dim;
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const int nq = 1 << dim;  // 2 points per axis
  for (int i = 0; i < nc * nc; ++i) K[i] = 0;
  double grad[8][3];
  for (int q = 0; q < nq; ++q) {
    double xi[3] = {gp[q & 1], gp[(q >> 1) & 1], dim == 3 ? gp[(q >> 2) & 1] : 0.0};
    for (int c = 0; c < nc; ++c) {
      for (int d = 0; d < dim; ++d) {
        double g = (c & (1 << d)) ? 1.0 : -1.0;
        for (int d2 = 0; d2 < dim; ++d2) {
          if (d2 == d) continue;
          g *= (c & (1 << d2)) ? xi[d2] : 1.0 - xi[d2];
        }
        grad[c][d] = g / h;
      }
    }
    const double w = std::pow(h, dim) / nq;
    for (int ci = 0; ci < nc; ++ci)
      for (int cj = 0; cj < nc; ++cj) {
        double aij;
        if (dim == 2) {
          aij = a[0] * grad[ci][0] * grad[cj][0] + a[1] * grad[ci][1] * grad[cj][1] +
                a[3] * (grad[ci][0] * grad[cj][1] + grad[ci][1] * grad[cj][0]);
        } else {
          aij = a[0] * grad[ci][0] * grad[cj][0] + a[1] * grad[ci][1] * grad[cj][1] +
                a[2] * grad[ci][2] * grad[cj][2] +
                a[3] * (grad[ci][0] * grad[cj][1] + grad[ci][1] * grad[cj][0]) +
                a[4] * (grad[ci][0] * grad[cj][2] + grad[ci][2] * grad[cj][0]) +
                a[5] * (grad[ci][1] * grad[cj][2] + grad[ci][2] * grad[cj][1]);
        }
        K[ci * nc + cj] += w * aij;
      }
  }
}

/// Multilinear gradient of corner values at the element midpoint.
inline void midpoint_gradient(const double* corner_vals, double h, int dim,
                              double* grad_out) {
  const int nc = 1 << dim;
  const double scale = 1.0 / (h * (1 << (dim - 1)));
  for (int d = 0; d < dim; ++d) {
    double s = 0;
    for (int c = 0; c < nc; ++c) s += ((c & (1 << d)) ? 1.0 : -1.0) * corner_vals[c];
    grad_out[d] = s * scale;
  }
}

/// Stiffness split into mask-mask and mask-halo blocks (CSR each).
struct AssembledSystem {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::vector<std::size_t> hrow_ptr;
  std::vector<std::int32_t> hcol;
  std::vector<double> hval;
  std::vector<double> diag;
};

inline AssembledSystem assemble(const CoefficientField& coef) {
  const BallDomain& dom = coef.domain();
  const int dim = dom.dim();
  const int nc = dom.corners_per_element();
  const std::size_t n = dom.cell_count();

  // Column patterns: Chebyshev-1 neighborhood, split mask / halo.
  std::vector<std::vector<std::int32_t>> cols(n), hcols(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellIndex c = dom.cells()[i];
    const int kz = dim == 3 ? 1 : 0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -kz; dz <= kz; ++dz) {
          CellIndex nb{c[0] + dx, c[1] + dy, c[2] + dz};
          const int ms = dom.slot(nb);
          if (ms >= 0) {
            cols[i].push_back(ms);
          } else {
            const int hs = dom.halo_slot(nb);
            if (hs >= 0) hcols[i].push_back(hs);
          }
        }
    std::sort(cols[i].begin(), cols[i].end());
    std::sort(hcols[i].begin(), hcols[i].end());
  }

  AssembledSystem sys;
  sys.n = n;
  sys.row_ptr.resize(n + 1, 0);
  sys.hrow_ptr.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sys.row_ptr[i + 1] = sys.row_ptr[i] + cols[i].size();
    sys.hrow_ptr[i + 1] = sys.hrow_ptr[i] + hcols[i].size();
  }
  sys.col.resize(sys.row_ptr[n]);
  sys.val.assign(sys.row_ptr[n], 0.0);
  sys.hcol.resize(sys.hrow_ptr[n]);
  sys.hval.assign(sys.hrow_ptr[n], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(cols[i].begin(), cols[i].end(), sys.col.begin() + sys.row_ptr[i]);
    std::copy(hcols[i].begin(), hcols[i].end(), sys.hcol.begin() + sys.hrow_ptr[i]);
  }

  auto add_mask = [&](std::size_t row, std::int32_t c, double v) {
    const auto b = sys.col.begin() + sys.row_ptr[row];
    const auto e = sys.col.begin() + sys.row_ptr[row + 1];
    const auto it = std::lower_bound(b, e, c);
    if (it == e || *it != c) throw std::logic_error("assemble: coupling outside pattern");
    sys.val[static_cast<std::size_t>(it - sys.col.begin())] += v;
  };
  auto add_halo = [&](std::size_t row, std::int32_t c, double v) {
    const auto b = sys.hcol.begin() + sys.hrow_ptr[row];
    const auto e = sys.hcol.begin() + sys.hrow_ptr[row + 1];
    const auto it = std::lower_bound(b, e, c);
    if (it == e || *it != c) throw std::logic_error("assemble: coupling outside pattern");
    sys.hval[static_cast<std::size_t>(it - sys.hcol.begin())] += v;
  };

  double K[64];
  for (std::size_t e = 0; e < dom.element_count(); ++e) {
    element_matrix(coef.at(e), dom.h(), dim, K);
    const auto& refs = dom.element_corners()[e];
    for (int ci = 0; ci < nc; ++ci) {
      if (refs[ci] < 0) continue;  // Dirichlet rows are eliminated
      const std::size_t row = static_cast<std::size_t>(refs[ci]);
      for (int cj = 0; cj < nc; ++cj) {
        const double v = K[ci * nc + cj];
        if (refs[cj] >= 0)
          add_mask(row, refs[cj], v);
        else
          add_halo(row, static_cast<std::int32_t>(-(refs[cj] + 2)), v);
      }
    }
  }

  sys.diag.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0;
    for (std::size_t k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
      if (sys.col[k] == static_cast<std::int32_t>(i)) d = sys.val[k];
    sys.diag[i] = d;
  }
  return sys;
}

inline void matvec(const AssembledSystem& sys, const std::vector<double>& x,
                   std::vector<double>& y) {
  for (std::size_t i = 0; i < sys.n; ++i) {
    double s = 0;
    for (std::size_t k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
      s += sys.val[k] * x[static_cast<std::size_t>(sys.col[k])];
    y[i] = s;
  }
}

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0;
};

/// Jacobi-preconditioned conjugate gradients for the SPD mask block.
inline PcgResult pcg(const AssembledSystem& sys, const std::vector<double>& b,
                     std::vector<double>& x, double tol, int max_iter) {
  const std::size_t n = sys.n;
  x.assign(n, 0.0);
  double bnorm = 0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0) return {0, 0.0};

  std::vector<double> r = b, z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / sys.diag[i];
  p = z;
  double rz = 0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

  double rel = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    matvec(sys, p, q);
    double pq = 0;
    for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
    if (pq <= 0)
      throw std::runtime_error(
          "pcg: indefinite system (broken coefficient invariant?)");
    const double alpha = rz / pq;
    double rnorm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rnorm += r[i] * r[i];
    }
    rel = std::sqrt(rnorm) / bnorm;
    if (rel <= tol) return {it, rel};
    double rz_new = 0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = r[i] / sys.diag[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("pcg: iteration cap exceeded, relative residual " + std::to_string(rel),
                    rel, max_iter);
}

}  // namespace fem

/// Discrete Dirichlet problem: coefficients plus boundary data evaluated on
/// the halo layer.
struct WeakProblem {
  const CoefficientField* coefficients = nullptr;
  std::function<double(const Point&)> boundary;
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: use the 50*sqrt(N)*n default cap

  void validate() const {
    if (!coefficients) throw std::invalid_argument("WeakProblem: missing coefficients");
    if (!boundary) throw std::invalid_argument("WeakProblem: missing boundary data");
    if (!(tolerance > 0) || tolerance > 1e-6)
      throw std::invalid_argument("WeakProblem: tolerance must lie in (0, 1e-6]");
  }
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0;
};

/// Galerkin solution of -D_j(a_ij D_i u) = 0 with Dirichlet data on the halo.
/// A preassembled system for the same coefficients may be supplied to avoid
/// repeated assembly.
inline ScalarField solve(const WeakProblem& p, SolveStats* stats = nullptr,
                         const fem::AssembledSystem* preassembled = nullptr) {
  p.validate();
  const CoefficientField& coef = *p.coefficients;
  const BallDomain& dom = coef.domain();
  coef.verify_ellipticity();

  std::vector<double> g(dom.halo_count());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = p.boundary(dom.halo_center(i));
    if (!std::isfinite(g[i]))
      throw std::invalid_argument("solve: non-finite boundary data");
  }

  fem::AssembledSystem local;
  if (!preassembled) local = fem::assemble(coef);
  const fem::AssembledSystem& sys = preassembled ? *preassembled : local;
  std::vector<double> b(sys.n, 0.0);
  for (std::size_t i = 0; i < sys.n; ++i)
    for (std::size_t k = sys.hrow_ptr[i]; k < sys.hrow_ptr[i + 1]; ++k)
      b[i] -= sys.hval[k] * g[static_cast<std::size_t>(sys.hcol[k])];

  const int cap = p.max_iterations > 0
                      ? p.max_iterations
                      : static_cast<int>(
                            50.0 * std::sqrt(static_cast<double>(sys.n)) * dom.dim()) +
                            1;
  std::vector<double> x;
  const fem::PcgResult res = fem::pcg(sys, b, x, p.tolerance, cap);
  if (stats) *stats = {res.iterations, res.rel_residual};
  return ScalarField(coef.domain_ptr(), std::move(x), std::move(g));
}

/// Energy inner product u' K u over active elements (halo values included
/// when the field carries them; otherwise boundary elements are skipped).
inline double dirichlet_energy(const ScalarField& u, const CoefficientField& coef) {
  const BallDomain& dom = coef.domain();
  if (!u.domain().same_lattice(dom) || u.size() != dom.cell_count())
    throw std::invalid_argument("dirichlet_energy: domain mismatch");
  const int nc = dom.corners_per_element();
  double K[64], vals[8];
  double total = 0;
  for (std::size_t e = 0; e < dom.element_count(); ++e) {
    if (!dom.element_interior()[e] && !u.has_halo()) continue;
    const auto& refs = dom.element_corners()[e];
    for (int c = 0; c < nc; ++c) vals[c] = corner_value(refs[c], u.values(), u.halo_values());
    fem::element_matrix(coef.at(e), dom.h(), dom.dim(), K);
    for (int ci = 0; ci < nc; ++ci)
      for (int cj = 0; cj < nc; ++cj) total += vals[ci] * K[ci * nc + cj] * vals[cj];
  }
  return total;
}

/// Max over interior nodal test functions of the (normalized) weak-form
/// pairing: |.| for solutions, positive part only for subsolutions. Small
/// values certify the discrete property.
inline double weak_residual(const ScalarField& u, const CoefficientField& coef, Mode mode,
                            const fem::AssembledSystem* preassembled = nullptr) {
  const BallDomain& dom = coef.domain();
  if (!u.domain().same_lattice(dom) || u.size() != dom.cell_count())
    throw std::invalid_argument("weak_residual: domain mismatch");

  fem::AssembledSystem local;
  if (!preassembled) local = fem::assemble(coef);
  const fem::AssembledSystem& sys = preassembled ? *preassembled : local;
  const bool halo_ok = u.has_halo();

  const double energy = std::max(dirichlet_energy(u, coef), 0.0);
  const double unorm = std::sqrt(energy);
  double umax = 0;
  for (double v : u.values()) umax = std::max(umax, std::abs(v));
  if (unorm <= 1e-13 * (umax + 1.0)) return 0.0;  // numerically constant

  double worst = 0;
  for (std::size_t i = 0; i < sys.n; ++i) {
    if (!halo_ok && sys.hrow_ptr[i + 1] > sys.hrow_ptr[i]) continue;
    double r = 0;
    for (std::size_t k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
      r += sys.val[k] * u[static_cast<std::size_t>(sys.col[k])];
    if (halo_ok)
      for (std::size_t k = sys.hrow_ptr[i]; k < sys.hrow_ptr[i + 1]; ++k)
        r += sys.hval[k] * u.halo_values()[static_cast<std::size_t>(sys.hcol[k])];
    if (mode == Mode::Subsolution && r <= 0) continue;
    const double normalized = std::abs(r) / (unorm * std::sqrt(sys.diag[i]));
    worst = std::max(worst, normalized);
  }
  return worst;
}

/// Midpoint-quadrature integral of w(x) |Du(x)|^2 over elements whose
/// midpoints lie in the ball of radius r (same center as the field's domain).
inline double gradient_integral(const ScalarField& u, double r,
                                const std::function<double(const Point&)>& weight = {}) {
  const BallDomain& dom = u.domain();
  const int dim = dom.dim();
  const int nc = dom.corners_per_element();
  const double cellvol = dom.cell_volume();
  double vals[8], grad[3];
  double total = 0;
  const double r2 = r * r;
  for (std::size_t e = 0; e < dom.element_count(); ++e) {
    if (!dom.element_interior()[e] && !u.has_halo()) continue;
    const Point mid = dom.element_midpoint(e);
    const Point d = sub(mid, dom.center());
    double rr = sq(d[0]) + sq(d[1]) + (dim == 3 ? sq(d[2]) : 0.0);
    if (rr >= r2) continue;
    const auto& refs = dom.element_corners()[e];
    for (int c = 0; c < nc; ++c) vals[c] = corner_value(refs[c], u.values(), u.halo_values());
    fem::midpoint_gradient(vals, dom.h(), dim, grad);
    double g2 = 0;
    for (int dd = 0; dd < dim; ++dd) g2 += sq(grad[dd]);
    total += (weight ? weight(mid) : 1.0) * g2 * cellvol;
  }
  return total;
}

/// Cell-midpoint-quadrature L^p norm over a concentric sub-ball.
inline double lp_norm(const ScalarField& u, const BallDomain& b, double p) {
  double sum = 0;
  for_each_cell_value(u, b, [&](std::size_t, double v) { sum += std::pow(std::abs(v), p); });
  return std::pow(sum * b.cell_volume(), 1.0 / p);
}

/// Named boundary data used by the corpus and the CLI.
inline std::function<double(const Point&)> boundary_function(const std::string& name) {
  if (name == "one") return [](const Point&) { return 1.0; };
  if (name == "x1") return [](const Point& x) { return x[0]; };
  if (name == "x2") return [](const Point& x) { return x[1]; };
  if (name == "x1x2") return [](const Point& x) { return x[0] * x[1]; };
  if (name == "quad") return [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; };
  if (name == "cubic")
    return [](const Point& x) { return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1]; };
  if (name == "quart")
    return [](const Point& x) {
      const double a = x[0] * x[0], b = x[1] * x[1];
      return a * a - 6.0 * a * b + b * b;
    };
  if (name == "affine") return [](const Point& x) { return 1.0 + x[0]; };
  throw std::invalid_argument("unknown boundary data: " + name);
}

}  // namespace degiorgi
