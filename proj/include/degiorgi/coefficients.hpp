#pragma once

#include <array>
#include <cmath>
#include <string>

#include "degiorgi/geometry.hpp"
#include "degiorgi/rng.hpp"

namespace degiorgi {

/// Symmetric matrix entries packed as xx, yy, zz, xy, xz, yz (2D uses the
/// first two diagonals and xy).
using SymMat = std::array<double, 6>;

inline SymMat sym_identity(double s = 1.0) { return {s, s, s, 0, 0, 0}; }

inline double quad_form(const SymMat& m, const double* xi, int dim) {
  if (dim == 2)
    return m[0] * xi[0] * xi[0] + m[1] * xi[1] * xi[1] + 2 * m[3] * xi[0] * xi[1];
  return m[0] * xi[0] * xi[0] + m[1] * xi[1] * xi[1] + m[2] * xi[2] * xi[2] +
         2 * m[3] * xi[0] * xi[1] + 2 * m[4] * xi[0] * xi[2] + 2 * m[5] * xi[1] * xi[2];
}

/// Eigenvalue range of a packed symmetric matrix (closed form in 2D, cyclic
/// Jacobi in 3D).
inline std::array<double, 2> sym_eig_range(const SymMat& m, int dim) {
  if (dim == 2) {
    const double tr = m[0] + m[1];
    const double d = std::sqrt(sq(m[0] - m[1]) + 4 * sq(m[3]));
    return {(tr - d) / 2, (tr + d) / 2};
  }
  double a[3][3] = {{m[0], m[3], m[4]}, {m[3], m[1], m[5]}, {m[4], m[5], m[2]}};
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-15 * (std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2]) + 1e-300))
      break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  const double lo = std::min({a[0][0], a[1][1], a[2][2]});
  const double hi = std::max({a[0][0], a[1][1], a[2][2]});
  return {lo, hi};
}

enum class CoefficientKind { Identity, Checkerboard, RandomRotation };

inline std::string to_string(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::Identity: return "identity";
    case CoefficientKind::Checkerboard: return "checkerboard";
    case CoefficientKind::RandomRotation: return "random-rotation";
  }
  return "?";
}

inline CoefficientKind coefficient_kind_from_string(const std::string& s) {
  if (s == "identity") return CoefficientKind::Identity;
  if (s == "checkerboard") return CoefficientKind::Checkerboard;
  if (s == "random-rotation") return CoefficientKind::RandomRotation;
  throw std::invalid_argument("unknown coefficient kind: " + s);
}

/// Piecewise-constant symmetric coefficient matrix, one matrix per active
/// element, with certified ellipticity bounds 0 < lambda <= Lambda.
class CoefficientField {
 public:
  CoefficientField(DomainPtr domain, std::vector<SymMat> per_element, double lambda,
                   double Lambda, std::string kind = "custom", std::uint64_t seed = 0)
      : domain_(std::move(domain)),
        entries_(std::move(per_element)),
        lambda_(lambda),
        Lambda_(Lambda),
        kind_(std::move(kind)),
        seed_(seed) {
    if (!(lambda_ > 0) || !(Lambda_ >= lambda_))
      throw std::invalid_argument("CoefficientField: need 0 < lambda <= Lambda");
    if (entries_.size() != domain_->element_count())
      throw std::invalid_argument("CoefficientField: one matrix per active element required");
    verify_ellipticity();
  }

  const BallDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const std::vector<SymMat>& entries() const { return entries_; }
  const SymMat& at(std::size_t element) const { return entries_[element]; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  const std::string& kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  /// Checks lambda |xi|^2 <= a xi.xi <= Lambda |xi|^2 per element via
  /// eigenvalue bounds; throws on violation.
  void verify_ellipticity(double rel_tol = 1e-9) const {
    const double lo_ok = lambda_ * (1 - rel_tol) - 1e-300;
    const double hi_ok = Lambda_ * (1 + rel_tol);
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto r = sym_eig_range(entries_[e], domain_->dim());
      if (r[0] < lo_ok || r[1] > hi_ok)
        throw std::invalid_argument("CoefficientField: ellipticity bounds violated");
      for (int k = 0; k < 6; ++k)
        if (std::abs(entries_[e][k]) > hi_ok)
          throw std::invalid_argument("CoefficientField: entry bound violated");
    }
  }

  /// Same continuum medium on the halved lattice (piecewise-constant copy).
  CoefficientField refined() const {
    DomainPtr fine = BallDomain::make(domain_->dim(), domain_->radius(),
                                      domain_->h() / 2, domain_->center());
    std::vector<SymMat> out(fine->element_count());
    for (std::size_t e = 0; e < fine->element_count(); ++e) {
      const CellIndex& a = fine->elements()[e];
      // Fine element [a*h', a*h'+h'] sits inside the coarse element whose
      // anchor is floor(a/2).
      CellIndex coarse{divfloor(a[0]), divfloor(a[1]), divfloor(a[2])};
      const int idx = element_index(*domain_, coarse);
      out[e] = idx >= 0 ? entries_[static_cast<std::size_t>(idx)] : boundary_fill();
    }
    return CoefficientField(std::move(fine), std::move(out), lambda_, Lambda_, kind_, seed_);
  }

 private:
  static int divfloor(int a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }
  SymMat boundary_fill() const {
    SymMat m = sym_identity(lambda_);
    if (domain_->dim() == 2) m[2] = 0;
    return m;
  }
  static int element_index(const BallDomain& d, const CellIndex& a) {
    // Elements are lexicographically sorted; binary search.
    const auto& es = d.elements();
    std::size_t lo = 0, hi = es.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const CellIndex& m = es[mid];
      if (m < a)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < es.size() && es[lo] == a) return static_cast<int>(lo);
    return -1;
  }

  DomainPtr domain_;
  std::vector<SymMat> entries_;
  double lambda_, Lambda_;
  std::string kind_;
  std::uint64_t seed_;
};

/// Constant-matrix coefficients (certified by the matrix's own eigen range).
inline CoefficientField uniform_coefficients(const DomainPtr& domain, const SymMat& m) {
  const auto r = sym_eig_range(m, domain->dim());
  return CoefficientField(domain, std::vector<SymMat>(domain->element_count(), m), r[0],
                          r[1], "uniform", 0);
}

/// Coefficient corpus generator.
///   identity:        lambda * I everywhere (requires lambda == Lambda)
///   checkerboard:    diag(lambda,...) / diag(Lambda,...) by element parity
///   random-rotation: per-element rotation of diag(lambda, Lambda[, Lambda])
inline CoefficientField make_coefficients(const DomainPtr& domain, CoefficientKind kind,
                                          double lambda, double Lambda,
                                          std::uint64_t seed = 0) {
  if (!(lambda > 0) || !(Lambda >= lambda))
    throw std::invalid_argument("make_coefficients: need 0 < lambda <= Lambda");
  const int dim = domain->dim();
  std::vector<SymMat> out(domain->element_count());

  switch (kind) {
    case CoefficientKind::Identity: {
      if (lambda != Lambda)
        throw std::invalid_argument("make_coefficients: identity requires lambda == Lambda");
      SymMat m = sym_identity(lambda);
      if (dim == 2) m[2] = 0;
      for (auto& e : out) e = m;
      break;
    }
    case CoefficientKind::Checkerboard: {
      SymMat lo = sym_identity(lambda), hi = sym_identity(Lambda);
      if (dim == 2) lo[2] = hi[2] = 0;
      for (std::size_t e = 0; e < out.size(); ++e) {
        const CellIndex& a = domain->elements()[e];
        const int parity = ((a[0] + a[1] + a[2]) % 2 + 2) % 2;
        out[e] = parity == 0 ? lo : hi;
      }
      break;
    }
    case CoefficientKind::RandomRotation: {
      Rng rng(seed * 0x51ed2701u + 0xc0ffee);
      for (std::size_t e = 0; e < out.size(); ++e) {
        if (dim == 2) {
          const double t = rng.uniform(0, 2 * kPi);
          const double c = std::cos(t), s = std::sin(t);
          // R diag(lambda, Lambda) R^T
          out[e] = {lambda * c * c + Lambda * s * s, lambda * s * s + Lambda * c * c, 0,
                    (lambda - Lambda) * c * s, 0, 0};
        } else {
          // Uniform rotation from a normalized quaternion.
          double q[4];
          double n = 0;
          do {
            for (double& x : q) x = rng.normal();
            n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
          } while (n < 1e-12);
          for (double& x : q) x /= n;
          const double w = q[0], x = q[1], y = q[2], z = q[3];
          const double R[3][3] = {
              {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
              {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
              {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
          const double d[3] = {lambda, Lambda, Lambda};
          double a[3][3];
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              a[i][j] = 0;
              for (int k = 0; k < 3; ++k) a[i][j] += R[i][k] * d[k] * R[j][k];
            }
          out[e] = {a[0][0], a[1][1], a[2][2], a[0][1], a[0][2], a[1][2]};
        }
      }
      break;
    }
  }
  return CoefficientField(domain, std::move(out), lambda, Lambda, to_string(kind), seed);
}

}  // namespace degiorgi
