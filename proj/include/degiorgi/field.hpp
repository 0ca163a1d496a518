#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "degiorgi/geometry.hpp"

namespace degiorgi {

/// Grid sampling of a scalar function: one value per masked cell, plus
/// (optionally) one value per halo cell for solver use. Immutable by
/// convention; operations return new fields.
class ScalarField {
 public:
  ScalarField(DomainPtr domain, std::vector<double> values,
              std::vector<double> halo_values = {})
      : domain_(std::move(domain)),
        values_(std::move(values)),
        halo_values_(std::move(halo_values)) {
    if (!domain_) throw std::invalid_argument("ScalarField: null domain");
    if (values_.size() != domain_->cell_count())
      throw std::invalid_argument("ScalarField: value count must equal mask size");
    if (!halo_values_.empty() && halo_values_.size() != domain_->halo_count())
      throw std::invalid_argument("ScalarField: halo value count mismatch");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite value");
    for (double v : halo_values_)
      if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite halo value");
  }

  const BallDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& halo_values() const { return halo_values_; }
  bool has_halo() const { return !halo_values_.empty(); }

  double operator[](std::size_t slot) const { return values_[slot]; }
  std::size_t size() const { return values_.size(); }

  /// Value at the cell covering the ball center.
  double center_value() const {
    const int s = domain_->slot(CellIndex{0, 0, 0});
    if (s < 0) throw std::logic_error("ScalarField: center cell not in mask");
    return values_[static_cast<std::size_t>(s)];
  }

  ScalarField map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size()), hv(halo_values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
    for (std::size_t i = 0; i < halo_values_.size(); ++i) hv[i] = f(halo_values_[i]);
    return ScalarField(domain_, std::move(v), std::move(hv));
  }

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  std::vector<double> halo_values_;
};

/// Sample a function of position on the mask (and halo, when requested).
inline ScalarField make_field(const DomainPtr& domain,
                              const std::function<double(const Point&)>& f,
                              bool with_halo = true) {
  std::vector<double> v(domain->cell_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(domain->cell_center(i));
  std::vector<double> hv;
  if (with_halo) {
    hv.resize(domain->halo_count());
    for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = f(domain->halo_center(i));
  }
  return ScalarField(domain, std::move(v), std::move(hv));
}

inline ScalarField constant_field(const DomainPtr& domain, double c, bool with_halo = true) {
  return ScalarField(domain, std::vector<double>(domain->cell_count(), c),
                     with_halo ? std::vector<double>(domain->halo_count(), c)
                               : std::vector<double>{});
}

/// Pointwise (u - c)^+.
inline ScalarField truncate_shift(const ScalarField& u, double c) {
  return u.map([c](double v) { return std::max(v - c, 0.0); });
}

/// Pointwise u^+.
inline ScalarField positive_part(const ScalarField& u) { return truncate_shift(u, 0.0); }

/// Pointwise 2^k (u - (1 - 2^-k))^+ for fields with values in [0, 1].
/// Values outside [0, 1] by more than 1e-12 are an error; smaller excursions
/// are clamped.
inline ScalarField rescale_truncate(const ScalarField& u, int k) {
  if (k < 0) throw std::invalid_argument("rescale_truncate: k must be >= 0");
  constexpr double tol = 1e-12;
  const double scale = std::ldexp(1.0, k);       // 2^k
  const double level = 1.0 - std::ldexp(1.0, -k);  // 1 - 2^-k
  return u.map([=](double v) {
    if (v < -tol || v > 1.0 + tol)
      throw std::domain_error("rescale_truncate: input value outside [0,1]");
    v = std::clamp(v, 0.0, 1.0);
    return std::min(std::max(scale * (v - level), 0.0), 1.0);
  });
}

namespace detail {
inline void require_subdomain(const ScalarField& u, const BallDomain& b) {
  if (!u.domain().same_lattice(b))
    throw std::invalid_argument("field/ball lattice mismatch");
  if (b.cell_count() == 0) throw std::invalid_argument("empty mask");
}
}  // namespace detail

/// Evaluate u on every cell of a concentric sub-ball; throws if any cell of
/// `b` is not masked in u's domain.
template <typename Fn>
inline void for_each_cell_value(const ScalarField& u, const BallDomain& b, Fn&& fn) {
  detail::require_subdomain(u, b);
  const BallDomain& dom = u.domain();
  if (&dom == &b || (b.radius() >= dom.radius() && dom.cell_count() == b.cell_count())) {
    for (std::size_t i = 0; i < u.size(); ++i) fn(i, u[i]);
    return;
  }
  for (const CellIndex& c : b.cells()) {
    const int s = dom.slot(c);
    if (s < 0) throw std::invalid_argument("sub-ball cell missing from field domain");
    fn(static_cast<std::size_t>(s), u[static_cast<std::size_t>(s)]);
  }
}

/// Measure-normalized L2 average (slashed integral of u^2, square root).
inline double l2_average(const ScalarField& u, const BallDomain& b) {
  double sum = 0;
  std::size_t count = 0;
  for_each_cell_value(u, b, [&](std::size_t, double v) {
    sum += v * v;
    ++count;
  });
  if (count == 0) throw std::invalid_argument("l2_average: empty mask");
  return std::sqrt(sum / static_cast<double>(count));
}

inline double sup_over(const ScalarField& u, const BallDomain& b) {
  double m = -std::numeric_limits<double>::infinity();
  for_each_cell_value(u, b, [&](std::size_t, double v) { m = std::max(m, v); });
  return m;
}

inline double inf_over(const ScalarField& u, const BallDomain& b) {
  double m = std::numeric_limits<double>::infinity();
  for_each_cell_value(u, b, [&](std::size_t, double v) { m = std::min(m, v); });
  return m;
}

/// Restrict a field to a concentric sub-ball (exact: shared lattice).
inline ScalarField restrict_to(const ScalarField& u, const DomainPtr& b) {
  detail::require_subdomain(u, *b);
  std::vector<double> v(b->cell_count());
  const BallDomain& dom = u.domain();
  for (std::size_t i = 0; i < b->cell_count(); ++i) {
    const int s = dom.slot(b->cells()[i]);
    if (s < 0) throw std::invalid_argument("restrict_to: cell missing from field domain");
    v[i] = u[static_cast<std::size_t>(s)];
  }
  // Halo values for the sub-ball come from the parent's interior when present.
  std::vector<double> hv(b->halo_count());
  bool have_all = true;
  for (std::size_t i = 0; i < b->halo_count() && have_all; ++i) {
    const CellIndex c = b->halo()[i];
    const int s = dom.slot(c);
    if (s >= 0) {
      hv[i] = u[static_cast<std::size_t>(s)];
    } else {
      const int hs = dom.halo_slot(c);
      if (hs >= 0 && u.has_halo())
        hv[i] = u.halo_values()[static_cast<std::size_t>(hs)];
      else
        have_all = false;
    }
  }
  if (!have_all) hv.clear();
  return ScalarField(b, std::move(v), std::move(hv));
}

}  // namespace degiorgi
