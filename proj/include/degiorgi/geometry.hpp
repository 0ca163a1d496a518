#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace degiorgi {

inline constexpr double kPi = std::numbers::pi;

/// Integer cell coordinates. Unused trailing components are zero.
using CellIndex = std::array<int, 3>;
/// A point in R^n, n in {2,3}. Unused trailing components are zero.
using Point = std::array<double, 3>;

inline double sq(double x) { return x * x; }

inline double norm2(const Point& p, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += sq(p[d]);
  return std::sqrt(s);
}

inline Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double dist(const Point& a, const Point& b, int dim) {
  return norm2(sub(a, b), dim);
}

/// Volume of the n-ball of radius r (n in {2,3}).
inline double ball_measure(int n, double r) {
  if (r <= 0.0) throw std::invalid_argument("ball_measure: radius must be positive");
  if (n == 2) return kPi * r * r;
  if (n == 3) return 4.0 / 3.0 * kPi * r * r * r;
  throw std::invalid_argument("ball_measure: unsupported dimension " + std::to_string(n));
}

/// Surface measure of the unit (n-1)-sphere: 2*pi for n=2, 4*pi for n=3.
inline double sphere_measure(int n) {
  if (n == 2) return 2.0 * kPi;
  if (n == 3) return 4.0 * kPi;
  throw std::invalid_argument("sphere_measure: unsupported dimension " + std::to_string(n));
}

/// Uniform Cartesian grid masked to an open ball.
///
/// Cells are axis-aligned h-cubes; the cell with index c is centered at
/// center + h*c, so the cell {0,0,0} sits exactly on the ball center. A cell
/// belongs to the mask iff its center lies strictly inside the ball. Elements
/// (for multilinear reconstruction) are the h-cubes spanned by 2^n adjacent
/// cell centers; an element is active iff at least one of its corners is a
/// masked cell, and the non-masked corners of active elements form the halo
/// (the one-cell boundary layer that carries Dirichlet data).
///
/// Concentric balls built by `concentric` share the lattice, so restriction
/// of fields between nested balls is exact.
class BallDomain : public std::enable_shared_from_this<BallDomain> {
 public:
  static std::shared_ptr<const BallDomain> make(int dim, double radius, double h,
                                                const Point& center = {0, 0, 0}) {
    return std::shared_ptr<const BallDomain>(new BallDomain(dim, radius, h, center));
  }

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double h() const { return h_; }
  const Point& center() const { return center_; }

  const std::vector<CellIndex>& cells() const { return cells_; }
  const std::vector<CellIndex>& halo() const { return halo_; }
  /// Active element anchors (min-corner cell index), lexicographic.
  const std::vector<CellIndex>& elements() const { return elements_; }
  /// Per active element: 2^n corner references in local corner order
  /// (bit d of the corner number selects +1 along axis d).
  /// ref >= 0: mask slot; ref < 0: halo slot -(ref+2); kMissing never occurs.
  const std::vector<std::array<std::int32_t, 8>>& element_corners() const {
    return elem_corners_;
  }
  /// True iff every corner of the element is a masked cell.
  const std::vector<std::uint8_t>& element_interior() const { return elem_interior_; }

  std::size_t cell_count() const { return cells_.size(); }
  std::size_t halo_count() const { return halo_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  int corners_per_element() const { return 1 << dim_; }

  double cell_volume() const { return std::pow(h_, dim_); }
  double mask_volume() const { return static_cast<double>(cells_.size()) * cell_volume(); }

  Point cell_center(const CellIndex& c) const {
    return {center_[0] + h_ * c[0], center_[1] + h_ * c[1], center_[2] + h_ * c[2]};
  }
  Point cell_center(std::size_t slot) const { return cell_center(cells_[slot]); }
  Point halo_center(std::size_t slot) const { return cell_center(halo_[slot]); }
  Point element_midpoint(std::size_t e) const {
    const CellIndex& a = elements_[e];
    return {center_[0] + h_ * (a[0] + 0.5), center_[1] + h_ * (a[1] + 0.5),
            dim_ == 3 ? center_[2] + h_ * (a[2] + 0.5) : 0.0};
  }

  /// Mask slot of a cell index, or -1.
  int slot(const CellIndex& c) const {
    const std::int64_t f = flat(c);
    if (f < 0) return -1;
    const std::int32_t v = lookup_[static_cast<std::size_t>(f)];
    return v >= 0 ? v : -1;
  }
  /// Halo slot of a cell index, or -1.
  int halo_slot(const CellIndex& c) const {
    const std::int64_t f = flat(c);
    if (f < 0) return -1;
    const std::int32_t v = lookup_[static_cast<std::size_t>(f)];
    return v <= kHaloBase ? kHaloBase - v : -1;
  }
  bool in_mask(const CellIndex& c) const { return slot(c) >= 0; }

  /// Cell whose cube contains the point (nearest-center partition).
  CellIndex cell_of(const Point& p) const {
    CellIndex c{0, 0, 0};
    for (int d = 0; d < dim_; ++d)
      c[d] = static_cast<int>(std::llround((p[d] - center_[d]) / h_));
    return c;
  }

  bool contains_point(const Point& p) const { return dist(p, center_, dim_) < radius_; }

  /// Concentric ball on the same lattice; requires 8h <= r2 <= radius.
  std::shared_ptr<const BallDomain> concentric(double r2) const {
    if (r2 > radius_ + 1e-15)
      throw std::invalid_argument("concentric: radius exceeds parent ball");
    return make(dim_, r2, h_, center_);
  }

  bool same_lattice(const BallDomain& other) const {
    return dim_ == other.dim_ && h_ == other.h_ && center_ == other.center_;
  }

  /// True iff every cell of `sub` is masked here (requires same lattice).
  bool covers(const BallDomain& sub) const {
    if (!same_lattice(sub)) return false;
    for (const CellIndex& c : sub.cells_)
      if (slot(c) < 0) return false;
    return true;
  }

 private:
  static constexpr std::int32_t kNone = -1;
  static constexpr std::int32_t kHaloBase = -2;  // halo slot s stored as kHaloBase - s

  BallDomain(int dim, double radius, double h, const Point& center)
      : dim_(dim), center_(center), radius_(radius), h_(h) {
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("BallDomain: dimension must be 2 or 3");
    if (radius <= 0) throw std::invalid_argument("BallDomain: radius must be positive");
    if (h <= 0) throw std::invalid_argument("BallDomain: mesh width must be positive");
    if (h > radius / 8 + 1e-15)
      throw std::invalid_argument("BallDomain: mesh width must satisfy h <= r/8");

    extent_ = static_cast<int>(std::ceil(radius / h)) + 1;  // covers halo too
    side_ = 2 * extent_ + 1;
    const std::size_t total =
        static_cast<std::size_t>(side_) * side_ * (dim_ == 3 ? side_ : 1);
    lookup_.assign(total, kNone);

    const int kz = dim_ == 3 ? extent_ - 1 : 0;
    const int kxy = extent_ - 1;
    const double r2 = radius * radius;

    // Mask, in lexicographic index order.
    for (int i = -kxy; i <= kxy; ++i)
      for (int j = -kxy; j <= kxy; ++j)
        for (int k = -kz; k <= kz; ++k) {
          double rr = sq(i * h) + sq(j * h) + (dim_ == 3 ? sq(k * h) : 0.0);
          if (rr < r2) {
            CellIndex c{i, j, k};
            lookup_[flat_unchecked(c)] = static_cast<std::int32_t>(cells_.size());
            cells_.push_back(c);
          }
        }
    if (cells_.empty()) throw std::invalid_argument("BallDomain: empty mask");

    // Active elements: any corner masked. Anchors range one step below mask.
    const int ncorners = corners_per_element();
    std::vector<std::uint8_t> elem_mark(total, 0);
    for (const CellIndex& c : cells_)
      for (int corner = 0; corner < ncorners; ++corner) {
        CellIndex a = c;
        for (int d = 0; d < dim_; ++d)
          if (corner & (1 << d)) a[d] -= 1;
        const std::int64_t f = flat(a);
        if (f >= 0) elem_mark[static_cast<std::size_t>(f)] = 1;
      }

    // Halo: corners of active elements that are not masked.
    for (int i = -extent_; i <= kxy; ++i)
      for (int j = -extent_; j <= kxy; ++j)
        for (int k = (dim_ == 3 ? -extent_ : 0); k <= kz; ++k) {
          CellIndex a{i, j, k};
          if (!elem_mark[flat_unchecked(a)]) continue;
          elements_.push_back(a);
        }
    for (const CellIndex& a : elements_)
      for (int corner = 0; corner < ncorners; ++corner) {
        CellIndex c = a;
        for (int d = 0; d < dim_; ++d)
          if (corner & (1 << d)) c[d] += 1;
        const std::size_t f = flat_unchecked(c);
        if (lookup_[f] == kNone) lookup_[f] = kHaloBase;  // provisional mark
      }
    for (int i = -extent_; i <= extent_; ++i)
      for (int j = -extent_; j <= extent_; ++j)
        for (int k = (dim_ == 3 ? -extent_ : 0); k <= (dim_ == 3 ? extent_ : 0); ++k) {
          CellIndex c{i, j, k};
          const std::size_t f = flat_unchecked(c);
          if (lookup_[f] == kHaloBase) {
            lookup_[f] = static_cast<std::int32_t>(kHaloBase - halo_.size());
            halo_.push_back(c);
          }
        }

    // Corner references per element.
    elem_corners_.resize(elements_.size());
    elem_interior_.resize(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      bool interior = true;
      for (int corner = 0; corner < ncorners; ++corner) {
        CellIndex c = elements_[e];
        for (int d = 0; d < dim_; ++d)
          if (corner & (1 << d)) c[d] += 1;
        const int ms = slot(c);
        if (ms >= 0) {
          elem_corners_[e][corner] = ms;
        } else {
          const int hs = halo_slot(c);
          if (hs < 0) throw std::logic_error("BallDomain: corner neither mask nor halo");
          elem_corners_[e][corner] = static_cast<std::int32_t>(kHaloBase - hs);
          interior = false;
        }
      }
      elem_interior_[e] = interior ? 1 : 0;
    }
  }

  std::int64_t flat(const CellIndex& c) const {
    for (int d = 0; d < dim_; ++d)
      if (c[d] < -extent_ || c[d] > extent_) return -1;
    if (dim_ == 2 && c[2] != 0) return -1;
    return static_cast<std::int64_t>(flat_unchecked(c));
  }
  std::size_t flat_unchecked(const CellIndex& c) const {
    const std::size_t x = static_cast<std::size_t>(c[0] + extent_);
    const std::size_t y = static_cast<std::size_t>(c[1] + extent_);
    const std::size_t z = dim_ == 3 ? static_cast<std::size_t>(c[2] + extent_) : 0;
    return (x * side_ + y) * (dim_ == 3 ? side_ : 1) + z;
  }

  int dim_;
  Point center_;
  double radius_, h_;
  int extent_ = 0, side_ = 0;
  std::vector<CellIndex> cells_, halo_, elements_;
  std::vector<std::array<std::int32_t, 8>> elem_corners_;
  std::vector<std::uint8_t> elem_interior_;
  std::vector<std::int32_t> lookup_;
};

using DomainPtr = std::shared_ptr<const BallDomain>;

/// Decode an element-corner reference against mask/halo value arrays.
inline double corner_value(std::int32_t ref, const std::vector<double>& mask_vals,
                           const std::vector<double>& halo_vals) {
  if (ref >= 0) return mask_vals[static_cast<std::size_t>(ref)];
  return halo_vals[static_cast<std::size_t>(-(ref + 2))];
}

}  // namespace degiorgi
