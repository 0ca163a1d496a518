#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "degiorgi/field.hpp"

namespace degiorgi {

/// Threshold predicate on cell values.
struct Predicate {
  enum class Kind { Eq, Gt, Ge, Lt, Le, Between };  // Between is strict on both ends
  Kind kind = Kind::Ge;
  double a = 0, b = 0;

  static Predicate eq(double c) { return {Kind::Eq, c, 0}; }
  static Predicate gt(double c) { return {Kind::Gt, c, 0}; }
  static Predicate ge(double c) { return {Kind::Ge, c, 0}; }
  static Predicate lt(double c) { return {Kind::Lt, c, 0}; }
  static Predicate le(double c) { return {Kind::Le, c, 0}; }
  static Predicate between(double lo, double hi) { return {Kind::Between, lo, hi}; }

  bool operator()(double v) const {
    switch (kind) {
      case Kind::Eq: return v == a;
      case Kind::Gt: return v > a;
      case Kind::Ge: return v >= a;
      case Kind::Lt: return v < a;
      case Kind::Le: return v <= a;
      case Kind::Between: return v > a && v < b;
    }
    return false;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Eq: return "= " + std::to_string(a);
      case Kind::Gt: return "> " + std::to_string(a);
      case Kind::Ge: return ">= " + std::to_string(a);
      case Kind::Lt: return "< " + std::to_string(a);
      case Kind::Le: return "<= " + std::to_string(a);
      case Kind::Between:
        return "in (" + std::to_string(a) + ", " + std::to_string(b) + ")";
    }
    return "?";
  }
};

/// A level set's discrete measure: cell-center indicator counting.
struct LevelSet {
  Predicate predicate;
  std::size_t count = 0;
  double measure = 0;  // count * h^n
};

inline LevelSet levelset_measure(const ScalarField& u, const BallDomain& b,
                                 const Predicate& pred) {
  std::size_t count = 0;
  for_each_cell_value(u, b, [&](std::size_t, double v) {
    if (pred(v)) ++count;
  });
  return LevelSet{pred, count, static_cast<double>(count) * b.cell_volume()};
}

/// Subset of a ball's mask with O(1) membership.
class CellSet {
 public:
  CellSet(DomainPtr ambient, std::vector<CellIndex> members)
      : ambient_(std::move(ambient)), members_(std::move(members)) {
    for (const CellIndex& c : members_) {
      const int s = ambient_->slot(c);
      if (s < 0) throw std::invalid_argument("CellSet: member outside ambient mask");
    }
    bitmap_.assign(ambient_->cell_count(), 0);
    for (const CellIndex& c : members_)
      bitmap_[static_cast<std::size_t>(ambient_->slot(c))] = 1;
  }

  const BallDomain& ambient() const { return *ambient_; }
  const DomainPtr& ambient_ptr() const { return ambient_; }
  const std::vector<CellIndex>& members() const { return members_; }
  std::size_t count() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  double measure() const {
    return static_cast<double>(members_.size()) * ambient_->cell_volume();
  }

  bool contains(const CellIndex& c) const {
    const int s = ambient_->slot(c);
    return s >= 0 && bitmap_[static_cast<std::size_t>(s)] != 0;
  }
  bool contains_point(const Point& p) const { return contains(ambient_->cell_of(p)); }

  bool disjoint_from(const CellSet& other) const {
    for (const CellIndex& c : members_)
      if (other.contains(c)) return false;
    return true;
  }

  bool subset_of(const CellSet& other) const {
    for (const CellIndex& c : members_)
      if (!other.contains(c)) return false;
    return true;
  }

 private:
  DomainPtr ambient_;
  std::vector<CellIndex> members_;
  std::vector<std::uint8_t> bitmap_;
};

/// Cells of `b` whose value satisfies the predicate, as a CellSet on `b`.
inline CellSet levelset_cells(const ScalarField& u, const DomainPtr& b,
                              const Predicate& pred) {
  detail::require_subdomain(u, *b);
  std::vector<CellIndex> members;
  const BallDomain& dom = u.domain();
  for (const CellIndex& c : b->cells()) {
    const int s = dom.slot(c);
    if (s < 0) throw std::invalid_argument("levelset_cells: cell missing from field domain");
    if (pred(u[static_cast<std::size_t>(s)])) members.push_back(c);
  }
  return CellSet(b, std::move(members));
}

inline CellSet full_set(const DomainPtr& b) { return CellSet(b, b->cells()); }

}  // namespace degiorgi
