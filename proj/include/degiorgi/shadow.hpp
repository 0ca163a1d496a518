#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "degiorgi/level_set.hpp"
#include "degiorgi/report.hpp"
#include "degiorgi/rng.hpp"

namespace degiorgi {

/// Unit direction sample with equal spherical quadrature weights: uniformly
/// spaced angles (n=2) or a Fibonacci spiral (n=3), rotated by a seeded
/// offset.
struct DirectionSample {
  int dim = 2;
  std::vector<Point> directions;
  std::uint64_t seed = 0;

  double weight() const {
    return sphere_measure(dim) / static_cast<double>(directions.size());
  }
  std::size_t size() const { return directions.size(); }

  static DirectionSample make(int dim, int count, std::uint64_t seed) {
    if (count < 8) throw std::invalid_argument("DirectionSample: need at least 8 directions");
    DirectionSample D;
    D.dim = dim;
    D.seed = seed;
    D.directions.reserve(count);
    Rng rng(seed ^ 0xd1ec7105u);
    if (dim == 2) {
      const double offset = rng.uniform(0, 2 * kPi);
      for (int i = 0; i < count; ++i) {
        const double t = offset + 2 * kPi * i / count;
        D.directions.push_back({std::cos(t), std::sin(t), 0});
      }
    } else if (dim == 3) {
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      const double offset = rng.uniform(0, 2 * kPi);
      for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double t = offset + golden * i;
        Point p{r * std::cos(t), r * std::sin(t), z};
        const double nn = norm2(p, 3);
        for (int d = 0; d < 3; ++d) p[d] /= nn;
        D.directions.push_back(p);
      }
    } else {
      throw std::invalid_argument("DirectionSample: dimension must be 2 or 3");
    }
    return D;
  }
};

namespace detail {
/// Exact voxel traversal of the ray x + t sigma (t > 0), truncated where it
/// leaves the ambient ball; true iff the ray passes through a member cell.
inline bool ray_hits(const CellSet& E, const Point& x, const Point& sigma) {
  const BallDomain& amb = E.ambient();
  const int dim = amb.dim();
  const double h = amb.h();
  const double R = amb.radius();

  // Exit parameter: positive root of |x + t sigma - center|^2 = R^2.
  const Point rel = sub(x, amb.center());
  double b = 0, c = -R * R;
  for (int d = 0; d < dim; ++d) {
    b += rel[d] * sigma[d];
    c += rel[d] * rel[d];
  }
  const double disc = b * b - c;
  if (disc <= 0) return false;
  const double t_exit = -b + std::sqrt(disc);
  if (t_exit <= 0) return false;

  CellIndex cell = amb.cell_of(x);
  if (E.contains(cell)) return true;  // x + t sigma stays in this cell for small t

  constexpr double kInf = std::numeric_limits<double>::infinity();
  int step[3] = {0, 0, 0};
  double t_next[3] = {kInf, kInf, kInf}, t_delta[3] = {kInf, kInf, kInf};
  for (int d = 0; d < dim; ++d) {
    if (sigma[d] > 1e-15) {
      step[d] = 1;
      t_next[d] = (amb.center()[d] + (cell[d] + 0.5) * h - x[d]) / sigma[d];
      t_delta[d] = h / sigma[d];
    } else if (sigma[d] < -1e-15) {
      step[d] = -1;
      t_next[d] = (amb.center()[d] + (cell[d] - 0.5) * h - x[d]) / sigma[d];
      t_delta[d] = -h / sigma[d];
    }
  }
  for (;;) {
    int dmin = 0;
    for (int d = 1; d < dim; ++d)
      if (t_next[d] < t_next[dmin]) dmin = d;
    if (t_next[dmin] > t_exit) return false;
    cell[dmin] += step[dmin];
    t_next[dmin] += t_delta[dmin];
    if (E.contains(cell)) return true;
  }
}
}  // namespace detail

struct ShadowMeasure {
  double measure = 0;
  std::size_t hits = 0;
  std::size_t total = 0;
  double std_error = 0;  // binomial model: |S^{n-1}| sqrt(p(1-p)/M)
};

/// Spherical measure of the directions in which E is visible from x.
inline ShadowMeasure direction_set_measure(const CellSet& E, const Point& x,
                                           const DirectionSample& D) {
  const BallDomain& amb = E.ambient();
  if (!amb.contains_point(x))
    throw std::invalid_argument("direction_set_measure: viewpoint outside the ball");
  ShadowMeasure out;
  out.total = D.size();
  if (E.empty()) return out;
  for (const Point& sigma : D.directions)
    if (detail::ray_hits(E, x, sigma)) ++out.hits;
  const double M = static_cast<double>(D.size());
  const double p = static_cast<double>(out.hits) / M;
  out.measure = sphere_measure(amb.dim()) * p;
  out.std_error = sphere_measure(amb.dim()) * std::sqrt(std::max(p * (1 - p), 0.0) / M);
  return out;
}

/// Exact n=2 oracle: union of the angular intervals subtended by the member
/// squares as seen from x.
inline double angular_union_measure(const CellSet& E, const Point& x) {
  const BallDomain& amb = E.ambient();
  if (amb.dim() != 2)
    throw std::invalid_argument("angular_union_measure: n = 2 only");
  if (E.empty()) return 0;
  const double hh = amb.h() / 2;
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(E.count());
  for (const CellIndex& c : E.members()) {
    const Point p = amb.cell_center(c);
    if (std::abs(x[0] - p[0]) <= hh && std::abs(x[1] - p[1]) <= hh)
      return 2 * kPi;  // viewpoint inside a member square
    const double base = std::atan2(p[1] - x[1], p[0] - x[0]);
    double lo = 0, hi = 0;
    for (int k = 0; k < 4; ++k) {
      const double cx = p[0] + ((k & 1) ? hh : -hh);
      const double cy = p[1] + ((k & 2) ? hh : -hh);
      double rel = std::atan2(cy - x[1], cx - x[0]) - base;
      while (rel > kPi) rel -= 2 * kPi;
      while (rel < -kPi) rel += 2 * kPi;
      lo = std::min(lo, rel);
      hi = std::max(hi, rel);
    }
    double a = base + lo, b = base + hi;
    while (a < 0) {
      a += 2 * kPi;
      b += 2 * kPi;
    }
    if (b <= 2 * kPi) {
      intervals.emplace_back(a, b);
    } else {  // wraps
      intervals.emplace_back(a, 2 * kPi);
      intervals.emplace_back(0, b - 2 * kPi);
    }
  }
  std::sort(intervals.begin(), intervals.end());
  double total = 0, cur_lo = intervals[0].first, cur_hi = intervals[0].second;
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].first <= cur_hi) {
      cur_hi = std::max(cur_hi, intervals[i].second);
    } else {
      total += cur_hi - cur_lo;
      cur_lo = intervals[i].first;
      cur_hi = intervals[i].second;
    }
  }
  total += cur_hi - cur_lo;
  return total;
}

/// |Sigma(E, x)| >= |E| / 2^n, within 3 Monte Carlo standard errors.
inline LemmaReport verify_l2(const CellSet& E, const Point& x, const DirectionSample& D,
                             ReportInputs inputs = {}) {
  const ShadowMeasure m = direction_set_measure(E, x, D);
  LemmaReport rep;
  rep.lemma_id = "shadow.view_lower_bound";
  rep.inputs = inputs;
  rep.constant_name = "2^-n";
  rep.constant_value = std::ldexp(1.0, -E.ambient().dim());
  rep.lhs = E.measure() * rep.constant_value;
  rep.rhs = m.measure;
  rep.margin = rep.lhs > 0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  rep.pass = m.measure + 3 * m.std_error >= rep.lhs;
  rep.extra = Json{{"hits", m.hits},
                   {"directions", m.total},
                   {"std_error", m.std_error},
                   {"seed", D.seed},
                   {"viewpoint", Json::array({x[0], x[1], x[2]})}};
  return rep;
}

/// Best viewing direction sigma_0 and the covered part E3 of E2, with the
/// averaged lower bound |E3| >= |E1| |E2| / (2^n |S^{n-1}|).
struct ShootingOutcome {
  Point sigma0{1, 0, 0};
  std::size_t sigma_index = 0;
  std::optional<CellSet> e3;
  double mean_e3 = 0;        // mean over sampled directions of |E3(sigma)|
  double mean_identity_gap = 0;
  LemmaReport report;
};

inline ShootingOutcome find_shooting_direction(const CellSet& E1, const CellSet& E2,
                                               const DirectionSample& D, double slack,
                                               ReportInputs inputs = {}) {
  if (E1.empty() || E2.empty())
    throw std::invalid_argument("find_shooting_direction: empty input set");
  if (!E1.disjoint_from(E2))
    throw std::invalid_argument("find_shooting_direction: sets must be disjoint");
  const BallDomain& amb = E1.ambient();
  const int n = amb.dim();
  const double cellvol = amb.cell_volume();
  const std::size_t M = D.size();

  std::vector<std::uint32_t> per_sigma(M, 0);
  std::vector<std::uint32_t> per_x(E2.count(), 0);
  std::vector<std::uint8_t> best_flags, flags(E2.count());
  std::size_t best_count = 0, best_sigma = 0;
  for (std::size_t s = 0; s < M; ++s) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < E2.count(); ++i) {
      const bool hit = detail::ray_hits(E1, amb.cell_center(E2.members()[i]),
                                        D.directions[s]);
      flags[i] = hit ? 1 : 0;
      if (hit) {
        ++count;
        ++per_x[i];
      }
    }
    per_sigma[s] = static_cast<std::uint32_t>(count);
    if (count > best_count || best_flags.empty()) {
      best_count = count;
      best_sigma = s;
      best_flags = flags;
    }
  }

  ShootingOutcome out;
  out.sigma_index = best_sigma;
  out.sigma0 = D.directions[best_sigma];
  std::vector<CellIndex> members;
  for (std::size_t i = 0; i < E2.count(); ++i)
    if (best_flags[i]) members.push_back(E2.members()[i]);
  out.e3.emplace(E2.ambient_ptr(), std::move(members));

  // Change-of-integration-order identity: both orders sum the same hits.
  double sum_sigma = 0, sum_x = 0;
  for (std::size_t s = 0; s < M; ++s) sum_sigma += per_sigma[s] * cellvol;
  for (std::size_t i = 0; i < E2.count(); ++i) sum_x += per_x[i] * cellvol;
  out.mean_e3 = sum_sigma / static_cast<double>(M);
  out.mean_identity_gap =
      std::abs(sum_sigma - sum_x) / std::max(1.0, std::abs(sum_sigma));

  // Standard error of the direction-mean of |E3(sigma)|.
  double var = 0;
  for (std::size_t s = 0; s < M; ++s) var += sq(per_sigma[s] * cellvol - out.mean_e3);
  var /= static_cast<double>(M);
  const double se_mean = std::sqrt(var / static_cast<double>(M));

  LemmaReport& rep = out.report;
  rep.lemma_id = "shadow.shooting";
  rep.inputs = inputs;
  rep.constant_name = "2^-n/|S^{n-1}|";
  rep.constant_value = std::ldexp(1.0, -n) / sphere_measure(n);
  rep.slack = slack;
  rep.lhs = E1.measure() * E2.measure() * rep.constant_value;
  rep.rhs = out.e3->measure();
  rep.margin = rep.lhs > 0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  const double bound_lo = rep.lhs / slack - 3 * se_mean;
  const bool max_ok = out.e3->measure() >= bound_lo;
  const bool mean_ok = out.mean_e3 >= bound_lo;
  rep.pass = max_ok && mean_ok && out.mean_identity_gap <= 1e-12;
  rep.extra = Json{{"mean_e3", out.mean_e3},
                   {"se_mean", se_mean},
                   {"mean_identity_gap", out.mean_identity_gap},
                   {"sigma0", Json::array({out.sigma0[0], out.sigma0[1], out.sigma0[2]})},
                   {"mean_bound_pass", mean_ok},
                   {"seed", D.seed}};
  return out;
}

/// Probe points for the minimum shadow: subsampled cell centers plus a ring
/// of near-boundary points.
inline std::vector<Point> default_probes(const BallDomain& amb,
                                         std::size_t max_interior = 4096,
                                         std::size_t boundary_count = 64) {
  std::vector<Point> probes;
  const std::size_t stride =
      std::max<std::size_t>(1, (amb.cell_count() + max_interior - 1) / max_interior);
  for (std::size_t i = 0; i < amb.cell_count(); i += stride)
    probes.push_back(amb.cell_center(i));
  const double rho = amb.radius() - amb.h() / 2;
  if (amb.dim() == 2) {
    for (std::size_t k = 0; k < boundary_count; ++k) {
      const double t = 2 * kPi * (k + 0.5) / boundary_count;
      probes.push_back({amb.center()[0] + rho * std::cos(t),
                        amb.center()[1] + rho * std::sin(t), 0});
    }
  } else {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < boundary_count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / boundary_count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      probes.push_back({amb.center()[0] + rho * r * std::cos(t),
                        amb.center()[1] + rho * r * std::sin(t),
                        amb.center()[2] + rho * z});
    }
  }
  return probes;
}

struct MinShadow {
  double value = 0;
  Point argmin{0, 0, 0};
  double std_error = 0;
  LemmaReport report;  // min shadow >= |E| / 2^n
};

inline MinShadow min_shadow(const CellSet& E, const DirectionSample& D,
                            const std::vector<Point>& probes, ReportInputs inputs = {}) {
  if (probes.empty()) throw std::invalid_argument("min_shadow: empty probe list");
  MinShadow out;
  out.value = std::numeric_limits<double>::infinity();
  for (const Point& x : probes) {
    const ShadowMeasure m = direction_set_measure(E, x, D);
    if (m.measure < out.value) {
      out.value = m.measure;
      out.argmin = x;
      out.std_error = m.std_error;
    }
  }
  LemmaReport& rep = out.report;
  rep.lemma_id = "shadow.min_shadow_lower_bound";
  rep.inputs = inputs;
  rep.constant_name = "2^-n";
  rep.constant_value = std::ldexp(1.0, -E.ambient().dim());
  rep.lhs = E.measure() * rep.constant_value;
  rep.rhs = out.value;
  rep.margin = rep.lhs > 0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  rep.pass = out.value + 3 * out.std_error >= rep.lhs;
  rep.extra = Json{{"probes", probes.size()},
                   {"argmin", Json::array({out.argmin[0], out.argmin[1], out.argmin[2]})},
                   {"std_error", out.std_error},
                   {"directions", D.size()},
                   {"seed", D.seed}};
  return out;
}

/// The sun-at-the-horizon construction: one small disk high on the vertical
/// axis (E1) and a row of small disks along [-1, -1/2] on the horizontal axis
/// (E2), with the asymptotic expectations used by the optimality check.
struct TreesExample {
  CellSet e1;
  CellSet e2;
  int tree_count = 0;
  double eps = 0, delta = 0;
  double expected_shadow = 0;   // S(E1) ~ eps
  double expected_e2 = 0;       // ~ tree_count * pi (delta/2)^2
  double expected_e3 = 0;       // ~ pi delta^2
};

inline TreesExample build_trees_example(const DomainPtr& ambient, double eps, double delta) {
  if (ambient->dim() != 2)
    throw std::invalid_argument("build_trees_example: planar construction (n = 2)");
  if (!(delta < eps) || !(eps <= 0.125 + 1e-12))
    throw std::invalid_argument("build_trees_example: need h << delta < eps <= 1/8");
  const double h = ambient->h();

  auto disk_cells = [&](const Point& c, double radius) {
    std::vector<CellIndex> cells;
    for (const CellIndex& idx : ambient->cells())
      if (dist(ambient->cell_center(idx), c, 2) <= radius) cells.push_back(idx);
    return cells;
  };

  const Point e1_center{ambient->center()[0], ambient->center()[1] + 7.0 / 8.0, 0};
  std::vector<CellIndex> e1_cells = disk_cells(e1_center, eps / 4);
  if (e1_cells.size() < 4)
    throw std::invalid_argument("build_trees_example: resolution too coarse for eps");

  const int count = static_cast<int>(std::lround(1.0 / (2 * eps)));
  std::vector<CellIndex> e2_cells;
  for (int i = 0; i < count; ++i) {
    const Point c{ambient->center()[0] - 1.0 + (i + 0.5) * eps, ambient->center()[1], 0};
    std::vector<CellIndex> tree = disk_cells(c, delta / 2);
    if (tree.size() < 4)
      throw std::invalid_argument("build_trees_example: resolution too coarse for delta");
    e2_cells.insert(e2_cells.end(), tree.begin(), tree.end());
  }
  std::sort(e2_cells.begin(), e2_cells.end());
  e2_cells.erase(std::unique(e2_cells.begin(), e2_cells.end()), e2_cells.end());

  TreesExample out{CellSet(ambient, std::move(e1_cells)), CellSet(ambient, std::move(e2_cells)),
                   count, eps, delta, eps,
                   count * kPi * sq(delta / 2), kPi * sq(delta)};
  (void)h;
  return out;
}

}  // namespace degiorgi
