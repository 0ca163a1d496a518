#include <catch2/catch_amalgamated.hpp>

#include "degiorgi/shadow.hpp"

using namespace degiorgi;

namespace {
DomainPtr unit_disk() { return BallDomain::make(2, 1.0, 1.0 / 64); }

CellSet halfdisk(const DomainPtr& b, bool upper) {
  std::vector<CellIndex> cells;
  for (const CellIndex& c : b->cells())
    if (upper ? b->cell_center(c)[1] > 0 : b->cell_center(c)[1] < 0) cells.push_back(c);
  return CellSet(b, std::move(cells));
}

CellSet random_set(const DomainPtr& b, Rng& rng, std::size_t count) {
  std::vector<std::uint8_t> taken(b->cell_count(), 0);
  std::vector<CellIndex> cells;
  while (cells.size() < count) {
    const std::size_t s =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(b->cell_count()));
    if (s >= b->cell_count() || taken[s]) continue;
    taken[s] = 1;
    cells.push_back(b->cells()[s]);
  }
  std::sort(cells.begin(), cells.end());
  return CellSet(b, std::move(cells));
}
}  // namespace

TEST_CASE("direction sample invariants") {
  for (int n : {2, 3}) {
    const DirectionSample D = DirectionSample::make(n, 256, 11);
    CHECK(D.size() == 256);
    for (const Point& s : D.directions)
      CHECK(std::abs(norm2(s, n) - 1.0) < 1e-12);
    CHECK(D.weight() * D.size() == Catch::Approx(sphere_measure(n)).margin(1e-12));
  }
  CHECK_THROWS_AS(DirectionSample::make(2, 4, 0), std::invalid_argument);
}

TEST_CASE("full mask is visible in every direction from the center") {
  auto b = unit_disk();
  const CellSet E = full_set(b);
  const DirectionSample D = DirectionSample::make(2, 360, 3);
  const ShadowMeasure m = direction_set_measure(E, Point{0, 0, 0}, D);
  CHECK(m.hits == D.size());
  CHECK(m.measure == Catch::Approx(2 * kPi));
  // Interior viewpoints likewise.
  const ShadowMeasure m2 = direction_set_measure(E, Point{0.3, 0.2, 0}, D);
  CHECK(m2.hits == D.size());
}

TEST_CASE("upper half-disk from the origin spans a half circle") {
  auto b = unit_disk();
  const CellSet E = halfdisk(b, true);
  const DirectionSample D = DirectionSample::make(2, 720, 5);
  const ShadowMeasure m = direction_set_measure(E, Point{0, 0, 0}, D);
  CHECK(m.measure == Catch::Approx(kPi).margin(3 * m.std_error + 0.05));
}

TEST_CASE("view lower bound |Sigma| >= |E|/2^n") {
  auto b = unit_disk();
  const DirectionSample D = DirectionSample::make(2, 720, 5);
  CHECK(verify_l2(full_set(b), Point{0, 0, 0}, D).pass);
  CHECK(verify_l2(halfdisk(b, true), Point{0, 0, 0}, D).pass);
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    const CellSet E = random_set(b, rng, 200);
    const Point x = b->cell_center(
        static_cast<std::size_t>(rng.uniform() * (double)b->cell_count() / 2));
    CHECK(verify_l2(E, x, D).pass);
  }
}

TEST_CASE("monte carlo shadow matches the exact angular-union oracle") {
  auto b = unit_disk();
  const DirectionSample D = DirectionSample::make(2, 720, 21);
  Rng rng(31);
  for (int i = 0; i < 5; ++i) {
    const CellSet E = random_set(b, rng, 120);
    Point x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0};
    const ShadowMeasure mc = direction_set_measure(E, x, D);
    const double oracle = angular_union_measure(E, x);
    CHECK(std::abs(mc.measure - oracle) <= 3 * mc.std_error + 1e-9);
  }
  // Viewpoint inside a member square sees everything.
  const CellSet E = random_set(b, rng, 50);
  const Point inside = b->cell_center(E.members().front());
  CHECK(angular_union_measure(E, inside) == Catch::Approx(2 * kPi));
}

TEST_CASE("shadow monotone under set enlargement, sample by sample") {
  auto b = unit_disk();
  const DirectionSample D = DirectionSample::make(2, 360, 9);
  Rng rng(41);
  const CellSet small = random_set(b, rng, 100);
  std::vector<CellIndex> bigger = small.members();
  const CellSet extra = random_set(b, rng, 150);
  bigger.insert(bigger.end(), extra.members().begin(), extra.members().end());
  std::sort(bigger.begin(), bigger.end());
  bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
  const CellSet big(b, std::move(bigger));
  for (const Point x : {Point{0, 0, 0}, Point{0.4, -0.2, 0}}) {
    const ShadowMeasure a = direction_set_measure(small, x, D);
    const ShadowMeasure c = direction_set_measure(big, x, D);
    CHECK(a.hits <= c.hits);
  }
}

TEST_CASE("quarter-turn rotation equivariance within monte carlo error") {
  auto b = unit_disk();
  Rng rng(55);
  const CellSet E = random_set(b, rng, 150);
  std::vector<CellIndex> rot;
  for (const CellIndex& c : E.members()) rot.push_back(CellIndex{-c[1], c[0], 0});
  std::sort(rot.begin(), rot.end());
  const CellSet Erot(b, std::move(rot));
  const Point x{0.35, -0.15, 0}, xr{0.15, 0.35, 0};
  const DirectionSample D1 = DirectionSample::make(2, 720, 100);
  const DirectionSample D2 = DirectionSample::make(2, 720, 101);  // re-randomized
  const ShadowMeasure a = direction_set_measure(E, x, D1);
  const ShadowMeasure c = direction_set_measure(Erot, xr, D2);
  CHECK(std::abs(a.measure - c.measure) <= 3 * (a.std_error + c.std_error) + 1e-9);
}

TEST_CASE("shooting between the two half-disks") {
  auto b = unit_disk();
  const CellSet E1 = halfdisk(b, true), E2 = halfdisk(b, false);
  const DirectionSample D = DirectionSample::make(2, 720, 7);
  ShootingOutcome shot = find_shooting_direction(E1, E2, D, 1.15);
  CHECK(shot.report.pass);
  // Nearly vertical best direction covers nearly all of E2.
  CHECK(shot.sigma0[1] > 0.9);
  CHECK(shot.e3->measure() == Catch::Approx(E2.measure()).epsilon(0.05));
  CHECK(shot.report.lhs ==
        Catch::Approx(E1.measure() * E2.measure() / (4 * 2 * kPi)).epsilon(1e-12));
  CHECK(shot.mean_identity_gap <= 1e-12);
  CHECK(shot.e3->subset_of(E2));
  CHECK(shot.e3->disjoint_from(E1));
}

TEST_CASE("shooting between two single cells") {
  auto b = unit_disk();
  const CellSet E1(b, {CellIndex{20, 10, 0}});
  const CellSet E2(b, {CellIndex{-15, -5, 0}});
  const DirectionSample D = DirectionSample::make(2, 1440, 13);
  ShootingOutcome shot = find_shooting_direction(E1, E2, D, 1.15);
  CHECK(shot.report.pass);
  CHECK(shot.e3->count() == 1);
  CHECK(shot.report.margin > 100.0);  // two-point geometry has a huge margin
}

TEST_CASE("shooting input validation and determinism") {
  auto b = unit_disk();
  const CellSet E1 = halfdisk(b, true), E2 = halfdisk(b, false);
  const DirectionSample D = DirectionSample::make(2, 180, 7);
  CHECK_THROWS_AS(find_shooting_direction(E1, E1, D, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(find_shooting_direction(CellSet(b, {}), E2, D, 1.1),
                  std::invalid_argument);
  ShootingOutcome a = find_shooting_direction(E1, E2, D, 1.1);
  ShootingOutcome c = find_shooting_direction(E1, E2, D, 1.1);
  CHECK(a.sigma_index == c.sigma_index);
  CHECK(a.e3->members() == c.e3->members());
}

TEST_CASE("minimum shadow of the half-radius disk") {
  auto b = unit_disk();
  std::vector<CellIndex> cells;
  for (const CellIndex& c : b->cells())
    if (norm2(b->cell_center(c), 2) < 0.5) cells.push_back(c);
  const CellSet E(b, std::move(cells));
  const DirectionSample D = DirectionSample::make(2, 720, 19);
  const std::vector<Point> probes = default_probes(*b, 512, 64);
  MinShadow ms = min_shadow(E, D, probes);
  // Tangent geometry from the far boundary: 2 asin(1/2) = pi/3.
  CHECK(ms.value == Catch::Approx(kPi / 3).margin(0.25));
  CHECK(ms.report.pass);  // >= |E|/4
  CHECK(norm2(ms.argmin, 2) > 0.9);
}

TEST_CASE("trees example construction and expectations") {
  auto b = unit_disk();
  TreesExample ex = build_trees_example(b, 0.125, 0.03125);
  CHECK(ex.tree_count == 4);
  // Each tree is the 5-cell closed disk of radius h at this resolution.
  CHECK(ex.e2.count() == 20);
  CHECK(ex.e1.count() >= 4);
  CHECK(ex.e1.disjoint_from(ex.e2));
  CHECK(ex.expected_shadow == Catch::Approx(0.125));
  CHECK(ex.expected_e2 == Catch::Approx(4 * kPi * sq(0.03125 / 2)));
  CHECK_THROWS_AS(build_trees_example(b, 0.125, 0.001), std::invalid_argument);
  CHECK_THROWS_AS(build_trees_example(b, 0.5, 0.03), std::invalid_argument);
}

TEST_CASE("shadow error paths") {
  auto b = unit_disk();
  const DirectionSample D = DirectionSample::make(2, 90, 1);
  const CellSet E = full_set(b);
  CHECK_THROWS_AS(direction_set_measure(E, Point{2, 0, 0}, D), std::invalid_argument);
  CHECK(direction_set_measure(CellSet(b, {}), Point{0, 0, 0}, D).measure == 0.0);
  CHECK_THROWS_AS(min_shadow(E, D, {}), std::invalid_argument);
}

TEST_CASE("upper half-ball from the center spans a hemisphere (n = 3)") {
  auto b = BallDomain::make(3, 1.0, 1.0 / 8);
  std::vector<CellIndex> cells;
  for (const CellIndex& c : b->cells())
    if (b->cell_center(c)[2] > 0) cells.push_back(c);
  const CellSet E(b, std::move(cells));
  const DirectionSample D = DirectionSample::make(3, 1024, 3);
  const ShadowMeasure m = direction_set_measure(E, Point{0, 0, 0}, D);
  CHECK(m.measure == Catch::Approx(2 * kPi).margin(3 * m.std_error + 0.2));
  CHECK(verify_l2(E, Point{0, 0, 0}, D).pass);
}
