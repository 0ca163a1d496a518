#include <catch2/catch_amalgamated.hpp>

#include "degiorgi/field.hpp"
#include "degiorgi/level_set.hpp"
#include "degiorgi/rng.hpp"

using namespace degiorgi;

TEST_CASE("ball and sphere measures") {
  CHECK(ball_measure(2, 1) == Catch::Approx(kPi));
  CHECK(ball_measure(3, 1) == Catch::Approx(4 * kPi / 3));
  CHECK(ball_measure(2, 2) == Catch::Approx(4 * kPi));
  CHECK(sphere_measure(2) == Catch::Approx(2 * kPi));
  CHECK(sphere_measure(3) == Catch::Approx(4 * kPi));
  CHECK_THROWS_AS(ball_measure(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(ball_measure(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(sphere_measure(1), std::invalid_argument);
}

TEST_CASE("mask volume approaches the closed form") {
  for (double h : {1.0 / 64, 1.0 / 128}) {
    auto b = BallDomain::make(2, 1.0, h);
    CHECK(std::abs(b->mask_volume() - kPi) / kPi < 0.05);
  }
  auto b3 = BallDomain::make(3, 1.0, 1.0 / 16);
  CHECK(std::abs(b3->mask_volume() - 4 * kPi / 3) / (4 * kPi / 3) < 0.10);
}

TEST_CASE("domain invariants") {
  CHECK_THROWS_AS(BallDomain::make(2, 1.0, 0.2), std::invalid_argument);  // h > r/8
  CHECK_THROWS_AS(BallDomain::make(4, 1.0, 0.01), std::invalid_argument);
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  for (const CellIndex& c : b->cells())
    CHECK(dist(b->cell_center(c), b->center(), 2) < 1.0);
  // Nested mask is a subset of the parent mask on the shared lattice.
  auto half = b->concentric(0.5);
  CHECK(b->covers(*half));
}

TEST_CASE("l2 average") {
  auto b1 = BallDomain::make(2, 1.0, 1.0 / 64);
  auto c = constant_field(b1, -3.0);
  CHECK(l2_average(c, *b1) == Catch::Approx(3.0));

  auto u = make_field(b1, [](const Point& x) { return x[0]; });
  // Analytic: int_{B_1} x1^2 = pi/4, so the average is 1/4 and the root 1/2.
  CHECK(l2_average(u, *b1) == Catch::Approx(0.5).margin(0.005));

  auto b2 = BallDomain::make(2, 2.0, 1.0 / 64);
  auto u2 = make_field(b2, [](const Point& x) { return x[0]; });
  // int_{B_2} x1^2 = 4 pi over |B_2| = 4 pi.
  CHECK(l2_average(u2, *b2) == Catch::Approx(1.0).margin(0.005));
}

TEST_CASE("l2 average is positively homogeneous") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  auto u = make_field(b, [](const Point& x) { return x[0] + 0.3 * x[1]; });
  const double base = l2_average(u, *b);
  for (double s : {2.0, -5.0, 0.25}) {
    auto v = u.map([s](double x) { return s * x; });
    CHECK(l2_average(v, *b) == Catch::Approx(std::abs(s) * base));
  }
}

TEST_CASE("level-set measures") {
  auto b1 = BallDomain::make(2, 1.0, 1.0 / 64);

  auto r = make_field(b1, [](const Point& x) { return norm2(x, 2); });
  const double annulus = levelset_measure(r, *b1, Predicate::ge(0.5)).measure;
  CHECK(std::abs(annulus - 3 * kPi / 4) / (3 * kPi / 4) < 0.05);

  auto zero = constant_field(b1, 0.0);
  CHECK(levelset_measure(zero, *b1, Predicate::eq(0.0)).measure ==
        Catch::Approx(b1->mask_volume()));

  auto u = make_field(b1, [](const Point& x) { return x[0]; });
  const double halfdisk = levelset_measure(u, *b1, Predicate::gt(0.0)).measure;
  CHECK(std::abs(halfdisk - kPi / 2) / (kPi / 2) < 0.05);
}

TEST_CASE("discrete Chebyshev inequality is exact") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> vals(b->cell_count());
    for (double& v : vals) v = rng.uniform(-2, 2);
    ScalarField u(b, std::move(vals));
    double mass = 0;
    for (std::size_t i = 0; i < u.size(); ++i) mass += u[i] * u[i];
    mass *= b->cell_volume();
    for (double t : {0.1, 0.5, 1.0, 1.9}) {
      const double lvl = levelset_measure(u, *b, Predicate::ge(t)).measure;
      CHECK(lvl <= mass / (t * t) + 1e-15);
    }
  }
}

TEST_CASE("partition additivity is exact in counts") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 64);
  Rng rng(7);
  std::vector<double> vals(b->cell_count());
  for (double& v : vals) {
    const double x = rng.uniform();
    v = x < 0.3 ? 0.0 : x;  // plenty of exact zeros, values in [0,1)
  }
  ScalarField u(b, std::move(vals));
  const auto zero = levelset_measure(u, *b, Predicate::eq(0.0));
  const auto mid = levelset_measure(u, *b, Predicate::between(0.0, 0.5));
  const auto high = levelset_measure(u, *b, Predicate::ge(0.5));
  CHECK(zero.count + mid.count + high.count == b->cell_count());
  // h is dyadic, so the measures add exactly in floating point too.
  CHECK(zero.measure + mid.measure + high.measure == b->mask_volume());
}

TEST_CASE("truncations") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  auto one = constant_field(b, 1.0);
  CHECK(sup_over(truncate_shift(one, 2.0), *b) == 0.0);
  CHECK(sup_over(truncate_shift(one, 0.0), *b) == 1.0);
  CHECK(inf_over(truncate_shift(one, 0.0), *b) == 1.0);

  auto u = make_field(b, [](const Point& x) { return x[0]; });
  auto t = truncate_shift(u, 0.5);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x1 = b->cell_center(i)[0];
    CHECK(t[i] == std::max(x1 - 0.5, 0.0));
  }
}

TEST_CASE("truncation composition law") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  auto u = make_field(b, [](const Point& x) { return 1.0 + x[0] + 0.5 * x[1]; });
  auto lhs = truncate_shift(truncate_shift(u, 0.25), 0.5);
  auto rhs = truncate_shift(u, 0.75);
  for (std::size_t i = 0; i < lhs.size(); ++i)
    CHECK(lhs[i] == Catch::Approx(rhs[i]).margin(1e-15));
}

TEST_CASE("rescale_truncate") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  auto one = constant_field(b, 1.0);
  auto half = constant_field(b, 0.5);
  CHECK(sup_over(rescale_truncate(one, 1), *b) == 1.0);
  CHECK(inf_over(rescale_truncate(one, 1), *b) == 1.0);
  CHECK(sup_over(rescale_truncate(half, 1), *b) == 0.0);

  auto u = make_field(b, [](const Point& x) { return 0.5 + 0.5 * x[0] * x[0]; });
  auto u0 = rescale_truncate(u, 0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u0[i] == u[i]);

  auto bad = constant_field(b, 1.5);
  CHECK_THROWS_AS(rescale_truncate(bad, 1), std::domain_error);
  CHECK_THROWS_AS(rescale_truncate(u, -1), std::invalid_argument);

  // Output stays in [0, 1].
  auto uk = rescale_truncate(u, 3);
  CHECK(sup_over(uk, *b) <= 1.0);
  CHECK(inf_over(uk, *b) >= 0.0);
}

TEST_CASE("field restriction is exact on the shared lattice") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 16);
  auto u = make_field(b2, [](const Point& x) { return std::sin(x[0]) + x[1]; });
  auto b1 = b2->concentric(1.0);
  auto v = restrict_to(u, b1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int s = b2->slot(b1->cells()[i]);
    REQUIRE(s >= 0);
    CHECK(v[i] == u[static_cast<std::size_t>(s)]);
  }
  CHECK(sup_over(u, *b1) == sup_over(v, *b1));
}

TEST_CASE("center cell value") {
  auto b = BallDomain::make(2, 1.0, 1.0 / 32);
  auto u = make_field(b, [](const Point& x) { return 5 + x[0] * x[1]; });
  CHECK(u.center_value() == 5.0);
}
