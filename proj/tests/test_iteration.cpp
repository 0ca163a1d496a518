#include <catch2/catch_amalgamated.hpp>

#include "degiorgi/iteration.hpp"

using namespace degiorgi;

namespace {
const Certificate kTrustedSub{Mode::Subsolution, 0.0, 1.0};
const Certificate kTrustedSol{Mode::Solution, 0.0, 1.0};
}  // namespace

TEST_CASE("shift constant A: closed form for n = 3") {
  const ConstantsLedger L = ConstantsLedger::make(3, 1, 1, 1.0);
  const double expected = std::pow(2.0, 7.5) * std::pow(3.0, 1.5) /
                          std::pow(4 * kPi / 3, 0.25);
  CHECK(L.shift_a() == Catch::Approx(expected));
  CHECK(L.shift_a() > 1.0);
  CHECK(L.shift_a_is_closed_form());
}

TEST_CASE("shift constant A is nondecreasing in the ellipticity ratio") {
  for (int n : {2, 3}) {
    const double a1 = ConstantsLedger::make(n, 1, 1, 0.4).shift_a();
    const double a10 = ConstantsLedger::make(n, 1, 10, 0.4).shift_a();
    CHECK(a10 > a1);
  }
}

TEST_CASE("re-derived n = 2 constant closes the quarter-measure chain") {
  // A is chosen so (|B_1|/A^2)^{1-2/p} C2^2 |B_1| = 2^{-n-2} |B_1| exactly.
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 10, 0.43);
  const double A = L.shift_a();
  const double b1 = ball_measure(2, 1.0);
  const double lhs = std::pow(b1 / (A * A), 1.0 - 2.0 / L.p) * sq(L.c2()) * b1;
  const double rhs = std::pow(2.0, -4.0) * b1;
  CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
  CHECK_FALSE(L.shift_a_is_closed_form());
}

TEST_CASE("halving step on constants and zero fields") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  auto half = b2->concentric(0.5);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const double slack = 1.0 + 10.0 / 32;

  auto c = constant_field(b2, 2.0);
  HalvingOutcome hc = lambda_step(c, *ball, *half, L, kTrustedSub, slack);
  CHECK(hc.m == Catch::Approx(2.0));
  CHECK(sup_over(*hc.v, *ball) == 0.0);  // A > 1 wipes constants
  CHECK(hc.report.pass);
  CHECK(hc.report.extra["chebyshev"]["pass"].get<bool>());
  CHECK(hc.report.extra["quarter_measure"]["pass"].get<bool>());

  auto z = constant_field(b2, 0.0);
  HalvingOutcome hz = lambda_step(z, *ball, *half, L, kTrustedSub, slack);
  CHECK(hz.report.pass);
  CHECK(hz.report.note.find("trivial") != std::string::npos);
}

TEST_CASE("halving pass/fail is invariant under positive scaling") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  auto half = b2->concentric(0.5);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  auto u = make_field(b2, [](const Point& x) { return std::max(x[0] + 0.5, 0.0); });
  HalvingOutcome a = lambda_step(u, *ball, *half, L, kTrustedSub, 1.2);
  HalvingOutcome b =
      lambda_step(u.map([](double v) { return 10 * v; }), *ball, *half, L, kTrustedSub, 1.2);
  CHECK(b.m == Catch::Approx(10 * a.m));
  CHECK(b.report.lhs == Catch::Approx(10 * a.report.lhs).margin(1e-12));
  CHECK(a.report.pass == b.report.pass);
}

TEST_CASE("larger A never turns a pass into a fail") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  auto half = b2->concentric(0.5);
  auto u = make_field(b2, [](const Point& x) { return std::max(1.0 - norm2(x, 2), 0.0); });
  // Larger S gives larger A; v shrinks pointwise with A.
  const ConstantsLedger small = ConstantsLedger::make(2, 1, 1, 0.2);
  const ConstantsLedger big = ConstantsLedger::make(2, 1, 1, 2.0);
  HalvingOutcome hs = lambda_step(u, *ball, *half, small, kTrustedSub, 1.2);
  HalvingOutcome hb = lambda_step(u, *ball, *half, big, kTrustedSub, 1.2);
  for (std::size_t i = 0; i < hs.v->size(); ++i) CHECK((*hb.v)[i] <= (*hs.v)[i]);
  CHECK((!hs.report.pass || hb.report.pass));
}

TEST_CASE("dyadic iteration to the center") {
  auto b1 = BallDomain::make(2, 1.0, 1.0 / 64);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const double slack = 1.0 + 10.0 / 64;

  auto one = constant_field(b1, 1.0);
  IterationTrace t1 = iterate_to_point(one, L, kTrustedSub, slack);
  CHECK(t1.m0 == Catch::Approx(1.0));
  CHECK(t1.report.pass);
  CHECK(t1.center_value <= 2 * L.shift_a() * t1.m0);
  CHECK(t1.cumulative_shift <= 2 * L.shift_a() * t1.m0 * slack);

  auto zero = constant_field(b1, 0.0);
  IterationTrace t0 = iterate_to_point(zero, L, kTrustedSub, slack);
  CHECK(t0.report.pass);
  CHECK(t0.report.lhs == 0.0);

  // Every performed step is logged with its radius and ratio.
  auto bump = make_field(b1, [](const Point& x) {
    return std::max(0.5 - norm2(x, 2), 0.0);
  });
  IterationTrace tb = iterate_to_point(bump, L, kTrustedSub, slack);
  CHECK(tb.report.pass);
  for (const auto& s : tb.steps) {
    CHECK(s.radius >= 8.0 / 64 - 1e-12);
    CHECK(s.halved);
  }
}

TEST_CASE("local maximum bound") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const double slack = 1.0 + 10.0 / 32;

  auto one = constant_field(b2, 1.0);
  LemmaReport r1 = local_max_bound(one, *b2, *ball, Mode::Subsolution, L, kTrustedSub, slack);
  CHECK(r1.pass);
  CHECK(r1.lhs == 1.0);
  CHECK(r1.rhs == Catch::Approx(8 * L.shift_a()));

  // x1 on B_2 as a solution: sup_{B_1}|u| = 1 and the slashed L2 average is 1.
  auto u = make_field(b2, [](const Point& x) { return x[0]; });
  LemmaReport r2 = local_max_bound(u, *b2, *ball, Mode::Solution, L, kTrustedSol, slack);
  CHECK(r2.pass);
  CHECK(r2.lhs == Catch::Approx(1.0).margin(0.04));
  CHECK(r2.rhs == Catch::Approx(8 * L.shift_a()).epsilon(0.02));

  // Mode mismatch is rejected.
  CHECK_THROWS_AS(local_max_bound(u, *b2, *ball, Mode::Subsolution, L, kTrustedSol, slack),
                  std::invalid_argument);
}
