#include <catch2/catch_amalgamated.hpp>

#include "degiorgi/oscillation.hpp"

using namespace degiorgi;

namespace {
const Certificate kTrustedSub{Mode::Subsolution, 0.0, 1.0};

double circular_segment(double t) {  // area of {x in B_1 : x1 >= t}
  return std::acos(t) - t * std::sqrt(1 - t * t);
}
}  // namespace

TEST_CASE("oscillation basics") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  CHECK(oscillation(constant_field(b2, 3.0), *b2) == 0.0);
  auto u = make_field(b2, [](const Point& x) { return x[0]; });
  CHECK(oscillation(u, *b2) == Catch::Approx(4.0).margin(0.07));
  // Closed windows at lattice-aligned radii are exact for linear fields.
  CHECK(oscillation_in_radius(u, 0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK(oscillation_in_radius(u, 0.25) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("oscillation is affine-covariant") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto u = make_field(b2, [](const Point& x) { return x[0] * x[1]; });
  const double base = oscillation(u, *b2);
  auto v = u.map([](double t) { return -2.5 * t + 7.0; });
  CHECK(oscillation(v, *b2) == Catch::Approx(2.5 * base));
}

TEST_CASE("oscillation ledger formulas") {
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const OscillationLedger O = OscillationLedger::from(L);
  const double A = L.shift_a();
  CHECK(O.eps0 == Catch::Approx(1.0 / (std::pow(2.0, 8) * A * A)));
  CHECK(O.eps1 ==
        Catch::Approx(sq(O.eps0) / (4 * std::pow(2.0, 8) * L.c1() * sq(kPi))));
  CHECK(O.k0 == std::ceil(1.0 / (2 * O.eps1)));
  CHECK(O.log2_one_minus_gamma == -(O.k0 + 1));
  CHECK(O.gamma_above_three_quarters());
  // gamma comparisons work in log space even though gamma rounds to 1.0.
  CHECK(O.ratio_below_gamma(0.999999));
  CHECK_FALSE(O.ratio_below_gamma(1.0));
  CHECK_FALSE(O.ratio_below_gamma(1.7));
}

TEST_CASE("small measure check branches") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  auto half = b2->concentric(0.5);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const OscillationLedger O = OscillationLedger::from(L);
  const double slack = 1.0 + 10.0 / 32;

  LemmaReport r0 =
      small_measure_check(constant_field(b2, 0.0), L, O, *ball, *half, kTrustedSub, slack);
  CHECK(r0.pass);
  CHECK_FALSE(r0.skipped);

  LemmaReport r1 =
      small_measure_check(constant_field(b2, 1.0), L, O, *ball, *half, kTrustedSub, slack);
  CHECK(r1.skipped);
  CHECK(r1.note.find("hypothesis") != std::string::npos);

  // A support measure below eps0 |B_1| at this resolution means an empty
  // support: raising the cut level until Chebyshev forces that is the
  // corpus-side construction.
  auto u = make_field(b2, [](const Point& x) { return std::max(1 - norm2(x, 2), 0.0); });
  const double m = l2_average(u, *ball);
  const double cut = m / std::sqrt(O.eps0 * ball_measure(2, 1.0)) + 1.0;
  auto cutfield = truncate_shift(u, cut);
  LemmaReport r2 = small_measure_check(cutfield, L, O, *ball, *half, kTrustedSub, slack);
  CHECK(r2.pass);
  CHECK_FALSE(r2.skipped);
}

TEST_CASE("intermediate band measures match the ramp geometry") {
  // u = clamp(2(x1 - 1/4), 0, 1): used as a measure-geometry oracle only.
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 128);
  auto ball = b2->concentric(1.0);
  auto u = make_field(b2, [](const Point& x) {
    return std::clamp(2 * (x[0] - 0.25), 0.0, 1.0);
  });

  const double zero_m = levelset_measure(u, *ball, Predicate::le(1e-9)).measure;
  const double mid_m = levelset_measure(u, *ball, Predicate::between(1e-9, 0.5)).measure;
  const double high_m = levelset_measure(u, *ball, Predicate::ge(0.5)).measure;

  CHECK(zero_m == Catch::Approx(kPi - circular_segment(0.25)).epsilon(0.03));
  CHECK(mid_m ==
        Catch::Approx(circular_segment(0.25) - circular_segment(0.5)).epsilon(0.05));
  CHECK(high_m == Catch::Approx(circular_segment(0.5)).epsilon(0.05));

  // The guaranteed band bound holds directly with the proof constant 2^{3n+2}.
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const double kappa = high_m / kPi;
  const double bound = sq(kappa) / (4 * std::pow(2.0, 8) * L.c1() * kPi);
  CHECK(mid_m >= bound);
}

TEST_CASE("intermediate level-set check on the ramp geometry") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 64);
  auto ball = b2->concentric(1.0);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const DirectionSample D = DirectionSample::make(2, 128, 3);
  auto u = make_field(b2, [](const Point& x) {
    return std::clamp(2 * (x[0] - 0.25), 0.0, 1.0);
  });
  LemmaReport r =
      intermediate_levelset_check(u, L, ball, kTrustedSub, D, 1.0 + 10.0 / 64);
  CHECK_FALSE(r.skipped);
  CHECK(r.pass);
  CHECK(r.extra["energy"]["pass"].get<bool>());
  CHECK(r.extra["shooting_chain"]["pass"].get<bool>());

  // kappa = 0 makes the conclusion trivially true, not skipped.
  auto low = make_field(b2, [](const Point& x) {
    return std::clamp(0.2 * (x[0] - 0.25), 0.0, 1.0);
  });
  LemmaReport r0 =
      intermediate_levelset_check(low, L, ball, kTrustedSub, D, 1.0 + 10.0 / 64);
  CHECK_FALSE(r0.skipped);
  CHECK(r0.pass);
  CHECK(r0.lhs == 0.0);

  // Zero-set hypothesis failure is a skip.
  auto big = make_field(b2, [](const Point&) { return 0.9; });
  LemmaReport rs =
      intermediate_levelset_check(big, L, ball, kTrustedSub, D, 1.0 + 10.0 / 64);
  CHECK(rs.skipped);
}

TEST_CASE("staircase measure monotonicity") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  auto ball = b2->concentric(1.0);
  auto w = make_field(b2, [](const Point& x) {
    return std::clamp(0.5 + 0.3 * x[0] + 0.2 * x[1] * x[1], 0.0, 1.0);
  });
  double prev = -1;
  for (int k = 1; k <= 4; ++k) {
    const double level = 1.0 - std::ldexp(1.0, -k);
    const double settled = levelset_measure(w, *ball, Predicate::le(level)).measure;
    CHECK(settled >= prev);
    prev = settled;
  }
}

TEST_CASE("decay ratio for the linear solution is one quarter") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  SymMat ident = sym_identity(1.0);
  ident[2] = 0;
  auto coef = uniform_coefficients(b2, ident);
  WeakProblem p{&coef, boundary_function("x1")};
  const ScalarField u = solve(p);
  const Certificate cert{Mode::Solution, weak_residual(u, coef, Mode::Solution), 1e-6};
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const OscillationLedger O = OscillationLedger::from(L);
  const DirectionSample D = DirectionSample::make(2, 96, 2);
  DecayReport dr = oscillation_decay_check(u, coef, L, O, cert, D, 1.0 + 10.0 / 32,
                                           10.0 / 32, 3);
  CHECK(dr.report.pass);
  CHECK(dr.ratio == Catch::Approx(0.25).margin(0.02));
  CHECK_FALSE(dr.steps.empty());
  for (const auto& s : dr.steps) CHECK(s.pass);
}

TEST_CASE("constant solutions have an infinite exponent") {
  auto b2 = BallDomain::make(2, 2.0, 1.0 / 32);
  const ConstantsLedger L = ConstantsLedger::make(2, 1, 1, 0.4);
  const OscillationLedger O = OscillationLedger::from(L);
  const Certificate cert{Mode::Solution, 0.0, 1e-6};
  auto c = constant_field(b2, 2.5);
  HolderReport hr = holder_exponent(c, {2, 1, 0.5, 0.25}, O, cert);
  CHECK(hr.infinite_exponent);
  CHECK(hr.report.pass);

  auto u = make_field(b2, [](const Point& x) { return x[0]; });
  CHECK_THROWS_AS(holder_exponent(u, {2.0}, O, cert), std::invalid_argument);
}
