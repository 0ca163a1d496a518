#pragma once

#include <cmath>
#include <stdexcept>

#include "degiorgi/geometry.hpp"

namespace degiorgi {

/// Closed-form Rayleigh quotient ||v||_p / ||Dv||_2 of the cone v = (1-|x|)^+
/// on the unit ball; a certified lower bound for the Sobolev embedding
/// constant of H_0^1(B_1) into L^p.
inline double cone_sobolev_bound(int n, double p) {
  if (p <= 2) throw std::invalid_argument("cone_sobolev_bound: need p > 2");
  if (n == 2) {
    // int_{B_1} (1-r)^p = 2*pi / ((p+1)(p+2)),   int |D(1-r)|^2 = pi
    return std::pow(2 * kPi / ((p + 1) * (p + 2)), 1.0 / p) / std::sqrt(kPi);
  }
  if (n == 3) {
    // int_{B_1} (1-r)^p = 8*pi / ((p+1)(p+2)(p+3)),   int |D(1-r)|^2 = 4*pi/3
    return std::pow(8 * kPi / ((p + 1) * (p + 2) * (p + 3)), 1.0 / p) /
           std::sqrt(4 * kPi / 3);
  }
  throw std::invalid_argument("cone_sobolev_bound: unsupported dimension");
}

inline double default_sobolev_exponent(int n) { return n == 3 ? 6.0 : 4.0; }

/// All explicit proof constants, recomputed on demand from (lambda, Lambda,
/// n, S) so nothing can drift.
struct ConstantsLedger {
  int n = 2;
  double lambda = 1, Lambda = 1;
  double sobolev_s = 0;  // working embedding constant (certified lower bound)
  double p = 4;          // Sobolev exponent; 2n/(n-2) when n = 3

  static ConstantsLedger make(int n, double lambda, double Lambda, double sobolev_s,
                              double p = 0) {
    if (n != 2 && n != 3) throw std::invalid_argument("ConstantsLedger: n must be 2 or 3");
    if (!(lambda > 0) || !(Lambda >= lambda))
      throw std::invalid_argument("ConstantsLedger: need 0 < lambda <= Lambda");
    if (!(sobolev_s > 0)) throw std::invalid_argument("ConstantsLedger: need S > 0");
    ConstantsLedger L;
    L.n = n;
    L.lambda = lambda;
    L.Lambda = Lambda;
    L.sobolev_s = sobolev_s;
    L.p = p > 0 ? p : default_sobolev_exponent(n);
    if (n == 3 && L.p != 6.0)
      throw std::invalid_argument("ConstantsLedger: n = 3 uses p = 2n/(n-2) = 6");
    if (n == 2 && !(L.p > 2))
      throw std::invalid_argument("ConstantsLedger: n = 2 needs p > 2");
    return L;
  }

  double c1() const { return 4.0 * n * n * Lambda * Lambda / (lambda * lambda); }
  double c2() const { return std::pow(2.0, 1.5) * sobolev_s * std::sqrt(c1()); }

  /// The level-shift constant A > 1 of the halving lemma.
  ///
  /// For n = 3 this is the closed-form expression
  ///   A = 2^{n(n+7)/4} n^{n/2} S^{n/2} (Lambda/lambda)^{n/2} / |B_1|^{(n-2)/4}.
  /// For n = 2 the same Chebyshev + Hoelder chain is re-derived with the
  /// configurable exponent p, giving A = (2^{n+2} C_2^2)^{p/(2(p-2))} |B_1|^{1/2}.
  double shift_a() const {
    double a;
    if (n == 3) {
      a = std::pow(2.0, n * (n + 7) / 4.0) * std::pow(double(n), n / 2.0) *
          std::pow(sobolev_s, n / 2.0) * std::pow(Lambda / lambda, n / 2.0) /
          std::pow(ball_measure(n, 1.0), (n - 2) / 4.0);
    } else {
      const double expo = p / (2.0 * (p - 2.0));
      a = std::pow(std::pow(2.0, n + 2) * sq(c2()), expo) *
          std::sqrt(ball_measure(n, 1.0));
    }
    if (!(a > 1.0))
      throw std::domain_error("shift constant A <= 1 (bad S or ellipticity bounds)");
    return a;
  }

  bool shift_a_is_closed_form() const { return n == 3; }
};

/// Constants of the oscillation-decay argument. gamma = 1 - 2^{-(k0+1)} is so
/// close to 1 that it underflows to 1.0 in double precision; the gap and the
/// derived Hoelder exponent are therefore carried in log2 form as well.
struct OscillationLedger {
  double eps0 = 0;    // small-measure threshold 2^{-(2n+4)} A^{-2}
  double eps1 = 0;    // per-step measure gain, as a fraction of |B_1|
  double k0 = 0;      // ceil(1 / (2 eps1))
  double gamma = 1;   // 1 - 2^{-(k0+1)}, possibly rounded to 1.0
  double log2_one_minus_gamma = 0;  // exactly -(k0+1)
  double alpha_theory = 0;          // log(1/gamma)/log(4), possibly underflowed
  double log2_alpha_theory = 0;

  static OscillationLedger from(const ConstantsLedger& L) {
    OscillationLedger O;
    const double A = L.shift_a();
    O.eps0 = 1.0 / (std::pow(2.0, 2 * L.n + 4) * A * A);
    const double b1 = ball_measure(L.n, 1.0);
    O.eps1 = sq(O.eps0) /
             (sq(double(L.n)) * std::pow(2.0, 3 * L.n + 2) * L.c1() * sq(b1));
    if (!(O.eps1 > 0) || !(O.eps1 < 0.5))
      throw std::domain_error("OscillationLedger: eps1 outside (0, 1/2)");
    O.k0 = std::ceil(1.0 / (2.0 * O.eps1));
    O.log2_one_minus_gamma = -(O.k0 + 1);
    O.gamma = 1.0 - std::exp2(O.log2_one_minus_gamma);  // rounds to 1 for huge k0
    // log(1/gamma)/log(4) with log(1/gamma) = -log1p(-2^{-(k0+1)}) ~ 2^{-(k0+1)}
    O.log2_alpha_theory = O.log2_one_minus_gamma - std::log2(std::log(4.0));
    O.alpha_theory = std::exp2(O.log2_alpha_theory);
    return O;
  }

  /// gamma > 3/4 iff k0 >= 1, checked without evaluating 2^{-(k0+1)}.
  bool gamma_above_three_quarters() const { return k0 >= 1.0; }

  /// True iff ratio < gamma, evaluated in log space so that astronomically
  /// small gaps still compare correctly.
  bool ratio_below_gamma(double ratio) const {
    if (ratio >= 1.0) return false;
    return std::log2(1.0 - ratio) >= log2_one_minus_gamma;
  }
};

}  // namespace degiorgi
