#pragma once

#include <vector>

#include "gspt/singular.hpp"

namespace gspt {

/// Limiting chart-K2 system x' = a0 u, u' = d0 + b1 x u.
struct RiccatiProblem {
  double a0 = 1.0, b1 = 1.0, d0 = 1.0;
  double x_min = -40.0, x_max = 40.0;

  /// Span defaults to +-25 length_scale().
  static RiccatiProblem from(const ExpansionCoeffs& c);
  static RiccatiProblem from(const ExpansionCoeffs& c, double x_min, double x_max);
  /// (2 d0^2 / (a0 b1))^{1/3}
  double omega_scale() const;
  /// (4 a0 d0 / b1^2)^{1/3}, the x-scale of the normalised problem
  double length_scale() const;
};

struct RiccatiSolution {
  std::vector<double> x;
  std::vector<double> zeta;
  bool positive = true;  // zeta > 0 at every grid point
};

/// Special solution zeta(x) of du/dx = (d0 + b1 x u)/(a0 u), started on the left asymptote
/// u = -(d0/b1)/x at x = x_min. Requires x_min <= -10 (d0/b1)^{1/3}.
RiccatiSolution riccati_special_solution(const RiccatiProblem& prob, const std::vector<double>& grid);

/// Smallest positive zero of J_{-1/3}(2z^{3/2}/3) + J_{1/3}(2z^{3/2}/3) (series Bessel values,
/// scan of (0, 5] at step `scan_step`, then bisection).
double omega0_constant(double scan_step = 0.01);

/// Bessel J_nu(w) by its power series (|w| <= 20).
double bessel_j_series(double nu, double w);

/// Ai(x) by the Maclaurin series (|x| <= 5 is plenty for the first zero).
double airy_ai_series(double x);

/// Smallest positive z with Ai(-z) = 0, from the Airy series.
double airy_first_zero_series();

struct TailFit {
  double exponent = 0.0;   // left: |zeta + (d0/b1)/x| ~ C |x|^-exponent
  double constant = 0.0;   // right: limit of zeta - (b1/2a0) x^2 + (2 d0/b1)/x
  double predicted = 0.0;  // (2 d0^2/(a0 b1))^{1/3} Omega_0
};

/// Log-log fit of the left-tail error on [-x_far, -x_near]; 0 picks (3, 12) length_scale().
TailFit left_tail_fit(const RiccatiProblem& prob, double x_near = 0.0, double x_far = 0.0);

/// Right-tail constant by least squares on C + k3/x^3 + k4/x^4 over [x_near, x_far];
/// 0 picks 6 length_scale() and x_max.
TailFit right_tail_fit(const RiccatiProblem& prob, double x_near = 0.0, double x_far = 0.0);

/// Special solution of the normalised Riccati problem (a0, b1, d0) = (1, 2, 1) mapped back with
/// x2 = xt/alpha, u2 = ut/beta; returns the largest deviation from the direct solution on the grid.
double normalised_mapping_error(const RiccatiProblem& prob, const std::vector<double>& grid);

struct ExitCheck {
  double delta = 0.0;
  double predicted = 0.0;  // u2 on Sigma_2^out from the asymptotic exit formula
  double direct = 0.0;     // zeta(delta^{-1/3})
  double difference() const { return direct - predicted; }
};
ExitCheck sigma2_exit_check(const RiccatiProblem& prob, double delta);

}  // namespace gspt
