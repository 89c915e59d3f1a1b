#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/airy.hpp>

#include "gspt/blowup.hpp"
#include "gspt/errors.hpp"
#include "gspt/model.hpp"

using namespace gspt;

TEST_CASE("Omega0 equals the first Airy zero") {
  // Boost's Airy zero is an independent reference
  const double boost_zero = -boost::math::airy_ai_zero<double>(1);
  CHECK(std::fabs(omega0_constant() - boost_zero) < 1e-8);
  CHECK(std::fabs(airy_first_zero_series() - boost_zero) < 1e-8);
  CHECK(std::fabs(omega0_constant(0.005) - omega0_constant(0.01)) < 1e-10);
}

TEST_CASE("series special functions against known values") {
  // J_{1/2}(w) = sqrt(2/(pi w)) sin w ; Ai(0) = 0.35502805388781723926
  const double w = 3.7;
  CHECK(bessel_j_series(0.5, w) == doctest::Approx(std::sqrt(2.0 / (M_PI * w)) * std::sin(w)).epsilon(1e-12));
  CHECK(airy_ai_series(0.0) == doctest::Approx(0.35502805388781723926).epsilon(1e-15));
  CHECK(airy_ai_series(-1.3) == doctest::Approx(boost::math::airy_ai(-1.3)).epsilon(1e-12));
  CHECK_THROWS_AS(bessel_j_series(0.5, 25.0), PreconditionError);
}

TEST_CASE("special Riccati solution tails for (1,1,1)") {
  RiccatiProblem p;
  const TailFit left = left_tail_fit(p), right = right_tail_fit(p);
  CHECK(left.exponent >= 3.5);
  CHECK(std::fabs(right.constant - right.predicted) < 1e-4);
  CHECK(right.predicted == doctest::Approx(std::cbrt(2.0) * omega0_constant()));
}

TEST_CASE("zeta follows the left asymptote and stays positive") {
  // with a0, b1, d0 > 0 the asymptote -(d0/b1)/x is positive for x < 0 and u' = d0 > 0 on u = 0
  RiccatiProblem p;
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-40.0 + 0.2 * i);
  const RiccatiSolution s = riccati_special_solution(p, grid);
  CHECK(s.positive);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    CHECK(s.zeta[i] > 0.0);
    if (s.x[i] < -20.0) CHECK(s.zeta[i] == doctest::Approx(-1.0 / s.x[i]).epsilon(1e-3));
  }
}

TEST_CASE("normalised problem maps onto the general one") {
  const RiccatiProblem p = RiccatiProblem::from(ExpansionCoeffs{2.0, 3.0, 0.5, 0.0});
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(p.x_min + (p.x_max - p.x_min) * i / 100.0);
  CHECK(normalised_mapping_error(p, grid) < 1e-6);
}

TEST_CASE("minimal model fold coefficients give the (1,1,1) problem") {
  const ModelSpec m = builtin_model("minimal", {});
  const RiccatiProblem p = RiccatiProblem::from(expansion_coeffs(m, {1.0, 0.0}));
  CHECK(p.a0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.b1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.d0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exit formula error shrinks with delta") {
  RiccatiProblem p;
  const double d1 = std::fabs(sigma2_exit_check(p, 1e-2).difference());
  const double d2 = std::fabs(sigma2_exit_check(p, 1e-4).difference());
  CHECK(d2 < d1);
  CHECK(d2 < 1e-3);
}

TEST_CASE("preconditions") {
  RiccatiProblem p;
  p.x_min = -2.0;
  CHECK_THROWS_AS(riccati_special_solution(p, {0.0}), PreconditionError);
  p = RiccatiProblem{};
  p.b1 = -1.0;
  CHECK_THROWS_AS(riccati_special_solution(p, {0.0}), PreconditionError);
}
