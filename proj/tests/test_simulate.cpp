#include <doctest.h>

#include <cmath>

#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"
#include "gspt/simulate.hpp"

using namespace gspt;

namespace {

// Period of the undesingularised minimal system x' = 1-y, y' = x-1+y+eps/y between upward
// crossings of x = -5 (after transients).
double direct_physical_period(double eps) {
  const VectorField ss1 = [eps](double, const Vec2& z) { return Vec2{1.0 - z.y, z.x - 1.0 + z.y + eps / z.y}; };
  Event cross;
  cross.g = [](double, const Vec2& z) { return z.x + 5.0; };
  cross.direction = 1;
  cross.terminal = false;
  OdeOptions o;
  o.rtol = 1e-11;
  o.atol = 1e-12;
  o.store = false;
  const OdeResult r = solve(ss1, 0.0, {0.5, 0.5}, 200.0, o, {cross});
  REQUIRE(r.hits.size() >= 4);
  const auto n = r.hits.size();
  return r.hits[n - 1].t - r.hits[n - 2].t;
}

}  // namespace

TEST_CASE("minimal model equilibrium sits at (-eps, 1)") {
  const double eps = 0.01;
  const ModelSpec m = builtin_model("minimal", {});
  const auto eq = find_equilibria(m, eps, m.window);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].z.x == doctest::Approx(-eps).epsilon(1e-9));
  CHECK(eq[0].z.y == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("minimal model limit cycle at eps = 1e-2") {
  const double eps = 1e-2;
  const double oracle = direct_physical_period(eps);
  const ModelSpec m = builtin_model("minimal", {});
  const LimitCycle lc = find_limit_cycle(m, eps);
  CHECK(lc.period_physical == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(lc.attracting);
  CHECK(lc.floquet_exponent < 0.0);
  CHECK(lc.strokes == 2);
  CHECK(lc.return_residual < 1e-8);
  CHECK(lc.seed == "singular_cycle");
  // floquet per slow time = log multiplier / (eps * desingularised period)
  CHECK(lc.floquet_exponent == doctest::Approx(lc.log_multiplier / (eps * lc.period_desing)));
}

TEST_CASE("van der Pol cycles have four strokes") {
  const ModelSpec m = builtin_model("vdp", {});
  const LimitCycle lc = find_limit_cycle(m, 1e-2);
  CHECK(lc.strokes == 4);
  CHECK(lc.attracting);
  // classical amplitude: x oscillates between about -2 and 2
  CHECK(lc.amplitude.x_max == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Poincare return on a rotation is the identity") {
  // hand-made model: N = (-y, x), f = 1, G = 0
  ModelSpec m;
  m.name = "rotation";
  m.n_field.value = [](const Vec2& z, double) { return Vec2{-z.y, z.x}; };
  m.f_field.value = [](const Vec2&) { return 1.0; };
  m.g_field.value = [](const Vec2&, double) { return Vec2{0.0, 0.0}; };
  PoincareSection sec;
  sec.base = {1.0, 0.0};
  sec.direction = {1.0, 0.0};
  sec.half_width = 0.5;
  sec.orientation = 1;  // normal (0,1); the flow crosses upward at x > 0
  ReturnOptions ro;
  ro.tol = 1e-12;
  const PoincareResult r = poincare_return(m, 0.0, sec, {1.2, 0.0}, ro);
  CHECK(r.z1.x == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(r.time == doctest::Approx(2 * M_PI).epsilon(1e-9));
  CHECK(r.derivative == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("transition model: two strokes at (1e-2, 5), four at (5, 1e-2)") {
  Params p = default_params("transition");
  p["delta"] = 5.0;
  CHECK(find_limit_cycle(builtin_model("transition", p), 1e-2).strokes == 2);
  p["delta"] = 1e-2;
  CHECK(find_limit_cycle(builtin_model("transition", p), 5.0).strokes == 4);
}

TEST_CASE("integrate rejects tolerances outside the supported range") {
  const ModelSpec m = builtin_model("minimal", {});
  CHECK_THROWS_AS(integrate(m, {0.0, 0.5}, 0.01, 0.0, 1.0, 1e-2), PreconditionError);
}
