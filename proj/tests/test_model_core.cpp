#include <doctest.h>

#include <cmath>
#include <limits>

#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"

using namespace gspt;

TEST_CASE("eval_rhs of the minimal model matches the hand expansion") {
  // N = (1-y, x-1+y), f = y, G = (0,1); at (2,3), eps = 0.1: 3*(-2, 4) + (0, 0.1)
  const Vec2 expected{-6.0, 12.1};
  const ModelSpec m = builtin_model("minimal", {});
  const Vec2 got = eval_rhs(m, {2.0, 3.0}, 0.1);
  CHECK(got.x == doctest::Approx(expected.x).epsilon(1e-15));
  CHECK(got.y == doctest::Approx(expected.y).epsilon(1e-15));
}

TEST_CASE("van der Pol in general form") {
  // N = (1,0), f = y + x - x^3/3, G = (0,-x); at (1.5, 0.5): f = 0.875, rhs = (0.875, -eps*1.5)
  const ModelSpec m = builtin_model("vdp", {});
  const Vec2 got = eval_rhs(m, {1.5, 0.5}, 0.2);
  CHECK(got.x == doctest::Approx(0.875));
  CHECK(got.y == doctest::Approx(-0.3));
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  for (const auto& info : model_catalog()) {
    const ModelSpec m = builtin_model_with_defaults(info.name);
    const Window w = m.window;
    for (int i = 1; i < 4; ++i) {
      const Vec2 z{w.x_min + w.width() * i / 4.0, w.y_min + w.height() * (0.3 + 0.1 * i)};
      const double eps = 0.05;
      const Mat2 fd = jacobian_fd([&](const Vec2& p) { return m.rhs(p, eps); }, z);
      const Mat2 an = m.jacobian(z, eps);
      const double scale = 1.0 + std::fabs(fd.a) + std::fabs(fd.b) + std::fabs(fd.c) + std::fabs(fd.d);
      CAPTURE(info.name);
      CHECK(std::fabs(an.a - fd.a) < 1e-6 * scale);
      CHECK(std::fabs(an.b - fd.b) < 1e-6 * scale);
      CHECK(std::fabs(an.c - fd.c) < 1e-6 * scale);
      CHECK(std::fabs(an.d - fd.d) < 1e-6 * scale);
    }
  }
}

TEST_CASE("Ebers-Moll turning point closed form") {
  // mu=1, kappa=1e-2, a=4, b=6: ratio = 4/(10*0.01) = 40
  const double ratio = 40.0;
  const double xs = std::pow(ratio, 4.0 / 6.0) * 0.6, ys = -std::log(ratio) / 6.0;
  const auto [x, y] = em_turning_point(1.0, 1e-2, 4.0, 6.0);
  CHECK(x == doctest::Approx(xs).epsilon(1e-14));
  CHECK(y == doctest::Approx(ys).epsilon(1e-14));
  CHECK_THROWS_AS(em_turning_point(1.0, 0.5, 4.0, 6.0), PreconditionError);
}

TEST_CASE("catalog, defaults and parameter validation") {
  CHECK(model_catalog().size() == 6);
  for (const auto& info : model_catalog()) {
    const Params p = default_params(info.name);
    for (const auto& k : info.required) CHECK(p.count(k) == 1);
    CHECK_NOTHROW(builtin_model(info.name, p));
  }
  CHECK_THROWS_AS(builtin_model("ebers_moll", {{"mu", 1.0}}), PreconditionError);
  CHECK_THROWS_AS(builtin_model("nope", {}), PreconditionError);
  CHECK_THROWS_AS(builtin_model_with_defaults("minimal", {{"bogus", 1.0}}), PreconditionError);
}

TEST_CASE("non-finite inputs are rejected") {
  const ModelSpec m = builtin_model("minimal", {});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_rhs(m, {nan, 0.0}, 0.1), PreconditionError);
  CHECK_THROWS_AS(eval_rhs(m, {0.0, 0.0}, -1.0), PreconditionError);
}

TEST_CASE("reverse_time flips the field") {
  const ModelSpec m = builtin_model_with_defaults("stickslip_exp");
  const ModelSpec r = reverse_time(m);
  const Vec2 z{0.7, 0.3};
  const Vec2 a = eval_rhs(m, z, 0.01), b = eval_rhs(r, z, 0.01);
  CHECK(a.x == doctest::Approx(-b.x));
  CHECK(a.y == doctest::Approx(-b.y));
  CHECK(r.reversed);
}

TEST_CASE("physical_time integrates the time factor") {
  // time factor y on the straight path y = 1 + t over [0,2]: integral 4
  const ModelSpec m = builtin_model("minimal", {});
  const VectorField line = [](double, const Vec2&) { return Vec2{0.0, 1.0}; };
  const OdeResult r = solve(line, 0.0, {0.0, 1.0}, 2.0);
  const PhysicalTime pt = physical_time(m, r.traj);
  CHECK(pt.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(pt.orientation_reversed);
}

TEST_CASE("Dormand-Prince integrator on a rotation with an event") {
  // z' = (-y, x) from (1,0): x = cos t, first downward x-crossing of 0 at pi/2
  const VectorField rot = [](double, const Vec2& z) { return Vec2{-z.y, z.x}; };
  Event e;
  e.g = [](double, const Vec2& z) { return z.x; };
  e.direction = -1;
  OdeOptions o;
  o.rtol = o.atol = 1e-12;
  const OdeResult r = solve(rot, 0.0, {1.0, 0.0}, 10.0, o, {e});
  REQUIRE(r.reason == StopReason::event);
  CHECK(r.t_final == doctest::Approx(M_PI / 2).epsilon(1e-11));
  CHECK(r.traj.at(1.0).x == doctest::Approx(std::cos(1.0)).epsilon(1e-10));
}
