#include <doctest.h>

#include <cmath>
#include <random>

#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/singular.hpp"

using namespace gspt;

TEST_CASE("minimal model: reduced and desingularised flows by hand") {
  // on y = 0: N = (1, x-1), lambda = x-1, det(N|G) = 1
  // reduced = (-1/(x-1), 0), desingularised = (1, 0)
  const double x = 3.0;
  const Vec2 red_expected{-1.0 / (x - 1.0), 0.0}, des_expected{1.0, 0.0};
  const ModelSpec m = builtin_model("minimal", {});
  const Vec2 red = reduced_rhs(m, {x, 0.0}), des = desingularised_rhs(m, {x, 0.0});
  CHECK(red.x == doctest::Approx(red_expected.x));
  CHECK(std::fabs(red.y) < 1e-14);
  CHECK(des.x == doctest::Approx(des_expected.x));
  CHECK(std::fabs(des.y) < 1e-14);
  CHECK(nontrivial_eigenvalue(m, {x, 0.0}) == doctest::Approx(x - 1.0));
}

TEST_CASE("minimal model: one regular jump-off point at (1, 0)") {
  const ModelSpec m = builtin_model("minimal", {});
  const CriticalCurve c = trace_critical_curve(m, m.window, 256);
  REQUIRE_FALSE(c.empty());
  const auto cps = find_contact_points(m, c);
  REQUIRE(cps.size() == 1);
  CHECK(cps[0].location.x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(cps[0].location.y) < 1e-12);
  CHECK(cps[0].order == 1);
  CHECK(cps[0].regular);
  CHECK(cps[0].jump_class == JumpClass::jump_off);
  // attracting to the left of F, repelling to the right
  for (const auto& b : c.branches) {
    const double xm = b.samples[b.samples.size() / 2].z.x;
    CHECK(b.stability == (xm < 1.0 ? Stability::attracting : Stability::repelling));
  }
}

TEST_CASE("van der Pol: two folds at (+-1, -+2/3)") {
  const ModelSpec m = builtin_model("vdp", {});
  const auto cps = find_contact_points(m, trace_critical_curve(m, m.window, 256));
  REQUIRE(cps.size() == 2);
  for (const auto& p : cps) {
    CHECK(std::fabs(std::fabs(p.location.x) - 1.0) < 1e-8);
    CHECK(p.location.y == doctest::Approx(-2.0 / 3.0 * p.location.x).epsilon(1e-8));
    CHECK(p.order == 1);
    CHECK(p.regular);
    CHECK(p.jump_class == JumpClass::jump_off);
  }
}

TEST_CASE("minimal model N-singularity is an unstable focus at (0,1)") {
  // DN = [[0,-1],[1,1]], f = 1: trace 1, det 1, discriminant < 0
  const ModelSpec m = builtin_model("minimal", {});
  const auto s = find_N_singularities(m, m.window);
  REQUIRE(s.size() == 1);
  CHECK(std::fabs(s[0].location.x) < 1e-8);
  CHECK(std::fabs(s[0].location.y - 1.0) < 1e-8);
  CHECK(std::fabs(s[0].trace - 1.0) < 1e-8);
  CHECK(std::fabs(s[0].det - 1.0) < 1e-8);
  CHECK(s[0].kind == SingularityKind::unstable_focus);
}

TEST_CASE("vdP has no N-singularities and says why") {
  const ModelSpec m = builtin_model("vdp", {});
  std::string why;
  CHECK(find_N_singularities(m, m.window, &why).empty());
  CHECK_FALSE(why.empty());
}

TEST_CASE("projection identities on random points of S") {
  std::mt19937 rng(7);
  for (const auto& info : model_catalog()) {
    const ModelSpec m = builtin_model_with_defaults(info.name);
    std::uniform_real_distribution<double> ux(m.window.x_min, m.window.x_max);
    int used = 0;
    for (int k = 0; k < 200 && used < 30; ++k) {
      Vec2 z{ux(rng), 0.0};
      if (info.name == "vdp") z.y = z.x * z.x * z.x / 3.0 - z.x;
      z = project_to_manifold(m, z);
      if (std::fabs(nontrivial_eigenvalue(m, z)) < 0.05) continue;
      ++used;
      const Mat2 P = projection(m, z);
      CAPTURE(info.name);
      CHECK((P * P - P).max_abs() < 1e-10);
      CHECK(norm(P * m.N(z)) < 1e-10 * (1.0 + norm(m.N(z))));
      const Vec2 a = reduced_rhs(m, z), b = P * m.G(z, 0.0);
      CHECK(norm(a - b) < 1e-10 * (1.0 + norm(b)));
    }
    CHECK(used == 30);
  }
}

TEST_CASE("contact order and normal-form coefficients of the minimal model") {
  const ModelSpec m = builtin_model("minimal", {});
  CHECK(contact_order(m, {1.0, 0.0}) == 1);
  const ExpansionCoeffs c = expansion_coeffs(m, {1.0, 0.0});
  CHECK(c.a0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.b1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.d0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projection onto S and rectified coordinates") {
  const ModelSpec m = builtin_model("vdp", {});
  const Vec2 z = project_to_manifold(m, {2.0, 0.3});
  CHECK(std::fabs(m.f(z)) < 1e-10);
  Rectified r(m, z);
  const Vec2 su = r.from_plane({2.0, 0.3});
  const Vec2 back = r.to_plane(su.x, su.y);
  CHECK(distance(back, Vec2{2.0, 0.3}) < 1e-9);
}
