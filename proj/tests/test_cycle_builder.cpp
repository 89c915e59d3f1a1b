#include <doctest.h>

#include <cmath>

#include "gspt/cycle.hpp"
#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"
#include "gspt/polyline.hpp"

using namespace gspt;

namespace {

// Reciprocal point by brute force: follow the layer direction N (f = y > 0 side) from just above F
// until y returns to 0.
double brute_reciprocal_x(const ModelSpec& m, Vec2 F) {
  const VectorField layer = [&](double, const Vec2& z) { return m.N(z); };
  Event back;
  back.g = [](double, const Vec2& z) { return z.y; };
  back.direction = -1;
  OdeOptions o;
  o.rtol = o.atol = 1e-12;
  const OdeResult r = solve(layer, 0.0, F + Vec2{0.0, 1e-9}, 1e4, o, {back});
  REQUIRE(r.reason == StopReason::event);
  return r.z_final.x;
}

}  // namespace

TEST_CASE("minimal model reciprocal point") {
  const ModelSpec m = builtin_model("minimal", {});
  const double oracle = brute_reciprocal_x(m, {1.0, 0.0});
  CHECK(std::fabs(oracle + 11.2) < 0.1);  // published value
  ContactPoint F{{1.0, 0.0}, 1, true, JumpClass::jump_off};
  const ReciprocalResult r = reciprocal_search(m, F);
  CHECK(r.point.x == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(std::fabs(r.point.y) < 1e-10);
  CHECK(r.attracting);
  CHECK(r.lambda < 0.0);
}

TEST_CASE("stick-slip (cubic friction) reciprocal point") {
  const ModelSpec m = builtin_model_with_defaults("stickslip_poly");
  const double mus = m.param("mu_s");
  const double oracle = brute_reciprocal_x(m, {mus, 0.0});
  CHECK(std::fabs(oracle + 0.09) < 0.02);
  const ReciprocalResult r = reciprocal_search(m, {{mus, 0.0}, 1, true, JumpClass::jump_off});
  CHECK(r.point.x == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("layer flow stops on S, reduced segment reaches F") {
  const ModelSpec m = builtin_model("minimal", {});
  const LayerResult lr = layer_flow(m, {0.0, 0.5});
  CHECK(lr.status == LayerStatus::reached_manifold);
  CHECK(std::fabs(lr.end.y) < 1e-9);

  // desingularised flow along y = 0 is x' = 1, so from -5 to F takes 6 units
  const ReducedSegment seg = reduced_segment(m, {-5.0, 0.0}, {{1.0, 0.0}, 1, true, JumpClass::jump_off});
  CHECK(seg.desing_time == doctest::Approx(6.0).epsilon(1e-8));
  // reduced time = integral of -lambda dx = integral of (1 - x) dx over [-5, 1] = 18
  CHECK(seg.reduced_time == doctest::Approx(18.0).epsilon(1e-6));
}

TEST_CASE("singular relaxation cycle of the minimal model") {
  const ModelSpec m = builtin_model("minimal", {});
  const SingularCycle c = build_singular_cycle(m);
  CHECK(c.assumptions_report.a1);
  CHECK(c.assumptions_report.a2);
  CHECK_FALSE(c.repelling);
  const Polyline g = c.polyline();
  CHECK(g.size() > 100);
  // encloses the N-singularity (0, 1), not the far point (20, 20)
  CHECK(winding_number(g, {0.0, 1.0}) != 0);
  CHECK(winding_number(g, {20.0, 20.0}) == 0);
}

TEST_CASE("van der Pol fails the single-jump hypothesis with a report") {
  const ModelSpec m = builtin_model("vdp", {});
  try {
    build_singular_cycle(m);
    FAIL("expected AssumptionFailure");
  } catch (const AssumptionFailure& e) {
    CHECK_FALSE(e.report.a1);
    CHECK_FALSE(e.report.summary().empty());
  }
}

TEST_CASE("polyline helpers") {
  const Polyline sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polyline big{{-1, -1}, {2, -1}, {2, 2}, {-1, 2}};
  CHECK(arclength(sq, true) == doctest::Approx(4.0));
  CHECK(hausdorff_distance(sq, big) == doctest::Approx(std::sqrt(2.0)));  // corner to corner
  CHECK(winding_number(sq, {0.5, 0.5}) != 0);
  CHECK(point_polyline_distance({0.5, 2.0}, sq) == doctest::Approx(1.0));
}
