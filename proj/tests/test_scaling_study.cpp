#include <doctest.h>

#include <cmath>

#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/scaling.hpp"

using namespace gspt;

TEST_CASE("log-log fit recovers an exact power law") {
  // y = 3 x^0.75 exactly
  std::vector<double> x, y;
  for (int i = 0; i < 6; ++i) {
    x.push_back(std::pow(10.0, -4.0 + 0.5 * i));
    y.push_back(3.0 * std::pow(x.back(), 0.75));
  }
  const LogLogFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f.half_width < 1e-10);
  CHECK(f.valid());
}

TEST_CASE("log-log fit half-width uses the t quantile") {
  // residuals +-d alternating on 4 points: slope error known in closed form
  const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
  const double d = 0.01;
  std::vector<double> y;
  for (int i = 0; i < 4; ++i) y.push_back(x[i] * std::exp(i % 2 ? d : -d));
  const LogLogFit f = fit_loglog(x, y);
  CHECK(f.n == 4);
  CHECK(f.half_width > 0.0);
  CHECK(std::fabs(f.slope - 1.0) < f.half_width);
}

TEST_CASE("log ladder endpoints") {
  const auto v = log_ladder(-4.5, -2.0, 6);
  REQUIRE(v.size() == 6);
  CHECK(v.front() == doctest::Approx(std::pow(10.0, -4.5)));
  CHECK(v.back() == doctest::Approx(1e-2));
}

TEST_CASE("minimal model exit offset shrinks like eps^(2/3)") {
  const ModelSpec m = builtin_model("minimal", {});
  const SectionOffsets a = section_offsets(m, 1e-3), b = section_offsets(m, 1e-4);
  CHECK(a.offset() > 0.0);
  CHECK(b.offset() > 0.0);
  CHECK(a.rho == doctest::Approx(default_rho(m)));
  const double slope = std::log(a.offset() / b.offset()) / std::log(10.0);
  CHECK(slope == doctest::Approx(2.0 / 3.0).epsilon(0.1));
}

TEST_CASE("scaling report needs a real ladder") {
  const ModelSpec m = builtin_model("minimal", {});
  CHECK_THROWS_AS(epsilon_scaling_report(m, {1e-3, 1e-4}), PreconditionError);
}

TEST_CASE("stick-slip regimes at three velocities") {
  Params p{{"delta", 1.0}, {"mu_s", 1.0}, {"a1", 0.75}, {"a3", 0.25}};
  auto label = [&](double v0) {
    p["v0"] = v0;
    return classify_regime(builtin_model("transition", p), 1e-3);
  };
  CHECK(label(1.1) == Regime::steady_sliding);
  CHECK(label(0.96) == Regime::pure_slip);
  CHECK(label(0.86) == Regime::stick_slip);
}

TEST_CASE("stroke diagram validates its base parameters") {
  CHECK_THROWS_AS(stroke_phase_diagram({1e-2}, {1.0}, {{"mu_s", 1.0}}), PreconditionError);
  const RegimeMap r = stroke_phase_diagram({1e-2}, {5.0}, default_params("transition"));
  REQUIRE(r.strokes.size() == 1);
  CHECK(r.strokes[0] == 2);
}
