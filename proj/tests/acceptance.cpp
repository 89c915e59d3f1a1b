// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
// The exit status is nonzero only when the harness itself breaks; criterion failures are
// reported in the output, not hidden behind the status.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

#include "gspt/blowup.hpp"
#include "gspt/cycle.hpp"
#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"
#include "gspt/polyline.hpp"
#include "gspt/scaling.hpp"
#include "gspt/simulate.hpp"
#include "gspt/singular.hpp"

using namespace gspt;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int n_pass = 0, n_total = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [error: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (dt > budget_s) {
    o.pass = false;
    o.detail << " [over the " << budget_s << " s budget]";
  }
  ++n_total;
  n_pass += o.pass;
  std::printf("%s criterion %2d %s:%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), dt);
  std::fflush(stdout);
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

const char* kTable1[] = {"minimal", "ebers_moll", "stickslip_exp", "stickslip_poly", "transition"};

}  // namespace

int main() {
  std::printf("acceptance run (hardware threads: %u)\n", std::max(1u, std::thread::hardware_concurrency()));

  criterion(1, "contact classification", 6.0, [](Outcome& o) {
    for (const char* name : kTable1) {
      const auto t0 = std::chrono::steady_clock::now();
      const ModelSpec m = builtin_model_with_defaults(name);
      const double mu0 = (*characteristic(m))(0.0);
      const auto cps = find_contact_points(m, trace_critical_curve(m, m.window, 256));
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      o.detail << ' ' << name << "=" << cps.size();
      o.require(cps.size() == 1, std::string(name) + ": exactly one contact point");
      if (cps.size() == 1) {
        const auto& p = cps[0];
        o.require(close(p.location.x, mu0, 1e-8) && close(p.location.y, 0.0, 1e-8), std::string(name) + ": at (mu(0), 0)");
        o.require(p.order == 1 && p.regular && p.jump_class == JumpClass::jump_off, std::string(name) + ": order-1 regular jump-off");
      }
      o.require(dt < 1.0, std::string(name) + ": under 1 s");
    }
    const ModelSpec v = builtin_model("vdp", {});
    const auto cps = find_contact_points(v, trace_critical_curve(v, v.window, 256));
    o.detail << " vdp=" << cps.size();
    o.require(cps.size() == 2, "vdp: two folds");
    for (const auto& p : cps)
      o.require(close(std::fabs(p.location.x), 1.0, 1e-8) && close(p.location.y, -2.0 / 3.0 * p.location.x, 1e-8) &&
                    p.order == 1 && p.regular,
                "vdp fold at (+-1, -+2/3)");
  });

  criterion(2, "N-singularity of the minimal model", 1.0, [](Outcome& o) {
    const ModelSpec m = builtin_model("minimal", {});
    const auto s = find_N_singularities(m, m.window);
    o.require(s.size() == 1, "one N-singularity");
    if (s.empty()) return;
    o.detail << " p0=(" << s[0].location.x << ", " << s[0].location.y << ") trace=" << s[0].trace << " det=" << s[0].det
             << ' ' << to_string(s[0].kind);
    o.require(close(s[0].location.x, 0.0, 1e-8) && close(s[0].location.y, 1.0, 1e-8), "p0 = (0,1)");
    o.require(close(s[0].trace, 1.0, 1e-8) && close(s[0].det, 1.0, 1e-8), "trace = det = 1");
    o.require(s[0].kind == SingularityKind::unstable_focus, "unstable focus");
  });

  criterion(3, "reciprocal points", 5.0, [](Outcome& o) {
    struct Case {
      const char* name;
      double expected, tol;
    };
    for (const Case c : {Case{"minimal", -11.2, 0.1}, Case{"ebers_moll", -6.86, 0.05}, Case{"stickslip_poly", -0.09, 0.02}}) {
      const ModelSpec m = builtin_model_with_defaults(c.name);
      const auto cps = find_contact_points(m, trace_critical_curve(m, m.window, 256));
      if (cps.size() != 1) {
        o.require(false, std::string(c.name) + ": contact point");
        continue;
      }
      const Vec2 L = reciprocal_point(m, cps[0]);
      o.detail << ' ' << c.name << " L_F=(" << L.x << ", " << L.y << ") vs " << c.expected;
      o.require(close(L.x, c.expected, c.tol) && close(L.y, 0.0, c.tol), std::string(c.name) + " within tolerance");
    }
  });

  criterion(4, "projection identities", 1.0, [](Outcome& o) {
    std::mt19937 rng(2024);
    double worst_idem = 0, worst_pn = 0, worst_rp = 0;
    for (const auto& info : model_catalog()) {
      const ModelSpec m = builtin_model_with_defaults(info.name);
      std::uniform_real_distribution<double> ux(m.window.x_min, m.window.x_max);
      int used = 0;
      while (used < 100) {
        Vec2 z{ux(rng), 0.0};
        if (info.name == "vdp") z.y = z.x * z.x * z.x / 3.0 - z.x;
        z = project_to_manifold(m, z);
        // stay off contact points, where Pi is undefined
        if (!m.window.contains(z) || std::fabs(nontrivial_eigenvalue(m, z)) < 1e-2) continue;
        ++used;
        const Mat2 P = projection(m, z);
        const Vec2 n = m.N(z), g = m.G(z, 0.0);
        worst_idem = std::max(worst_idem, (P * P - P).max_abs() / std::max(1.0, P.max_abs()));
        worst_pn = std::max(worst_pn, norm(P * n) / std::max(1.0, norm(n)));
        worst_rp = std::max(worst_rp, norm(reduced_rhs(m, z) - P * g) / std::max(1.0, norm(P * g)));
      }
    }
    o.detail << " |P^2-P|=" << worst_idem << " |PN|=" << worst_pn << " |RP1-RP2|=" << worst_rp;
    o.require(worst_idem <= 1e-10 && worst_pn <= 1e-10 && worst_rp <= 1e-10, "residuals <= 1e-10");
  });

  criterion(5, "exit offset scales like eps^(2/3)", 180.0, [](Outcome& o) {
    for (const char* name : {"minimal", "ebers_moll", "stickslip_poly"}) {
      const auto t0 = std::chrono::steady_clock::now();
      const ModelSpec m = builtin_model_with_defaults(name);
      ScalingOptions so;
      so.cycles = false;
      const ScalingReport r = epsilon_scaling_report(m, log_ladder(-4.5, -2.0, 6), so);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      o.detail << ' ' << name << " slope=" << r.offset_fit.slope << "+-" << r.offset_fit.half_width << " from "
               << r.offset_fit.n << "/6 points (rho " << r.rho << ", " << dt << " s)";
      o.require(r.offset_fit.n == 6, std::string(name) + " offsets at all 6 ladder points");
      o.require(close(r.offset_fit.slope, 2.0 / 3.0, 0.05), std::string(name) + " slope 2/3 +- 0.05");
      o.require(dt < 60.0, std::string(name) + " under 60 s");
    }
  });

  // Not a criterion: the same fit on lower ladders, where the fold regime is reached.
  for (const auto& [name, lo, hi, rho] : {std::tuple{"ebers_moll", -7.5, -5.0, 0.02}, std::tuple{"stickslip_poly", -6.0, -3.5, 0.1}}) {
    try {
      ScalingOptions so;
      so.cycles = false;
      so.rho = rho;
      const ScalingReport r = epsilon_scaling_report(builtin_model_with_defaults(name), log_ladder(lo, hi, 6), so);
      std::printf("  note: %s offset slope on [1e%.1f, 1e%.1f] = %.4f +- %.4f from %d points\n", name, lo, hi,
                  r.offset_fit.slope, r.offset_fit.half_width, r.offset_fit.n);
    } catch (const std::exception& e) {
      std::printf("  note: %s lower-ladder fit failed: %s\n", name, e.what());
    }
  }

  // shared by 6 and 7
  const std::vector<double> ladder{4e-3, 2e-3, 1e-3};
  std::vector<LimitCycle> cycles;
  SingularCycle gamma;

  criterion(6, "unique attracting cycle, Floquet and Hausdorff trends", 120.0, [&](Outcome& o) {
    const ModelSpec m = builtin_model("minimal", {});
    gamma = build_singular_cycle(m);
    const UniquenessProbe u = uniqueness_probe(m, 1e-2, 10, 0.1);
    o.detail << " probe max=" << u.max_distance;
    o.require(u.distances.size() == 10 && u.max_distance <= 1e-6, "10 seeds agree to 1e-6");
    CycleOptions co;
    co.seed = SeedStrategy::singular_cycle;
    const Polyline g = gamma.polyline();
    std::vector<double> scaled, haus;
    for (double eps : ladder) {
      cycles.push_back(find_limit_cycle(m, eps, co));
      const LimitCycle& lc = cycles.back();
      scaled.push_back(-lc.floquet_exponent * eps);
      haus.push_back(hausdorff_distance(lc.samples, g));
      o.require(lc.floquet_exponent < 0.0 && lc.attracting, "negative Floquet exponent");
    }
    std::vector<double> sorted = scaled;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    double spread = 0.0;
    for (double s : scaled) spread = std::max(spread, std::fabs(s / med - 1.0));
    o.detail << " -floquet*eps=";
    for (double s : scaled) o.detail << s << ' ';
    o.detail << "spread=" << spread << " hausdorff=";
    for (double h : haus) o.detail << h << ' ';
    o.require(spread <= 0.25, "-floquet*eps within 25%");
    bool dec = true;
    for (std::size_t i = 1; i < haus.size(); ++i) dec = dec && haus[i] < haus[i - 1];
    o.require(dec, "Hausdorff strictly decreasing");
  });

  criterion(7, "slow segment within O(eps) of S", 30.0, [&](Outcome& o) {
    if (cycles.size() != ladder.size()) throw ConsistencyError("cycles from criterion 6 are missing");
    std::vector<double> d;
    for (const auto& lc : cycles) d.push_back(slow_segment_distance(lc, gamma));
    const LogLogFit f = fit_loglog(ladder, d);
    o.detail << " slope=" << f.slope << " distances=" << d[0] << ' ' << d[1] << ' ' << d[2];
    o.require(close(f.slope, 1.0, 0.15), "slope 1 +- 0.15");
  });

  criterion(8, "two/four-stroke phase diagram", 30.0, [](Outcome& o) {
    const RegimeMap r = stroke_phase_diagram({1e-2, 5.0}, {1e-2, 5.0}, default_params("transition"));
    const int two = r.strokes[0 * 2 + 1], four = r.strokes[1 * 2 + 0];
    o.detail << " (1e-2,5)=" << two << " (5,1e-2)=" << four;
    o.require(two == 2, "2 strokes at (1e-2, 5)");
    o.require(four == 4, "4 strokes at (5, 1e-2)");
  });

  criterion(9, "stick-slip regimes", 120.0, [](Outcome& o) {
    const Params base{{"mu_s", 1.0}, {"a1", 0.75}, {"a3", 0.25}};
    std::vector<double> v0;
    for (int i = 0; i <= 14; ++i) v0.push_back(0.8 + 0.025 * i);  // 0.80 ... 1.15
    for (double extra : {0.86, 0.96, 1.1}) v0.push_back(extra);
    std::sort(v0.begin(), v0.end());
    v0.erase(std::unique(v0.begin(), v0.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }), v0.end());
    RegimeOptions ro;
    ro.eps = 1e-3;
    ro.delta = 1.0;
    const RegimeMap r = stickslip_regime_sweep(base, v0, ro);
    auto label_at = [&](double v) {
      for (std::size_t i = 0; i < r.v0_values.size(); ++i)
        if (std::fabs(r.v0_values[i] - v) < 1e-12) return r.labels[i];
      return Regime::unresolved;
    };
    o.detail << " 1.1=" << to_string(label_at(1.1)) << " 0.96=" << to_string(label_at(0.96))
             << " 0.86=" << to_string(label_at(0.86)) << " v_m=" << r.v_m_detected;
    o.require(label_at(1.1) == Regime::steady_sliding, "1.1 steady_sliding");
    o.require(label_at(0.96) == Regime::pure_slip, "0.96 pure_slip");
    o.require(label_at(0.86) == Regime::stick_slip, "0.86 stick_slip");
    o.require(close(r.v_m_detected, 1.0, 0.02), "v_m = 1.00 +- 0.02");
    if (r.v_ss) {
      o.detail << " v_ss in [" << r.v_ss->first << ", " << r.v_ss->second << "] (small-difference estimate "
               << std::sqrt(0.8) << ")";
      o.require(r.v_ss->first > 0.80 && r.v_ss->second < 0.97, "v_ss bracket inside (0.80, 0.97)");
    } else {
      o.require(false, "v_ss bracket found");
    }
  });

  criterion(10, "Riccati tails and Omega0", 10.0, [](Outcome& o) {
    RiccatiProblem p;  // (1, 1, 1), the minimal model's fold
    const TailFit left = left_tail_fit(p), right = right_tail_fit(p);
    const double om = omega0_constant(), airy = airy_first_zero_series();
    o.detail << " left exponent=" << left.exponent << " right constant=" << right.constant << " predicted=" << right.predicted
             << " Omega0=" << om << " airy=" << airy;
    o.require(left.exponent >= 3.5, "left exponent >= 3.5");
    o.require(close(right.constant, right.predicted, 1e-4), "right constant to 1e-4");
    o.require(close(om, airy, 1e-8), "Omega0 vs Airy to 1e-8");
  });

  criterion(11, "physical period vs the undesingularised system", 10.0, [](Outcome& o) {
    const double eps = 1e-2;
    const ModelSpec m = builtin_model("minimal", {});
    const LimitCycle lc = find_limit_cycle(m, eps);
    // direct integration of x' = 1-y, y' = x-1+y+eps/y
    const VectorField ss1 = [eps](double, const Vec2& z) { return Vec2{1.0 - z.y, z.x - 1.0 + z.y + eps / z.y}; };
    Event cross;
    cross.g = [](double, const Vec2& z) { return z.x + 5.0; };
    cross.direction = 1;
    cross.terminal = false;
    OdeOptions oo;
    oo.rtol = 1e-11;
    oo.atol = 1e-12;
    oo.store = false;
    const OdeResult r = solve(ss1, 0.0, {0.5, 0.5}, 200.0, oo, {cross});
    if (r.hits.size() < 3) throw ConvergenceError("direct integration: too few section crossings");
    const double direct = r.hits.back().t - r.hits[r.hits.size() - 2].t;
    const double rel = std::fabs(lc.period_physical / direct - 1.0);
    o.detail << " physical_time=" << lc.period_physical << " direct=" << direct << " rel=" << rel;
    o.require(rel <= 0.01, "within 1%");
  });

  std::printf("%d of %d criteria pass\n", n_pass, n_total);
  return 0;
}
