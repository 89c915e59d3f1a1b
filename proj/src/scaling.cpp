#include "gspt/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "gspt/errors.hpp"
#include "gspt/parallel.hpp"
#include "gspt/singular.hpp"

namespace gspt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ContactPoint jump_off_point(const ModelSpec& model) {
  const CriticalCurve curve = trace_critical_curve(model, model.window, 256);
  std::vector<ContactPoint> jumps;
  for (const auto& c : find_contact_points(model, curve))
    if (c.order == 1 && c.regular && c.jump_class == JumpClass::jump_off) jumps.push_back(c);
  if (jumps.size() != 1) {
    std::ostringstream os;
    os << "section_offsets: need exactly one regular jump-off point, found " << jumps.size();
    throw PreconditionError(os.str());
  }
  return jumps.front();
}

}  // namespace

double default_rho(const ModelSpec& model) {
  // see the decisions ledger: per-model Sigma_out distances for the zoo
  if (model.name == "minimal") return 0.5;
  if (model.name == "ebers_moll") return 0.02;
  return 0.1;
}

SectionOffsets section_offsets(const ModelSpec& model, double eps, std::optional<double> rho_opt,
                               double seed_distance) {
  if (!(eps > 0.0)) throw PreconditionError("section_offsets: eps must be positive");
  const double rho = rho_opt.value_or(default_rho(model));
  if (!(rho > 0.0)) throw PreconditionError("section_offsets: rho must be positive");
  const ContactPoint F = jump_off_point(model);
  const Vec2 zF = F.location;
  const int sigma = dot(model.grad_f(zF), model.G(zF, 0.0)) > 0.0 ? 1 : -1;
  const Vec2 eject = static_cast<double>(sigma) * model.N(zF);
  if (!(std::fabs(eject.x) > 1e-6 * std::max(1.0, norm(eject))))
    throw PreconditionError("section_offsets: the layer flow at F is not transverse to a vertical Sigma_out");
  const double sx = eject.x > 0.0 ? 1.0 : -1.0;

  SectionOffsets out;
  out.F = zF;
  out.rho = rho;
  out.x_out = zF.x + sx * rho;
  const double x_out = out.x_out;

  // slow seed on S^a, lifted to the side the layer flow escapes into
  const Vec2 p = project_to_manifold(model, {zF.x - sx * seed_distance, zF.y});
  if (!(model.lambda(p) < 0.0)) throw PreconditionError("section_offsets: slow seed is not on the attracting branch");
  const Vec2 gf = model.grad_f(p);
  const Vec2 z0 = p + (sigma * eps / dot(gf, gf)) * gf;

  const Window guard = model.window.inflated(2.0);
  auto cross_out = [&](const VectorField& fld, const Vec2& start, double t_max) {
    Event out_ev;
    out_ev.name = "out";
    out_ev.g = [x_out, sx](double, const Vec2& z) { return sx * (z.x - x_out); };
    out_ev.direction = 1;
    Event back;
    back.name = "back";
    back.g = [&, sx](double, const Vec2& z) { return sx * (z.x - zF.x) + seed_distance + 0.1; };
    back.direction = -1;
    Event wrong;
    wrong.name = "wrong_side";
    wrong.g = [&model, sigma](double, const Vec2& z) { return sigma * model.f(z) + 0.5; };
    wrong.direction = -1;
    Event win;
    win.name = "window";
    win.g = [guard](double, const Vec2& z) {
      return std::min({z.x - guard.x_min, guard.x_max - z.x, z.y - guard.y_min, guard.y_max - z.y});
    };
    win.direction = -1;
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    o.store = false;
    const OdeResult r = solve(fld, 0.0, start, t_max, o, {out_ev, back, wrong, win});
    if (r.reason != StopReason::event || r.hits.back().index != 0) {
      std::ostringstream os;
      os << "section_offsets: Sigma_out (x = " << x_out << ") not reached; stopped at " << r.z_final;
      throw ConvergenceError(os.str());
    }
    return r.z_final.y;
  };
  out.y_l = cross_out([&model, sigma](double, const Vec2& z) { return static_cast<double>(sigma) * model.N(z); },
                      zF, 1e3);
  out.y_s = cross_out(full_field(model, eps), z0, 1e4 / eps);
  return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  const std::size_t n = lx.size();
  fit.n = static_cast<int>(n);
  if (n < 2) {
    fit.slope = fit.intercept = fit.half_width = kNaN;
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n < 3) {
    fit.half_width = kNaN;
    return fit;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  const double se = std::sqrt(sse / (n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return fit;
}

std::vector<double> log_ladder(double lo_exp, double hi_exp, int n) {
  if (n < 2 || !(hi_exp > lo_exp)) throw PreconditionError("log_ladder: need n >= 2 and hi > lo");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (n - 1));
  return v;
}

double slow_segment_distance(const LimitCycle& cycle, const SingularCycle& gamma) {
  const Polyline& R = gamma.reduced_arc.points;
  if (R.size() < 4) throw PreconditionError("slow_segment_distance: reduced arc too short");
  if (cycle.speeds.size() != cycle.samples.size() || cycle.samples.empty())
    throw PreconditionError("slow_segment_distance: cycle has no speed samples");
  // cumulative arclength along Gamma^R
  std::vector<double> s(R.size(), 0.0);
  for (std::size_t i = 1; i < R.size(); ++i) s[i] = s[i - 1] + distance(R[i - 1], R[i]);
  const double total = s.back();
  const auto [mn, mx] = std::minmax_element(cycle.speeds.begin(), cycle.speeds.end());
  const double thr = std::sqrt(*mn * *mx);

  double worst = 0.0;
  bool any = false;
  const std::size_t stride = std::max<std::size_t>(1, cycle.samples.size() / 20000);
  for (std::size_t k = 0; k < cycle.samples.size(); k += stride) {
    if (cycle.speeds[k] > thr) continue;
    const Vec2 p = cycle.samples[k];
    double best = std::numeric_limits<double>::infinity(), where = 0.0;
    for (std::size_t i = 0; i + 1 < R.size(); ++i) {
      const Vec2 ab = R[i + 1] - R[i];
      const double L2 = dot(ab, ab);
      const double t = L2 > 0.0 ? std::clamp(dot(p - R[i], ab) / L2, 0.0, 1.0) : 0.0;
      const double d = distance(p, R[i] + t * ab);
      if (d < best) {
        best = d;
        where = s[i] + t * (s[i + 1] - s[i]);
      }
    }
    if (where < 0.25 * total || where > 0.75 * total) continue;
    worst = std::max(worst, best);
    any = true;
  }
  if (!any) throw ConvergenceError("slow_segment_distance: no slow samples near the central part of Gamma^R");
  return worst;
}

ScalingReport epsilon_scaling_report(const ModelSpec& model, std::vector<double> eps_values,
                                     const ScalingOptions& opts) {
  std::sort(eps_values.begin(), eps_values.end());
  if (eps_values.size() < 5) throw PreconditionError("epsilon_scaling_report: need at least 5 eps values");
  if (!(eps_values.front() > 0.0)) throw PreconditionError("epsilon_scaling_report: eps values must be positive");
  if (std::log10(eps_values.back() / eps_values.front()) < 1.5 - 1e-9)
    throw PreconditionError("epsilon_scaling_report: eps values must span at least 1.5 decades");

  const std::size_t n = eps_values.size();
  ScalingReport rep;
  rep.eps_values = eps_values;
  rep.rho = opts.rho.value_or(default_rho(model));
  rep.offsets.assign(n, kNaN);
  rep.floquet.assign(n, kNaN);
  rep.hausdorff.assign(n, kNaN);
  rep.slow_dist.assign(n, kNaN);
  rep.notes.assign(n, "");

  std::optional<SingularCycle> gamma;
  Polyline gamma_poly;
  if (opts.cycles) {
    gamma = build_singular_cycle(model);
    gamma_poly = gamma->polyline();
  }

  parallel_for(n, [&](std::size_t i) {
    const double eps = eps_values[i];
    std::string note;
    try {
      rep.offsets[i] = std::fabs(section_offsets(model, eps, rep.rho).offset());
    } catch (const Error& e) {
      note += std::string("offset: ") + e.what() + "; ";
    }
    if (opts.cycles) {
      try {
        CycleOptions co;
        co.tol = opts.tol;
        co.seed = SeedStrategy::singular_cycle;
        const LimitCycle lc = find_limit_cycle(model, eps, co);
        rep.floquet[i] = lc.floquet_exponent;
        rep.hausdorff[i] = hausdorff_distance(lc.samples, gamma_poly);
        rep.slow_dist[i] = slow_segment_distance(lc, *gamma);
      } catch (const Error& e) {
        note += std::string("cycle: ") + e.what() + "; ";
      }
    }
    rep.notes[i] = note;
  });

  rep.offset_fit = fit_loglog(rep.eps_values, rep.offsets);
  if (opts.cycles) {
    std::vector<double> inv(n), negf(n);
    for (std::size_t i = 0; i < n; ++i) {
      inv[i] = 1.0 / eps_values[i];
      negf[i] = -rep.floquet[i];
    }
    rep.floquet_fit = fit_loglog(inv, negf);
    rep.slow_fit = fit_loglog(rep.eps_values, rep.slow_dist);

    rep.hausdorff_decreasing = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
      rep.hausdorff_decreasing = rep.hausdorff_decreasing && rep.hausdorff[i] < rep.hausdorff[i + 1];

    std::vector<double> k;
    for (std::size_t i = 0; i < n; ++i)
      if (std::isfinite(rep.floquet[i])) k.push_back(-rep.floquet[i] * eps_values[i]);
    if (!k.empty()) {
      std::vector<double> sorted = k;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t m = sorted.size();
      const double med = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
      for (double v : k) rep.floquet_eps_spread = std::max(rep.floquet_eps_spread, std::fabs(v / med - 1.0));
    } else {
      rep.floquet_eps_spread = kNaN;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

const char* to_string(Regime r) {
  switch (r) {
    case Regime::steady_sliding: return "steady_sliding";
    case Regime::pure_slip: return "pure_slip";
    case Regime::stick_slip: return "stick_slip";
    default: return "unresolved";
  }
}

namespace {

ModelSpec transition_with(const Params& base, double delta, double v0) {
  Params p = base;
  p["delta"] = delta;
  p["v0"] = v0;
  return builtin_model("transition", p);
}

// Equilibrium of N f + eps G near p0 = (mu(v0), v0) for the Table 1 shape.
Vec2 slip_equilibrium(const ModelSpec& m, double eps) {
  const double v0 = m.param("v0");
  const auto mu = characteristic(m);
  return {(*mu)(v0) - eps / v0, v0};
}

}  // namespace

Regime classify_regime(const ModelSpec& m, double eps, double* dwell_out, double* trace_out) {
  const Vec2 e = slip_equilibrium(m, eps);
  const Mat2 J = m.jacobian(e, eps);
  if (trace_out) *trace_out = J.trace();
  if (dwell_out) *dwell_out = kNaN;
  if (J.trace() < 0.0 && J.det() > 0.0) {
    // confirm by simulation: a nearby start must approach the equilibrium
    const double r0 = 0.05 * m.param("v0");
    const Vec2 start = e + Vec2{r0, 0.0};
    const double horizon = 50.0 / std::min(-J.trace(), 1.0);
    OdeOptions o;
    o.rtol = o.atol = 1e-10;
    o.store = false;
    const OdeResult r = solve(full_field(m, eps), 0.0, start, horizon, o);
    return distance(r.z_final, e) < r0 ? Regime::steady_sliding : Regime::unresolved;
  }
  CycleOptions co;
  co.seed = SeedStrategy::equilibrium;
  const LimitCycle lc = find_limit_cycle(m, eps, co);
  // fraction of the (desingularised) period spent in the band y < 5 eps
  double band = 0.0, total = 0.0;
  const auto& z = lc.samples;
  const auto& t = lc.sample_times;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    total += dt;
    if (0.5 * (z[i].y + z[i + 1].y) < 5.0 * eps) band += dt;
  }
  const double frac = total > 0.0 ? band / total : 0.0;
  if (dwell_out) *dwell_out = frac;
  return frac >= 0.1 ? Regime::stick_slip : Regime::pure_slip;
}

RegimeMap stickslip_regime_sweep(const Params& base, const std::vector<double>& v0_values, const RegimeOptions& opts) {
  for (const char* k : {"mu_s", "a1", "a3"})
    if (!base.count(k)) throw PreconditionError(std::string("stickslip_regime_sweep: base params need '") + k + "'");
  if (v0_values.empty()) throw PreconditionError("stickslip_regime_sweep: empty v0 grid");
  RegimeMap map;
  map.v0_values = v0_values;
  std::sort(map.v0_values.begin(), map.v0_values.end());
  const std::size_t n = map.v0_values.size();
  map.labels.assign(n, Regime::unresolved);
  map.dwell.assign(n, kNaN);
  map.trace.assign(n, kNaN);
  std::vector<std::string> notes(n);
  const double a1 = base.at("a1"), a3 = base.at("a3");
  map.v_m_analytic = std::sqrt(a1 / (3.0 * a3));

  parallel_for(n, [&](std::size_t i) {
    try {
      const ModelSpec m = transition_with(base, opts.delta, map.v0_values[i]);
      map.labels[i] = classify_regime(m, opts.eps, &map.dwell[i], &map.trace[i]);
    } catch (const Error& e) {
      notes[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!notes[i].empty()) {
      std::ostringstream os;
      os << "v0=" << map.v0_values[i] << ": " << notes[i];
      map.notes.push_back(os.str());
    }

  // v_m: sign change of the equilibrium trace (Hopf point), bisected
  auto trace_at = [&](double v0) {
    const ModelSpec m = transition_with(base, opts.delta, v0);
    return m.jacobian(slip_equilibrium(m, opts.eps), opts.eps).trace();
  };
  map.v_m_detected = kNaN;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (map.trace[i] > 0.0 && map.trace[i + 1] < 0.0) {
      map.v_m_detected = opts.refine ? brent_root(trace_at, map.v0_values[i], map.v0_values[i + 1],
                                                  map.trace[i], map.trace[i + 1], 1e-10)
                                     : 0.5 * (map.v0_values[i] + map.v0_values[i + 1]);
      break;
    }
  }

  // v_ss: last stick_slip before the first pure_slip
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (map.labels[i] == Regime::stick_slip && map.labels[i + 1] == Regime::pure_slip) {
      double lo = map.v0_values[i], hi = map.v0_values[i + 1];
      while (opts.refine && hi - lo > opts.v_ss_width) {
        const double mid = 0.5 * (lo + hi);
        Regime r = Regime::unresolved;
        try {
          r = classify_regime(transition_with(base, opts.delta, mid), opts.eps);
        } catch (const Error&) {
        }
        if (r == Regime::stick_slip)
          lo = mid;
        else if (r == Regime::pure_slip)
          hi = mid;
        else
          break;
      }
      map.v_ss = std::make_pair(lo, hi);
      break;
    }
    if (map.labels[i] == Regime::stick_slip && map.labels[i + 1] == Regime::steady_sliding)
      map.notes.push_back("grid skips pure_slip between stick_slip and steady_sliding; refine the v0 grid");
  }
  // monotonicity: stick_slip < pure_slip < steady_sliding
  auto rank = [](Regime r) { return r == Regime::stick_slip ? 0 : r == Regime::pure_slip ? 1 : 2; };
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (map.labels[i] != Regime::unresolved && map.labels[i + 1] != Regime::unresolved &&
        rank(map.labels[i]) > rank(map.labels[i + 1]))
      map.notes.push_back("labels are not monotone in v0");
  return map;
}

RegimeMap stroke_phase_diagram(const std::vector<double>& eps_values, const std::vector<double>& delta_values,
                               const Params& base) {
  for (const char* k : {"v0", "mu_s", "a1", "a3"})
    if (!base.count(k)) throw PreconditionError(std::string("stroke_phase_diagram: base params need '") + k + "'");
  if (eps_values.empty() || delta_values.empty()) throw PreconditionError("stroke_phase_diagram: empty grid");
  RegimeMap map;
  map.eps_values = eps_values;
  map.delta_values = delta_values;
  const std::size_t ne = eps_values.size(), nd = delta_values.size();
  map.strokes.assign(ne * nd, -2);
  std::vector<std::string> notes(ne * nd);
  parallel_for(ne * nd, [&](std::size_t k) {
    const double eps = eps_values[k / nd], delta = delta_values[k % nd];
    try {
      const ModelSpec m = transition_with(base, delta, base.at("v0"));
      map.strokes[k] = find_limit_cycle(m, eps).strokes;
    } catch (const Error& e) {
      notes[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < ne * nd; ++k)
    if (!notes[k].empty()) {
      std::ostringstream os;
      os << "eps=" << eps_values[k / nd] << " delta=" << delta_values[k % nd] << ": " << notes[k];
      map.notes.push_back(os.str());
    }
  return map;
}

}  // namespace gspt
