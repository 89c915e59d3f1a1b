#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "gspt/blowup.hpp"
#include "gspt/cycle.hpp"
#include "gspt/errors.hpp"
#include "gspt/scaling.hpp"
#include "gspt/simulate.hpp"
#include "gspt/singular.hpp"
#include "output.hpp"

namespace gspt::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig cfg;
  fs::path out;
  bool quiet = false;

  void say(const std::string& s) const {
    if (!quiet) std::cout << s << '\n';
  }
};

const ModelConfig& need_model(const RunConfig& c) {
  if (!c.model) throw ConfigError("/model", "this command needs a model block");
  return *c.model;
}

ModelSpec build_model(const RunConfig& c) {
  const ModelConfig& mc = need_model(c);
  for (const auto& [k, v] : mc.params) {
    const auto def = default_params(mc.name);
    if (!def.count(k)) throw ConfigError("/model/params/" + k, "not a parameter of '" + mc.name + "'");
  }
  return builtin_model_with_defaults(mc.name, mc.params);
}

Window window_of(const RunConfig& c, const ModelSpec& m) { return c.window.value_or(m.window); }

double first_eps(const RunConfig& c, double fallback) { return c.eps.empty() ? fallback : c.eps.front(); }

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<Vec2> samples_of(const Branch& b) {
  std::vector<Vec2> pts;
  for (const auto& s : b.samples) pts.push_back(s.z);
  return pts;
}

// critical curve in green (the friction characteristic for the stick-slip models)
void draw_curve(SvgPlot& plot, const CriticalCurve& curve) {
  bool first = true;
  for (const auto& b : curve.branches) {
    Series s{samples_of(b), "green", 2.0, false, first ? "critical curve" : ""};
    if (b.stability == Stability::repelling) s.color = "#66bb66";
    plot.add(std::move(s));
    first = false;
  }
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Context& ctx) {
  const ModelSpec m = build_model(ctx.cfg);
  const Window win = window_of(ctx.cfg, m);
  const CriticalCurve curve = trace_critical_curve(m, win, ctx.cfg.resolution);
  const auto contacts = find_contact_points(m, curve);
  std::string diag;
  const auto sing = find_N_singularities(m, win, &diag);

  CsvWriter cc({"branch", "x", "y", "lambda", "stability"});
  for (std::size_t i = 0; i < curve.branches.size(); ++i)
    for (const auto& s : curve.branches[i].samples)
      cc.row().add(static_cast<int>(i)).add(s.z.x).add(s.z.y).add(s.lambda).add(to_string(curve.branches[i].stability));
  cc.save(ctx.out / "critical_curve.csv");

  CsvWriter cp({"x", "y", "order", "regular", "jump"});
  for (const auto& p : contacts) {
    const std::string jump = p.jump_class == JumpClass::jump_off ? "off" : p.jump_class == JumpClass::jump_on ? "on" : "none";
    cp.row().add(p.location.x).add(p.location.y).add(p.order).add(p.regular).add(jump);
  }
  cp.save(ctx.out / "contact_points.csv");

  CsvWriter ns({"x", "y", "trace", "det", "kind"});
  for (const auto& s : sing) ns.row().add(s.location.x).add(s.location.y).add(s.trace).add(s.det).add(to_string(s.kind));
  ns.save(ctx.out / "n_singularities.csv");

  SvgPlot plot(m.name + ": critical curve and contact points", "x", "y");
  plot.set_range(win);
  draw_curve(plot, curve);
  // a few layer fibres for orientation
  for (int i = 1; i < 8; ++i)
    for (double yf : {0.25, 0.75}) {
      const Vec2 z0{win.x_min + win.width() * i / 8.0, win.y_min + win.height() * yf};
      try {
        LayerOptions lo;
        lo.window = win;
        lo.max_time = 50.0;
        const LayerResult r = layer_flow(m, z0, lo);
        plot.add(Series{r.traj.states, "#bbbbbb", 0.8, false, ""});
      } catch (const Error&) {
      }
    }
  std::vector<Vec2> cpts, spts;
  for (const auto& p : contacts) cpts.push_back(p.location);
  for (const auto& s : sing) spts.push_back(s.location);
  plot.add(Series{cpts, "black", 2.0, true, "contact points"});
  plot.add(Series{spts, "red", 2.5, true, "N-singularities"});
  if (!ctx.cfg.eps.empty()) {
    std::vector<Vec2> eq;
    for (const auto& e : find_equilibria(m, ctx.cfg.eps.front(), win)) eq.push_back(e.z);
    plot.add(Series{eq, "red", 1.5, true, "equilibria"});
  }
  plot.save(ctx.out / "phase_portrait.svg");

  ctx.say("analyze " + m.name + ": " + std::to_string(curve.branches.size()) + " branches, " +
          std::to_string(contacts.size()) + " contact points, " + std::to_string(sing.size()) + " N-singularities");
  if (sing.empty() && !diag.empty()) ctx.say("  " + diag);
  for (const auto& v : curve.violations) ctx.say("  warning: " + v);
  return 0;
}

int cmd_cycle(const Context& ctx) {
  const ModelSpec m = build_model(ctx.cfg);
  const Window win = window_of(ctx.cfg, m);
  const SingularCycle cyc = build_singular_cycle(m, win, ctx.cfg.resolution);

  CsvWriter pts({"segment", "x", "y"});
  for (const auto& z : cyc.layer_arc.resample(std::max<std::size_t>(2, 2000))) pts.row().add("layer").add(z.x).add(z.y);
  for (const auto& z : cyc.reduced_arc.points) pts.row().add("reduced").add(z.x).add(z.y);
  pts.save(ctx.out / "singular_cycle.csv");

  CsvWriter sum({"quantity", "value"});
  sum.row().add("F_x").add(cyc.F.location.x);
  sum.row().add("F_y").add(cyc.F.location.y);
  sum.row().add("L_F_x").add(cyc.L_F.x);
  sum.row().add("L_F_y").add(cyc.L_F.y);
  sum.row().add("reduced_desing_time").add(cyc.reduced_arc.desing_time);
  sum.row().add("reduced_time").add(cyc.reduced_arc.reduced_time);
  sum.row().add("reduced_time_finite").add(cyc.reduced_arc.reduced_time_finite);
  sum.row().add("layer_time").add(cyc.layer_arc.duration());
  sum.row().add("arclength").add(arclength(cyc.polyline(), true));
  sum.row().add("repelling_construction").add(cyc.repelling);
  sum.row().add("assumption_a1").add(cyc.assumptions_report.a1);
  sum.row().add("assumption_a2").add(cyc.assumptions_report.a2);
  sum.row().add("n_singularities").add(static_cast<int>(cyc.singularities.size()));
  sum.save(ctx.out / "cycle_summary.csv");

  SvgPlot plot(m.name + ": singular relaxation cycle", "x", "y");
  plot.set_range(win);
  draw_curve(plot, trace_critical_curve(m, win, ctx.cfg.resolution));
  plot.add(Series{cyc.layer_arc.states, "blue", 2.0, false, "layer arc"});
  plot.add(Series{cyc.reduced_arc.points, "navy", 2.5, false, "reduced arc"});
  plot.add(Series{{cyc.F.location, cyc.L_F}, "black", 2.0, true, "F, L_F"});
  std::vector<Vec2> spts;
  for (const auto& s : cyc.singularities) spts.push_back(s.location);
  plot.add(Series{spts, "red", 2.5, true, "N-singularities"});
  plot.save(ctx.out / "singular_cycle.svg");

  ctx.say("cycle " + m.name + ": F = (" + str(cyc.F.location.x) + ", " + str(cyc.F.location.y) + "), L_F = (" +
          str(cyc.L_F.x) + ", " + str(cyc.L_F.y) + ")");
  return 0;
}

SeedStrategy seed_of(const std::string& s) {
  if (s == "singular_cycle") return SeedStrategy::singular_cycle;
  if (s == "equilibrium") return SeedStrategy::equilibrium;
  return SeedStrategy::automatic;
}

void cycle_rows(CsvWriter& w, const LimitCycle& lc) {
  w.row().add(lc.eps).add(lc.period_desing).add(lc.period_physical).add(lc.floquet_exponent).add(lc.log_multiplier)
      .add(lc.return_derivative).add(lc.log_return_derivative).add(lc.strokes).add(lc.attracting)
      .add(lc.amplitude.x_min).add(lc.amplitude.x_max).add(lc.amplitude.y_min).add(lc.amplitude.y_max).add(lc.seed)
      .add(lc.iterations);
}

const std::vector<std::string> kCycleHeader = {"eps", "period_desing", "period_physical", "floquet_exponent",
                                               "log_multiplier", "return_derivative", "log_return_derivative",
                                               "strokes", "attracting", "x_min", "x_max", "y_min", "y_max",
                                               "seed", "iterations"};

int cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const ModelSpec m = build_model(c);
  const Window win = window_of(c, m);
  const double eps = first_eps(c, 1e-2);

  CycleOptions co;
  co.seed = seed_of(c.seed);
  co.tol = c.tolerance;
  co.window = win;
  if (c.section) co.section = PoincareSection{c.section->base, c.section->direction, c.section->half_width, c.section->orientation};
  const LimitCycle lc = find_limit_cycle(m, eps, co);

  const Vec2 z0 = c.z0.value_or(lc.fixed_point);
  const Trajectory tr = integrate(m, z0, eps, 0.0, c.t_end, c.tolerance);
  CsvWriter tw({"t", "x", "y"});
  for (std::size_t i = 0; i < tr.size(); ++i) tw.row().add(tr.times[i]).add(tr.states[i].x).add(tr.states[i].y);
  tw.save(ctx.out / "trajectory.csv");

  CsvWriter cw({"t", "x", "y", "speed"});
  for (std::size_t i = 0; i < lc.samples.size(); ++i)
    cw.row().add(lc.sample_times[i]).add(lc.samples[i].x).add(lc.samples[i].y).add(lc.speeds[i]);
  cw.save(ctx.out / "limit_cycle.csv");

  CsvWriter sw(kCycleHeader);
  cycle_rows(sw, lc);
  sw.save(ctx.out / "cycle_summary.csv");

  SvgPlot phase(m.name + ": eps = " + str(eps), "x", "y");
  phase.set_range(win);
  draw_curve(phase, trace_critical_curve(m, win, c.resolution));
  phase.add(Series{tr.states, "#999999", 0.8, false, "trajectory"});
  phase.add(Series{lc.samples, "blue", 2.0, false, "limit cycle"});
  phase.save(ctx.out / "phase.svg");

  SvgPlot trace(m.name + ": time trace", "t (desingularised)", "state");
  std::vector<Vec2> xs, ys;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    xs.push_back({tr.times[i], tr.states[i].x});
    ys.push_back({tr.times[i], tr.states[i].y});
  }
  trace.add(Series{xs, "blue", 1.2, false, "x"});
  trace.add(Series{ys, "orange", 1.2, false, "y"});
  trace.save(ctx.out / "time_trace.svg");

  ctx.say("simulate " + m.name + " eps=" + str(eps) + ": period " + str(lc.period_desing) + " (physical " +
          str(lc.period_physical) + "), floquet " + str(lc.floquet_exponent) + ", strokes " + std::to_string(lc.strokes));
  return 0;
}

int cmd_scale(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const ModelSpec m = build_model(c);
  std::vector<double> eps = c.eps.size() > 1 ? c.eps : log_ladder(-4.5, -2.0, 6);
  ScalingOptions so;
  so.rho = c.rho;
  so.cycles = c.cycles;
  so.tol = c.tolerance;
  const ScalingReport r = epsilon_scaling_report(m, eps, so);

  CsvWriter w({"eps", "offset", "floquet", "hausdorff", "slow_distance", "note"});
  for (std::size_t i = 0; i < r.eps_values.size(); ++i)
    w.row().add(r.eps_values[i]).add(r.offsets[i]).add(r.floquet[i]).add(r.hausdorff[i]).add(r.slow_dist[i]).add(r.notes[i]);
  w.save(ctx.out / "scaling.csv");

  CsvWriter f({"quantity", "slope", "intercept", "half_width", "n", "expected"});
  auto fit = [&](const char* name, const LogLogFit& lf, double expected) {
    f.row().add(name).add(lf.slope).add(lf.intercept).add(lf.half_width).add(lf.n).add(expected);
  };
  fit("offset", r.offset_fit, 2.0 / 3.0);
  if (c.cycles) {
    fit("floquet", r.floquet_fit, 1.0);
    fit("slow_distance", r.slow_fit, 1.0);
  }
  f.save(ctx.out / "fits.csv");

  SvgPlot plot(m.name + ": scaling in eps", "eps", "size");
  plot.set_log(true, true);
  std::vector<Vec2> off, hd, sd;
  for (std::size_t i = 0; i < r.eps_values.size(); ++i) {
    off.push_back({r.eps_values[i], r.offsets[i]});
    hd.push_back({r.eps_values[i], r.hausdorff[i]});
    sd.push_back({r.eps_values[i], r.slow_dist[i]});
  }
  plot.add(Series{off, "blue", 1.5, false, "|y_s - y_l|"});
  plot.add(Series{off, "blue", 1.5, true, ""});
  if (c.cycles) {
    plot.add(Series{hd, "black", 1.5, false, "Hausdorff to singular cycle"});
    plot.add(Series{sd, "orange", 1.5, false, "slow-segment distance"});
  }
  plot.save(ctx.out / "scaling.svg");

  ctx.say("scale " + m.name + ": offset slope " + str(r.offset_fit.slope) + " +- " + str(r.offset_fit.half_width) +
          " (rho " + str(r.rho) + ")");
  for (const auto& n : r.notes)
    if (!n.empty()) ctx.say("  note: " + n);
  return 0;
}

Params merged(Params base, const Params& over, const std::string& where) {
  for (const auto& [k, v] : over) {
    if (!base.count(k) && k != "v0" && k != "delta") throw ConfigError(where + "/" + k, "not a transition parameter");
    base[k] = v;
  }
  return base;
}

int cmd_regimes(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Params base = merged({{"mu_s", 1.0}, {"a1", 0.75}, {"a3", 0.25}}, c.regime_params, "/regimes/params");
  std::vector<double> v0 = c.v0_values;
  if (v0.empty())
    for (int i = 0; i <= 16; ++i) v0.push_back(0.8 + 0.025 * i);
  RegimeOptions ro;
  ro.eps = first_eps(c, 1e-3);
  ro.delta = c.regime_delta;
  ro.refine = c.refine;
  const RegimeMap r = stickslip_regime_sweep(base, v0, ro);

  CsvWriter w({"v0", "regime", "dwell_fraction", "equilibrium_trace"});
  for (std::size_t i = 0; i < r.v0_values.size(); ++i)
    w.row().add(r.v0_values[i]).add(to_string(r.labels[i])).add(r.dwell[i]).add(r.trace[i]);
  w.save(ctx.out / "regimes.csv");

  CsvWriter s({"quantity", "value"});
  s.row().add("eps").add(ro.eps);
  s.row().add("delta").add(ro.delta);
  s.row().add("v_m_analytic").add(r.v_m_analytic);
  s.row().add("v_m_detected").add(r.v_m_detected);
  s.row().add("v_ss_lower").add(r.v_ss ? r.v_ss->first : std::nan(""));
  s.row().add("v_ss_upper").add(r.v_ss ? r.v_ss->second : std::nan(""));
  s.row().add("v_ss_small_difference_estimate").add(std::sqrt(4.0 / 5.0));
  s.save(ctx.out / "regime_summary.csv");

  SvgPlot plot("regimes along v0 (eps = " + str(ro.eps) + ")", "v0", "dwell fraction");
  std::vector<Vec2> pts[3];
  for (std::size_t i = 0; i < r.v0_values.size(); ++i) {
    const int k = r.labels[i] == Regime::stick_slip ? 0 : r.labels[i] == Regime::pure_slip ? 1 : 2;
    if (r.labels[i] != Regime::unresolved) pts[k].push_back({r.v0_values[i], r.dwell[i]});
  }
  plot.add(Series{pts[0], "red", 2.5, true, "stick_slip"});
  plot.add(Series{pts[1], "orange", 2.5, true, "pure_slip"});
  plot.add(Series{pts[2], "blue", 2.5, true, "steady_sliding"});
  plot.add(Series{{{r.v_m_detected, 0.0}, {r.v_m_detected, 1.0}}, "black", 1.0, false, "v_m detected"});
  plot.save(ctx.out / "regimes.svg");

  std::string msg = "regimes: v_m detected " + str(r.v_m_detected) + " (analytic " + str(r.v_m_analytic) + ")";
  if (r.v_ss) msg += ", v_ss in [" + str(r.v_ss->first) + ", " + str(r.v_ss->second) + "] (estimate 0.894)";
  ctx.say(msg);
  for (const auto& n : r.notes) ctx.say("  note: " + n);
  return 0;
}

int cmd_strokes(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Params base = merged(default_params("transition"), c.stroke_params, "/strokes/params");
  const std::vector<double> eps = c.stroke_eps.empty() ? std::vector<double>{1e-2, 5.0} : c.stroke_eps;
  const std::vector<double> delta = c.stroke_delta.empty() ? std::vector<double>{1e-2, 5.0} : c.stroke_delta;
  const RegimeMap r = stroke_phase_diagram(eps, delta, base);

  CsvWriter w({"eps", "delta", "strokes"});
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = 0; j < delta.size(); ++j) w.row().add(eps[i]).add(delta[j]).add(r.strokes[i * delta.size() + j]);
  w.save(ctx.out / "phase_diagram.csv");

  // cell edges at geometric midpoints
  auto edges = [](const std::vector<double>& v, std::size_t i) {
    const double lo = i == 0 ? v[0] / (v.size() > 1 ? std::sqrt(v[1] / v[0]) : 2.0) : std::sqrt(v[i - 1] * v[i]);
    const double hi = i + 1 == v.size() ? v[i] * (v.size() > 1 ? std::sqrt(v[i] / v[i - 1]) : 2.0) : std::sqrt(v[i] * v[i + 1]);
    return std::pair{lo, hi};
  };
  SvgPlot plot("transition model: strokes per period", "eps", "delta");
  plot.set_log(true, true);
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = 0; j < delta.size(); ++j) {
      const int s = r.strokes[i * delta.size() + j];
      const auto [x0, x1] = edges(eps, i);
      const auto [y0, y1] = edges(delta, j);
      const std::string color = s == 2 ? "#9ecae1" : s == 4 ? "#fdae6b" : s < 0 ? "#dddddd" : "#c7e9c0";
      plot.add_cell(Cell{x0, x1, y0, y1, color, std::to_string(s)});
    }
  plot.save(ctx.out / "phase_diagram.svg");

  ctx.say("strokes: " + std::to_string(eps.size() * delta.size()) + " cells");
  for (const auto& n : r.notes) ctx.say("  note: " + n);
  return 0;
}

int cmd_riccati(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  RiccatiProblem p;
  if (c.riccati_from_model) {
    const ModelSpec m = build_model(c);
    const Window win = window_of(c, m);
    const auto contacts = find_contact_points(m, trace_critical_curve(m, win, c.resolution));
    const ContactPoint* F = nullptr;
    for (const auto& cp : contacts)
      if (cp.order == 1 && cp.regular && cp.jump_class == JumpClass::jump_off) F = &cp;
    if (!F) throw PreconditionError("riccati: the model has no regular jump-off point in the window");
    p = RiccatiProblem::from(expansion_coeffs(m, F->location));
  } else {
    if (c.a0) p.a0 = *c.a0;
    if (c.b1) p.b1 = *c.b1;
    if (c.d0) p.d0 = *c.d0;
    p = RiccatiProblem::from(ExpansionCoeffs{p.a0, p.b1, p.d0, 0.0});
  }
  if (c.x_min) p.x_min = *c.x_min;
  if (c.x_max) p.x_max = *c.x_max;

  std::vector<double> grid;
  for (int i = 0; i < c.riccati_count; ++i) grid.push_back(p.x_min + (p.x_max - p.x_min) * i / (c.riccati_count - 1));
  const RiccatiSolution sol = riccati_special_solution(p, grid);
  CsvWriter w({"x2", "zeta"});
  for (std::size_t i = 0; i < sol.x.size(); ++i) w.row().add(sol.x[i]).add(sol.zeta[i]);
  w.save(ctx.out / "riccati.csv");

  const TailFit left = left_tail_fit(p), right = right_tail_fit(p);
  CsvWriter s({"quantity", "value"});
  s.row().add("a0").add(p.a0);
  s.row().add("b1").add(p.b1);
  s.row().add("d0").add(p.d0);
  s.row().add("x_min").add(p.x_min);
  s.row().add("x_max").add(p.x_max);
  s.row().add("omega0_bessel").add(omega0_constant());
  s.row().add("omega0_airy").add(airy_first_zero_series());
  s.row().add("left_tail_exponent").add(left.exponent);
  s.row().add("right_tail_constant").add(right.constant);
  s.row().add("right_tail_predicted").add(right.predicted);
  s.row().add("mapping_error").add(normalised_mapping_error(p, grid));
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    if (std::cbrt(1.0 / d) > p.x_max) continue;
    const ExitCheck e = sigma2_exit_check(p, d);
    s.row().add("exit_difference_delta_" + str(d)).add(e.difference());
  }
  s.save(ctx.out / "riccati_summary.csv");

  SvgPlot plot("chart K2 special solution", "x2", "zeta");
  std::vector<Vec2> pts, left_asym;
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    pts.push_back({sol.x[i], sol.zeta[i]});
    if (sol.x[i] < -0.5 * p.length_scale()) left_asym.push_back({sol.x[i], -(p.d0 / p.b1) / sol.x[i]});
  }
  plot.add(Series{pts, "blue", 2.0, false, "zeta"});
  plot.add(Series{left_asym, "red", 1.0, false, "-(d0/b1)/x2"});
  plot.save(ctx.out / "riccati.svg");

  ctx.say("riccati: Omega0 " + str(omega0_constant()) + ", left exponent " + str(left.exponent) +
          ", right constant " + str(right.constant) + " vs " + str(right.predicted));
  return 0;
}

int cmd_list_models(const Context& ctx) {
  CsvWriter w({"name", "required", "description"});
  std::ostringstream table;
  for (const auto& info : model_catalog()) {
    std::string req;
    for (const auto& r : info.required) req += (req.empty() ? "" : " ") + r;
    w.row().add(info.name).add(req).add(info.description);
    table << info.name << "\t" << req << "\n";
  }
  if (!ctx.out.empty()) w.save(ctx.out / "models.csv");
  if (!ctx.quiet) std::cout << table.str();
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"gspt: singular perturbation toolbox for planar slow-fast systems"};
  app.require_subcommand(1);
  std::string config, out, eps_text;
  bool quiet = false;
  const std::vector<std::string> commands = {"analyze", "cycle",   "simulate", "scale",
                                             "regimes", "strokes", "riccati",  "list-models"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--eps", eps_text, "single eps value (overrides the config)");
    sub->add_flag("--quiet", quiet, "no console summary");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Context ctx;
  ctx.quiet = quiet;
  try {
    if (command != "list-models" || !config.empty()) {
      if (config.empty()) throw ConfigError("--config", "missing (required for " + command + ")");
      ctx.cfg = load_config(config);
    }
    if (!eps_text.empty()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(eps_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != eps_text.size() || !(v > 0.0) || !std::isfinite(v)) throw ConfigError("--eps", "expected a positive number");
      ctx.cfg.eps = {v};
    }
    if (!out.empty()) ctx.cfg.output = out;
    if (command != "list-models" || !out.empty()) {
      ctx.out = ctx.cfg.output;
      fs::create_directories(ctx.out);
    }

    if (command == "analyze") return cmd_analyze(ctx);
    if (command == "cycle") return cmd_cycle(ctx);
    if (command == "simulate") return cmd_simulate(ctx);
    if (command == "scale") return cmd_scale(ctx);
    if (command == "regimes") return cmd_regimes(ctx);
    if (command == "strokes") return cmd_strokes(ctx);
    if (command == "riccati") return cmd_riccati(ctx);
    return cmd_list_models(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "gspt: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gspt " << command << ": " << e.what() << '\n';
    return 3;
  }
}

}  // namespace gspt::cli
