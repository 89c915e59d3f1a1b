#include "gspt/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gspt {

const char* to_string(LayerStatus s) {
  switch (s) {
    case LayerStatus::reached_manifold: return "reached_manifold";
    case LayerStatus::left_window: return "left_window";
    case LayerStatus::timeout: return "timeout";
    default: return "stalled";
  }
}

namespace {

double v0_distance_estimate(const ModelSpec& m, const Vec2& z) {
  const double dn = std::max(m.n_field.jac(z).max_abs(), 1e-12);
  return norm(m.N(z)) / dn;
}

}  // namespace

LayerResult layer_flow(const ModelSpec& model, const Vec2& z0, const LayerOptions& o) {
  if (!is_finite(z0)) throw PreconditionError("layer_flow: non-finite start");
  if (norm(model.N(z0)) < 1e-8) throw PreconditionError("layer_flow: start point lies on an N-singularity");

  LayerResult res;
  const double f0 = model.f(z0);
  if (!o.desingularised && f0 == 0.0) {
    // the layer field vanishes identically on S
    res.traj.times = {0.0};
    res.traj.states = {z0};
    res.status = LayerStatus::reached_manifold;
    res.end = z0;
    return res;
  }
  int sigma = o.side;
  if (sigma == 0) sigma = f0 > 0.0 ? 1 : (f0 < 0.0 ? -1 : 0);
  if (o.desingularised && sigma == 0)
    throw PreconditionError("layer_flow: start is on S; the escape side must be given");

  VectorField field;
  if (o.desingularised)
    field = [&model, sigma](double, const Vec2& z) { return static_cast<double>(sigma) * model.N(z); };
  else
    field = [&model](double, const Vec2& z) { return model.f(z) * model.N(z); };

  std::vector<Event> events;
  const Vec2 c = o.exclude_center;
  const double r = o.exclude_radius;
  auto outside_ball = [c, r](double, const Vec2& z) { return r <= 0.0 || distance(z, c) > r; };
  if (o.stop_on_manifold) {
    Event e;
    e.name = "manifold";
    e.armed = outside_ball;
    if (o.desingularised) {
      e.g = [&model](double, const Vec2& z) { return model.f(z); };
    } else {
      // N f only approaches S asymptotically
      e.g = [&model](double, const Vec2& z) { return std::fabs(model.f(z)) - 1e-10; };
      e.direction = -1;
    }
    events.push_back(e);
  }
  if (o.window) {
    const Window w = *o.window;
    Event e;
    e.name = "window";
    e.g = [w](double, const Vec2& z) {
      return std::min({z.x - w.x_min, w.x_max - z.x, z.y - w.y_min, w.y_max - z.y});
    };
    e.direction = -1;
    events.push_back(e);
  }

  OdeOptions opts;
  opts.rtol = o.tol;
  opts.atol = o.tol;
  bool stalled = false;
  opts.observer = [&](double, const Vec2& z) {
    stalled = v0_distance_estimate(model, z) < o.stall_radius;
    return !stalled;
  };
  OdeResult out = solve(field, 0.0, z0, o.max_time, opts, events);
  res.traj = std::move(out.traj);
  res.end = out.z_final;
  if (stalled) {
    res.status = LayerStatus::stalled;
  } else if (out.reason == StopReason::event) {
    res.status = events[out.hits.back().index].name == "window" ? LayerStatus::left_window
                                                               : LayerStatus::reached_manifold;
  } else {
    res.status = LayerStatus::timeout;
  }
  return res;
}

// ---------------------------------------------------------------------------

ReciprocalResult reciprocal_search(const ModelSpec& model, const ContactPoint& F, double tol) {
  if (F.order != 1 || !F.regular || F.jump_class == JumpClass::none)
    throw PreconditionError("reciprocal_point: F must be a regular order-1 jump point");
  ReciprocalResult res;
  res.reversed_time = F.jump_class == JumpClass::jump_on;
  const ModelSpec M = res.reversed_time ? reverse_time(model) : model;
  const Vec2 z = F.location;
  const double dg = dot(M.grad_f(z), M.G(z, 0.0));

  LayerOptions o;
  o.side = dg > 0.0 ? 1 : -1;
  o.exclude_center = z;
  o.exclude_radius = 1e-3;
  o.window = M.window.inflated(50.0);
  o.max_time = 1e3;
  o.tol = tol;
  LayerResult lr = layer_flow(M, z, o);
  if (lr.status != LayerStatus::reached_manifold) {
    std::ostringstream os;
    os << "no reciprocal point found (the layer orbit from F " << to_string(lr.status)
       << " at " << lr.end << "); the reciprocal-point assumption fails numerically";
    throw ConvergenceError(os.str());
  }
  res.point = lr.end;
  res.lambda = M.lambda(lr.end);
  res.attracting = res.lambda < -1e-6;
  res.arc = std::move(lr.traj);
  return res;
}

Vec2 reciprocal_point(const ModelSpec& model, const ContactPoint& F) {
  return reciprocal_search(model, F).point;
}

// ---------------------------------------------------------------------------

ReducedSegment reduced_segment(const ModelSpec& model, const Vec2& from, const ContactPoint& to) {
  ReducedSegment seg;
  const Vec2 target = to.location;
  if (distance(from, target) < 1e-12) return seg;
  if (!(std::fabs(model.f(from)) < kOnManifoldTol))
    throw PreconditionError("reduced_segment: start point is not on the critical manifold");

  auto D = [&model](const Vec2& z) {
    const Vec2 gf = model.grad_f(z);
    return cross(model.N(z), model.G(z, 0.0)) * Vec2{gf.y, -gf.x};
  };
  const double lam0 = model.lambda(from);
  if (std::fabs(lam0) <= kOnManifoldTol)
    throw PreconditionError("reduced_segment: start point is a contact point");
  const double sr = lam0 < 0.0 ? 1.0 : -1.0;  // reduced = D / (-lambda)
  if (dot(sr * D(from), target - from) <= 0.0)
    throw PreconditionError("reduced_segment: orientation error, the reduced flow is directed away from the target");
  const Vec2 dir = sr * D(target);
  if (norm(dir) == 0.0) throw DegeneracyError("reduced_segment: desingularised field vanishes at the target");

  Event arrive;
  arrive.name = "arrive";
  arrive.g = [target, dir](double, const Vec2& z) { return dot(z - target, dir); };
  arrive.direction = 1;
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-12;
  const VectorField field = [&](double, const Vec2& z) { return sr * D(z); };
  OdeResult r = solve(field, 0.0, from, 1e7, o, {arrive});
  if (r.reason != StopReason::event)
    throw ConvergenceError("reduced_segment: the target was not reached");
  seg.desing_time = r.t_final;
  const std::size_t n = std::max<std::size_t>(r.traj.size(), 500);
  seg.points = r.traj.resample(n);
  seg.points.back() = target;

  static constexpr double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
  static constexpr double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
  double tau = 0.0;
  for (std::size_t i = 0; i + 1 < r.traj.size(); ++i) {
    const double a = r.traj.times[i], b = r.traj.times[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += wg[k] * std::fabs(model.lambda(r.traj.at(mid + half * xg[k])));
    tau += half * acc;
  }
  seg.reduced_time = tau;
  seg.reduced_time_finite = std::isfinite(tau);
  return seg;
}

// ---------------------------------------------------------------------------

std::string AssumptionsReport::summary() const {
  std::ostringstream os;
  os << "basic=" << (basic ? "ok" : "FAIL") << " A1=" << (a1 ? "ok" : "FAIL")
     << " A2=" << (a2 ? "ok" : "FAIL") << (jump_on ? " (jump-on variant)" : "");
  for (const auto& n : notes) os << "; " << n;
  return os.str();
}

Polyline SingularCycle::polyline(std::size_t layer_samples) const {
  Polyline p = layer_arc.size() >= 2 ? layer_arc.resample(std::max<std::size_t>(layer_samples, 2))
                                     : Polyline(layer_arc.states);
  for (std::size_t i = 1; i + 1 < reduced_arc.points.size(); ++i) p.push_back(reduced_arc.points[i]);
  return p;
}

SingularCycle build_singular_cycle(const ModelSpec& model, std::optional<Window> window, int resolution) {
  const Window W = window.value_or(model.window);
  SingularCycle cyc;
  AssumptionsReport& rep = cyc.assumptions_report;

  const CriticalCurve curve = trace_critical_curve(model, W, resolution);
  if (!curve.violations.empty()) {
    rep.basic = false;
    rep.notes.push_back(curve.violations.front());
  }
  if (curve.empty()) {
    rep.notes.push_back("no critical manifold in the window");
    throw AssumptionFailure("singular cycle: " + rep.summary(), rep);
  }
  const auto contacts = find_contact_points(model, curve);
  std::vector<ContactPoint> jumps;
  for (const auto& c : contacts)
    if (c.order == 1 && c.regular && c.jump_class != JumpClass::none) jumps.push_back(c);
  if (jumps.size() != 1) {
    std::ostringstream os;
    os << jumps.size() << " regular order-1 jump points (exactly one required)";
    rep.notes.push_back(os.str());
    throw AssumptionFailure("singular cycle: " + rep.summary(), rep);
  }
  rep.a1 = true;
  cyc.F = jumps.front();
  rep.jump_on = cyc.F.jump_class == JumpClass::jump_on;
  cyc.repelling = rep.jump_on;

  ReciprocalResult rr;
  try {
    rr = reciprocal_search(model, cyc.F);
  } catch (const ConvergenceError& e) {
    rep.notes.push_back(e.what());
    throw AssumptionFailure("singular cycle: " + rep.summary(), rep);
  }
  if (!rr.attracting) {
    std::ostringstream os;
    os << "reciprocal point " << rr.point << " lies on a repelling branch (lambda = " << rr.lambda << ")";
    rep.notes.push_back(os.str());
    throw AssumptionFailure("singular cycle: " + rep.summary(), rep);
  }
  cyc.L_F = rr.point;
  cyc.layer_arc = std::move(rr.arc);

  const ModelSpec M = rep.jump_on ? reverse_time(model) : model;
  ContactPoint target = cyc.F;
  target.jump_class = JumpClass::jump_off;
  try {
    cyc.reduced_arc = reduced_segment(M, cyc.L_F, target);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("reduced return failed: ") + e.what());
    throw AssumptionFailure("singular cycle: " + rep.summary(), rep);
  }
  rep.a2 = true;

  cyc.singularities = find_N_singularities(model, W);
  for (const auto& s : cyc.singularities) {
    double dmin = 1e300;
    for (const auto& z : cyc.layer_arc.states) dmin = std::min(dmin, distance(z, s.location));
    if (dmin < 1e-3) {
      std::ostringstream os;
      os << "layer arc passes within " << dmin << " of the N-singularity " << s.location;
      rep.notes.push_back(os.str());
    }
  }
  return cyc;
}

}  // namespace gspt
