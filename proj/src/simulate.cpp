#include "gspt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gspt/errors.hpp"
#include "gspt/singular.hpp"

namespace gspt {

namespace {

constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

// Gauss-Legendre quadrature of g along the dense output, step by step.
template <class G>
double integrate_along(const Trajectory& tr, G&& g) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double a = tr.times[i], b = tr.times[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const DenseSegment* seg = i < tr.segments.size() ? &tr.segments[i] : nullptr;
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double t = mid + half * kGx[k];
      acc += kGw[k] * g(seg ? seg->eval(t) : tr.at(t));
    }
    total += half * acc;
  }
  return total;
}

constexpr int kMaxMisses = 20;

struct Hit {
  bool ok = false;
  Vec2 z;
  double t = 0.0;
  Trajectory traj;
};

// Flow until the first oriented crossing of the section segment.
Hit flow_to_section(const ModelSpec& m, double eps, const PoincareSection& sec, const Vec2& z0,
                    double tol, double max_time, bool store, bool skip_start,
                    double max_arclength = std::numeric_limits<double>::infinity()) {
  Event e;
  e.name = "section";
  e.g = [sec](double, const Vec2& z) { return sec.side(z); };
  e.direction = sec.orientation;
  const double guard = skip_start ? 1e-6 : -1.0;
  e.armed = [sec, guard](double t, const Vec2& z) {
    return t > guard && std::fabs(sec.coord(z)) <= sec.half_width;
  };
  // oriented crossings of the section line outside the segment: the orbit circulates but misses it
  int misses = 0;
  Event miss;
  miss.name = "miss";
  miss.g = e.g;
  miss.direction = sec.orientation;
  miss.terminal = false;
  miss.armed = [sec, guard, &misses](double t, const Vec2& z) {
    if (t > guard && std::fabs(sec.coord(z)) > sec.half_width) ++misses;
    return false;
  };
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.store = store;
  double travelled = 0.0;
  Vec2 prev = z0;
  o.observer = [&](double, const Vec2& z) {
    travelled += distance(prev, z);
    prev = z;
    return misses < kMaxMisses && travelled < max_arclength;
  };
  OdeResult r = solve(full_field(m, eps), 0.0, z0, max_time, o, {e, miss});
  Hit h;
  h.ok = r.reason == StopReason::event;
  h.z = r.z_final;
  h.t = r.t_final;
  h.traj = std::move(r.traj);
  return h;
}

constexpr double kNoiseLogDerivative = -10.0;

void check_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-5)) throw PreconditionError("integration tolerance must lie in [1e-13, 1e-5]");
}

}  // namespace

Trajectory integrate(const ModelSpec& model, const Vec2& z0, double eps, double t0, double t1, double tol) {
  check_tol(tol);
  if (!(eps >= 0.0)) throw PreconditionError("integrate: eps must be nonnegative");
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  return solve(full_field(model, eps), t0, z0, t1, o).traj;
}

PoincareResult poincare_return(const ModelSpec& model, double eps, const PoincareSection& sec,
                               const Vec2& z0, const ReturnOptions& opts) {
  check_tol(opts.tol);
  const Vec2 n = sec.normal();
  const double h0 = dot(model.rhs(z0, eps), n);
  if (!(std::fabs(h0) > 1e-6)) throw PreconditionError("poincare_return: section is not transverse to the flow at the start point");
  Hit h = flow_to_section(model, eps, sec, z0, opts.tol, opts.max_time, true, true, opts.max_arclength);
  if (!h.ok) {
    std::ostringstream os;
    os << "poincare_return: no return to the section (stopped at t = " << h.t << " near " << h.z << ")";
    throw ConvergenceError(os.str());
  }
  PoincareResult r;
  r.z1 = h.z;
  r.s1 = sec.coord(h.z);
  r.time = h.t;
  const double div = integrate_along(h.traj, [&](const Vec2& z) { return model.divergence(z, eps); });
  const double h1 = dot(model.rhs(h.z, eps), n);
  r.log_derivative = div + std::log(std::fabs(h0)) - std::log(std::fabs(h1));
  if (opts.derivative) {
    const double s0 = sec.coord(z0);
    const double d = 1e-6 * sec.half_width;
    const Hit hp = flow_to_section(model, eps, sec, sec.point(s0 + d), opts.tol, opts.max_time, false, true, opts.max_arclength);
    const Hit hm = flow_to_section(model, eps, sec, sec.point(s0 - d), opts.tol, opts.max_time, false, true, opts.max_arclength);
    r.derivative = (hp.ok && hm.ok) ? (sec.coord(hp.z) - sec.coord(hm.z)) / (2 * d)
                                    : std::numeric_limits<double>::quiet_NaN();
    // below ~e^-10 the difference quotient is integration noise; the divergence form is exact
    if (r.log_derivative < kNoiseLogDerivative) r.derivative = std::exp(r.log_derivative);
  }
  if (opts.keep_trajectory) r.traj = std::move(h.traj);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<Equilibrium> find_equilibria(const ModelSpec& model, double eps, const Window& w) {
  constexpr int kSeeds = 14;
  std::vector<Equilibrium> out;
  const double scale = std::max(w.width(), w.height());
  for (int j = 0; j < kSeeds; ++j) {
    for (int i = 0; i < kSeeds; ++i) {
      Vec2 z{w.x_min + (i + 0.5) * w.width() / kSeeds, w.y_min + (j + 0.5) * w.height() / kSeeds};
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        const Vec2 H = model.rhs(z, eps);
        if (!is_finite(H)) break;
        if (norm(H) < 1e-14) {
          ok = true;
          break;
        }
        const Mat2 J = model.jacobian(z, eps);
        const double det = J.det();
        if (det == 0.0 || !std::isfinite(det)) break;
        Vec2 step{(J.d * H.x - J.b * H.y) / det, (-J.c * H.x + J.a * H.y) / det};
        // damp huge steps
        const double sn = norm(step);
        if (sn > 0.5 * scale) step = (0.5 * scale / sn) * step;
        z -= step;
        if (norm(step) < 1e-15 * std::max(1.0, norm(z))) {
          ok = norm(model.rhs(z, eps)) < 1e-11;
          break;
        }
      }
      if (!ok || !w.contains(z)) continue;
      bool dup = false;
      for (const auto& e : out) dup = dup || distance(e.z, z) < 1e-8 * std::max(1.0, scale);
      if (dup) continue;
      const Mat2 J = model.jacobian(z, eps);
      out.push_back({z, J.trace(), J.det()});
    }
  }
  std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
    return a.z.x != b.z.x ? a.z.x < b.z.x : a.z.y < b.z.y;
  });
  return out;
}

namespace {

struct Seeded {
  PoincareSection section;
  Vec2 seed;
  double max_arclength = std::numeric_limits<double>::infinity();
};

Seeded seed_from_singular_cycle(const ModelSpec& M, double eps, const SingularCycle& cyc) {
  const Polyline gamma = cyc.polyline();
  // centre: an N-singularity the cycle winds around, else the centroid
  Vec2 c;
  bool found = false;
  for (const auto& s : cyc.singularities)
    if (winding_number(gamma, s.location) != 0) {
      c = s.location;
      found = true;
      break;
    }
  if (!found) {
    for (const auto& p : gamma) c += p;
    c = c / static_cast<double>(gamma.size());
  }
  // arclength midpoint of the layer arc
  const Polyline layer = cyc.layer_arc.resample(4000);
  const double half = 0.5 * arclength(layer);
  double acc = 0.0;
  Vec2 q = layer.back();
  for (std::size_t i = 0; i + 1 < layer.size(); ++i) {
    const double d = distance(layer[i], layer[i + 1]);
    if (acc + d >= half) {
      q = layer[i] + ((half - acc) / d) * (layer[i + 1] - layer[i]);
      break;
    }
    acc += d;
  }
  const double L = distance(q, c);
  if (!(L > 0.0)) throw DegeneracyError("find_limit_cycle: degenerate section placement");
  PoincareSection sec;
  sec.direction = (q - c) / L;
  sec.base = c + 0.75 * L * sec.direction;
  sec.half_width = 0.75 * L;
  const double hn = dot(M.rhs(q, eps), sec.normal());
  if (!(std::fabs(hn) > 1e-6))
    throw PreconditionError("find_limit_cycle: automatic section is not transverse to the flow");
  sec.orientation = hn > 0.0 ? 1 : -1;
  // a return much longer than Gamma means the eps-cycle has left the neighbourhood of Gamma
  return {sec, sec.point(sec.coord(q)), 50.0 * arclength(gamma, true)};
}

Seeded seed_from_equilibrium(const ModelSpec& M, double eps, const Window& W, double tol, double max_time) {
  const auto eqs = find_equilibria(M, eps, W.inflated(1.5));
  const Equilibrium* src = nullptr;
  for (const auto& e : eqs)
    if (e.det > 0.0 && e.trace > 0.0 && (!src || e.trace > src->trace)) src = &e;
  if (!src) {
    std::ostringstream os;
    os << "find_limit_cycle: no unstable equilibrium to seed from (" << eqs.size()
       << " equilibria found, none a source)";
    throw ConvergenceError(os.str());
  }
  const Vec2 e = src->z;
  const double r0 = 1e-3 * std::min(W.width(), W.height());
  const Vec2 start = e + r0 * Vec2{0.8944271909999159, 0.4472135954999579};

  const Vec2 dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  struct RayHit {
    double r;
    int orient;
    Vec2 z;
  };
  std::vector<RayHit> hits[4];
  int converged_ray = -1;
  bool collapsed = false;
  std::vector<Event> events;
  for (int k = 0; k < 4; ++k) {
    Event ev;
    const Vec2 d = dirs[k];
    ev.g = [d, e](double, const Vec2& z) { return cross(d, z - e); };
    ev.terminal = false;
    ev.armed = [&, d, k](double, const Vec2& z) {
      const double r = dot(z - e, d);
      if (r <= 0.0) return false;
      const int orient = cross(d, M.rhs(z, eps)) > 0.0 ? 1 : -1;
      auto& hv = hits[k];
      hv.push_back({r, orient, z});
      if (r < 1e-9 * std::max(W.width(), W.height())) collapsed = true;
      // converged when the latest radius repeats one of the last few of the same orientation
      int seen = 0;
      for (auto it = hv.rbegin() + 1; it != hv.rend() && seen < 4; ++it) {
        if (it->orient != orient) continue;
        ++seen;
        if (std::fabs(it->r - r) <= 1e-7 * r && hv.size() >= 6 && converged_ray < 0) converged_ray = k;
      }
      if (hv.size() > 2000 && converged_ray < 0) converged_ray = k;
      return true;
    };
    events.push_back(ev);
  }
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.store = false;
  o.observer = [&](double, const Vec2&) { return converged_ray < 0 && !collapsed; };
  solve(full_field(M, eps), 0.0, start, max_time, o, events);
  if (collapsed) throw ConvergenceError("find_limit_cycle: trajectory collapses onto the equilibrium");

  // pick the ray with the largest normal speed at its last crossing
  int best = -1;
  double best_speed = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (hits[k].size() < 3) continue;
    const RayHit& h = hits[k].back();
    const double sp = std::fabs(cross(dirs[k], M.rhs(h.z, eps)));
    if (sp > best_speed) {
      best_speed = sp;
      best = k;
    }
  }
  if (best < 0) throw ConvergenceError("find_limit_cycle: no sustained oscillation around the equilibrium");
  const RayHit last = hits[best].back();
  // keep other crossings of the same orientation off the section
  double half = last.r;
  const auto& hv = hits[best];
  for (std::size_t i = hv.size() >= 12 ? hv.size() - 12 : 0; i < hv.size(); ++i)
    if (hv[i].orient == last.orient && std::fabs(hv[i].r - last.r) > 1e-4 * last.r)
      half = std::min(half, 0.5 * std::fabs(hv[i].r - last.r));
  PoincareSection sec;
  sec.direction = dirs[best];
  sec.base = e + last.r * sec.direction;
  sec.half_width = 0.999 * half;
  sec.orientation = last.orient;
  return {sec, last.z};
}

// Every step of the dense output subdivided so chords stay below ds.
void refine_samples(const ModelSpec& m, double eps, const Trajectory& tr, LimitCycle& lc) {
  const Window b = bounds(tr.states);
  const double diam = std::hypot(b.width(), b.height());
  double ds = diam / 4000.0;
  for (int pass = 0; pass < 4; ++pass) {
    lc.samples.clear();
    lc.sample_times.clear();
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
      const double chord = distance(tr.states[i], tr.states[i + 1]);
      const int sub = std::clamp(static_cast<int>(std::ceil(chord / ds)), 1, 256);
      for (int k = 0; k < sub; ++k) {
        const double t = tr.times[i] + (tr.times[i + 1] - tr.times[i]) * k / sub;
        lc.sample_times.push_back(t);
        lc.samples.push_back(tr.segments[i].eval(t));
      }
    }
    if (lc.samples.size() >= 2000) break;
    ds *= 0.25;
  }
  lc.speeds.clear();
  lc.speeds.reserve(lc.samples.size());
  for (const auto& z : lc.samples) lc.speeds.push_back(norm(m.rhs(z, eps)));
}

struct FixedPoint {
  double s = 0.0;
  int iterations = 0;
};

// Fixed point of the return map: plain iteration with Aitken steps, Brent scan as fallback.
FixedPoint return_map_fixed_point(const ModelSpec& M, double eps, const Seeded& sd, const CycleOptions& opts) {
  const PoincareSection& sec = sd.section;
  ReturnOptions ro;
  ro.tol = opts.tol;
  ro.max_time = opts.max_time;
  ro.max_arclength = sd.max_arclength;
  ro.derivative = false;
  auto P = [&](double s) { return poincare_return(M, eps, sec, sec.point(s), ro).s1; };

  const double scale = std::max(1.0, sec.half_width);
  double s = sec.coord(sd.seed);
  std::vector<double> hist{s};
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double s1 = P(s);
    hist.push_back(s1);
    if (std::fabs(s1 - s) < opts.fixed_point_tol * scale) {
      s = s1;
      converged = true;
      break;
    }
    s = s1;
    // Aitken extrapolation on every third iterate
    const std::size_t n = hist.size();
    if (n >= 3 && n % 3 == 0) {
      const double a = hist[n - 3], b = hist[n - 2], c = hist[n - 1];
      const double den = c - 2 * b + a;
      if (std::fabs(den) > 1e-300) {
        const double acc = c - (c - b) * (c - b) / den;
        if (std::isfinite(acc) && std::fabs(acc) < sec.half_width) {
          s = acc;
          hist.push_back(s);
        }
      }
    }
  }
  if (!converged) {
    // bracketed root of P(s) - s on the section
    constexpr int kScan = 16;
    double a = -0.999 * sec.half_width, fa = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k <= kScan && !converged; ++k) {
      const double b = -0.999 * sec.half_width + 1.998 * sec.half_width * k / kScan;
      double fb;
      try {
        fb = P(b) - b;
      } catch (const Error&) {
        fb = std::numeric_limits<double>::quiet_NaN();
      }
      if (std::isfinite(fa) && std::isfinite(fb) && (fa > 0) != (fb > 0)) {
        s = brent_root([&](double x) { return P(x) - x; }, a, b, fa, fb, opts.fixed_point_tol * scale);
        converged = true;
      }
      a = b;
      fa = fb;
    }
    if (!converged)
      throw ConvergenceError(
          "find_limit_cycle: return-map iteration did not converge; try a smaller eps, or the cycle "
          "may be repelling (retry in reversed time)");
  }
  return {s, it + 1};
}

}  // namespace

LimitCycle find_limit_cycle(const ModelSpec& model, double eps, const CycleOptions& opts) {
  check_tol(opts.tol);
  if (!(eps > 0.0)) throw PreconditionError("find_limit_cycle: eps must be positive");
  const Window W = opts.window.value_or(model.window);

  LimitCycle lc;
  lc.eps = eps;
  ModelSpec M = model;
  Seeded sd;
  FixedPoint fp;
  if (opts.section) {
    sd.section = *opts.section;
    sd.seed = opts.seed_point.value_or(sd.section.base);
    lc.seed = "given";
    fp = return_map_fixed_point(M, eps, sd, opts);
  } else {
    bool done = false;
    if (opts.seed != SeedStrategy::equilibrium) {
      try {
        const SingularCycle cyc = build_singular_cycle(model, W);
        ModelSpec Ms = cyc.repelling ? reverse_time(model) : model;
        Seeded s1 = seed_from_singular_cycle(Ms, eps, cyc);
        fp = return_map_fixed_point(Ms, eps, s1, opts);
        M = std::move(Ms);
        sd = s1;
        lc.repelling_construction = cyc.repelling;
        lc.seed = "singular_cycle";
        done = true;
      } catch (const AssumptionFailure&) {
        if (opts.seed == SeedStrategy::singular_cycle) throw;
      } catch (const Error&) {
        // at large eps the singular-cycle section need not be crossed; try the equilibrium seed
        if (opts.seed == SeedStrategy::singular_cycle) throw;
      }
    }
    if (!done) {
      sd = seed_from_equilibrium(M, eps, W, opts.tol, opts.max_time);
      lc.seed = "equilibrium";
      fp = return_map_fixed_point(M, eps, sd, opts);
    }
  }
  const PoincareSection& sec = sd.section;
  lc.section = sec;
  const double s = fp.s;
  lc.iterations = fp.iterations;

  ReturnOptions fin;
  fin.tol = opts.tol;
  fin.max_time = opts.max_time;
  fin.keep_trajectory = true;
  fin.derivative = true;
  PoincareResult pr = poincare_return(M, eps, sec, sec.point(s), fin);
  lc.fixed_point = sec.point(s);
  lc.return_residual = std::fabs(pr.s1 - s);
  lc.return_derivative = pr.derivative;
  lc.log_return_derivative = pr.log_derivative;
  lc.period_desing = pr.time;
  lc.orbit = std::move(pr.traj);

  const double logm = integrate_along(lc.orbit, [&](const Vec2& z) { return M.divergence(z, eps); });
  lc.log_multiplier = lc.repelling_construction ? -logm : logm;
  lc.floquet_fast = lc.log_multiplier / lc.period_desing;
  lc.floquet_exponent = lc.log_multiplier / (eps * lc.period_desing);
  lc.attracting = lc.log_multiplier < 0.0;

  if (model.time_factor) {
    const PhysicalTime pt = physical_time(model, lc.orbit);
    lc.period_physical = std::fabs(pt.value);
    lc.physical_orientation_reversed = pt.orientation_reversed;
  } else {
    lc.period_physical = lc.period_desing;
  }
  refine_samples(M, eps, lc.orbit, lc);
  lc.amplitude = bounds(lc.samples);
  try {
    lc.strokes = stroke_count(lc);
  } catch (const DegeneracyError&) {
    lc.strokes = -1;
  }
  return lc;
}

double floquet_exponent(const LimitCycle& cycle, double return_derivative) {
  if (!(return_derivative > 0.0))
    throw DomainError("floquet_exponent: return-map derivative must be positive (orientation-preserving return)");
  if (!(cycle.period_desing > 0.0)) throw PreconditionError("floquet_exponent: cycle period must be positive");
  return std::log(return_derivative) / cycle.period_desing;
}

int stroke_count(const LimitCycle& cycle) {
  const auto& sp = cycle.speeds;
  if (sp.size() < 1000) throw PreconditionError("stroke_count: need at least 1000 samples");
  const auto [mn, mx] = std::minmax_element(sp.begin(), sp.end());
  if (!(*mn > 0.0) || *mx / *mn < 10.0)
    throw DegeneracyError("stroke_count: no timescale separation (max/min speed below 10)");
  const double thr = std::sqrt(*mn * *mx);
  const std::size_t n = sp.size();
  int transitions = 0;
  for (std::size_t i = 0; i < n; ++i)
    if ((sp[i] > thr) != (sp[(i + 1) % n] > thr)) ++transitions;
  return transitions == 0 ? 1 : transitions;
}

UniquenessProbe uniqueness_probe(const ModelSpec& model, double eps, int n_seeds, double radius,
                                 const CycleOptions& opts) {
  if (n_seeds < 1) throw PreconditionError("uniqueness_probe: need at least one seed");
  const LimitCycle ref = find_limit_cycle(model, eps, opts);
  const ModelSpec M = ref.repelling_construction ? reverse_time(model) : model;
  const SingularCycle cyc = build_singular_cycle(model, opts.window.value_or(model.window));
  const Polyline gamma = cyc.polyline();
  const double total = arclength(gamma, true);

  UniquenessProbe out;
  for (int k = 0; k < n_seeds; ++k) {
    // point of Gamma at arclength fraction (k + 1/2)/n, displaced along the normal
    const double target = total * (k + 0.5) / n_seeds;
    double acc = 0.0;
    Vec2 p = gamma.front(), tan{1.0, 0.0};
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      const Vec2 a = gamma[i], b = gamma[(i + 1) % gamma.size()];
      const double d = distance(a, b);
      if (d > 0.0 && acc + d >= target) {
        p = a + ((target - acc) / d) * (b - a);
        tan = (b - a) / d;
        break;
      }
      acc += d;
    }
    const Vec2 seed = p + ((k % 2 == 0) ? radius : -radius) * perp(tan);
    const Hit h = flow_to_section(M, eps, ref.section, seed, opts.tol, opts.max_time, false, false);
    if (!h.ok) throw ConvergenceError("uniqueness_probe: a seed did not reach the section");
    CycleOptions o = opts;
    o.section = ref.section;
    o.seed_point = h.z;
    const LimitCycle lc = find_limit_cycle(M, eps, o);
    const double d = hausdorff_distance(lc.samples, ref.samples);
    out.distances.push_back(d);
    out.max_distance = std::max(out.max_distance, d);
  }
  return out;
}

}  // namespace gspt
