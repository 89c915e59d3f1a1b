#include "gspt/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gspt/errors.hpp"

namespace gspt {

Vec2 Trajectory::at(double t) const {
  if (times.empty()) throw PreconditionError("trajectory is empty");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  if (i < segments.size()) return segments[i].eval(t);
  // no dense output stored: linear interpolation
  const double s = (t - times[i]) / (times[i + 1] - times[i]);
  return states[i] + s * (states[i + 1] - states[i]);
}

std::vector<Vec2> Trajectory::resample(std::size_t n) const {
  if (n < 2) throw PreconditionError("resample needs at least two points");
  std::vector<Vec2> out;
  out.reserve(n);
  const double t0 = t_begin(), dt = duration() / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) out.push_back(at(t0 + dt * static_cast<double>(k)));
  return out;
}

void Trajectory::truncate(double t) {
  if (empty() || t >= t_end()) return;
  if (t <= t_begin()) {
    times.resize(1);
    states.resize(1);
    segments.clear();
    return;
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const Vec2 z = at(t);
  if (t == times[i]) {
    times.resize(i + 1);
    states.resize(i + 1);
    segments.resize(std::min(segments.size(), i));
    return;
  }
  times.resize(i + 2);
  states.resize(i + 2);
  times[i + 1] = t;
  states[i + 1] = z;
  // the polynomial of segment i stays valid on the shorter interval
  segments.resize(std::min(segments.size(), i + 1));
}

double brent_root(const std::function<double(double)>& g, double a, double b, double fa, double fb,
                  double xtol, int max_iter) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw ConvergenceError("brent_root: no sign change in bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * 2.2e-16 * std::fabs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = g(b);
  }
  return b;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double err_norm(const Vec2& err, const Vec2& y0, const Vec2& y1, double rtol, double atol) {
  const double sx = atol + rtol * std::max(std::fabs(y0.x), std::fabs(y1.x));
  const double sy = atol + rtol * std::max(std::fabs(y0.y), std::fabs(y1.y));
  const double ex = err.x / sx, ey = err.y / sy;
  return std::sqrt(0.5 * (ex * ex + ey * ey));
}

// Initial step guess (Hairer, Norsett, Wanner; order 5).
double initial_step(const VectorField& f, double t0, const Vec2& y0, const Vec2& k1, double span,
                    const OdeOptions& o) {
  const double dnf = err_norm(k1, y0, y0, o.rtol, o.atol);
  const double dny = err_norm(y0, y0, y0, o.rtol, o.atol);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
  h = std::min({h, o.h_max, span});
  const Vec2 k2 = f(t0 + h, y0 + h * k1);
  const double der2 = err_norm(k2 - k1, y0, y0, o.rtol, o.atol) / h;
  const double der12 = std::max(std::fabs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, o.h_max, span});
}

bool crossing(double g0, double g1, int direction) {
  if (direction >= 0 && g0 < 0.0 && g1 >= 0.0) return true;
  if (direction <= 0 && g0 > 0.0 && g1 <= 0.0) return true;
  return false;
}

}  // namespace

OdeResult solve(const VectorField& f, double t0, const Vec2& z0, double t_end,
                const OdeOptions& o, const std::vector<Event>& events) {
  if (!(t_end > t0)) throw PreconditionError("solve: t_end must exceed t0");
  if (!is_finite(z0)) throw DomainError("solve: non-finite initial state");
  if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw PreconditionError("solve: tolerances must be positive");

  OdeResult res;
  Trajectory& tr = res.traj;
  if (o.store) {
    tr.times.push_back(t0);
    tr.states.push_back(z0);
  }

  constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  double facold = 1e-4;

  double t = t0;
  Vec2 y = z0;
  Vec2 k1 = f(t, y);
  if (!is_finite(k1)) throw DomainError("solve: non-finite vector field at initial state");
  double h = o.h_init > 0.0 ? std::min(o.h_init, t_end - t0)
                            : initial_step(f, t0, z0, k1, t_end - t0, o);

  std::vector<double> gprev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) gprev[i] = events[i].g(t, y);

  bool reject = false;
  bool last_nonfinite = false;
  long steps = 0;

  while (t < t_end) {
    if (steps >= o.max_steps) {
      res.reason = StopReason::max_steps;
      break;
    }
    if (0.1 * std::fabs(h) <= std::fabs(t) * 2.2e-16 || h < 1e-300) {
      if (last_nonfinite)
        throw DomainError("solve: vector field became non-finite (state left the domain)");
      std::ostringstream os;
      os << "step size underflow at t=" << t << " (state " << y
         << "); the problem is too stiff for the requested tolerance, "
            "try a larger tol or a shorter time span";
      throw StepSizeError(os.str());
    }
    bool last = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }
    ++steps;

    const Vec2 k2 = f(t + c2 * h, y + h * (a21 * k1));
    const Vec2 k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec2 k7 = f(t + h, y1);
    const Vec2 errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = err_norm(errv, y, y1, o.rtol, o.atol);
    last_nonfinite = !std::isfinite(err) || !is_finite(k7);
    if (last_nonfinite) err = 1e10;

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double hnew = h / fac;
      facold = std::max(err, 1e-4);
      ++res.accepted;

      DenseSegment seg;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = y1 - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      const double t1 = last ? t_end : t + h;

      // events: locate the earliest crossing in this step
      bool stop = false;
      double t_stop = t1;
      Vec2 z_stop = y1;
      std::vector<EventHit> step_hits;
      for (std::size_t i = 0; i < events.size(); ++i) {
        const double g1 = events[i].g(t1, y1);
        if (crossing(gprev[i], g1, events[i].direction)) {
          auto gf = [&](double s) { return events[i].g(s, seg.eval(s)); };
          const double tr_ = brent_root(gf, t, t1, gprev[i], g1, 1e-15 * std::max(1.0, std::fabs(t1)));
          const Vec2 zr = seg.eval(tr_);
          if (!events[i].armed || events[i].armed(tr_, zr)) step_hits.push_back({i, tr_, zr});
        }
        gprev[i] = g1;
      }
      std::sort(step_hits.begin(), step_hits.end(),
                [](const EventHit& a, const EventHit& b) { return a.t < b.t; });
      for (const auto& hit : step_hits) {
        if (stop && hit.t > t_stop) break;
        res.hits.push_back(hit);
        if (events[hit.index].terminal && !stop) {
          stop = true;
          t_stop = hit.t;
          z_stop = hit.z;
        }
      }

      if (o.store) {
        if (t_stop > t) {
          tr.segments.push_back(seg);
          tr.times.push_back(t_stop);
          tr.states.push_back(z_stop);
        } else {
          tr.states.back() = z_stop;
        }
      }
      t = t_stop;
      y = z_stop;
      if (stop) {
        res.reason = StopReason::event;
        break;
      }
      k1 = k7;
      if (!is_finite(y)) throw DomainError("solve: state became non-finite");
      if (o.observer && !o.observer(t, y)) {
        res.reason = StopReason::observer;
        break;
      }
      hnew = std::min(hnew, o.h_max);
      if (reject) hnew = std::min(hnew, h);
      reject = false;
      h = hnew;
    } else {
      h /= std::min(facc1, fac11 / safe);
      reject = true;
      ++res.rejected;
    }
  }
  res.t_final = t;
  res.z_final = y;
  return res;
}

}  // namespace gspt
