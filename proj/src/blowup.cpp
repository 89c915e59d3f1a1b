#include "gspt/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gspt/errors.hpp"
#include "gspt/ode.hpp"

namespace gspt {

RiccatiProblem RiccatiProblem::from(const ExpansionCoeffs& c, double x_min, double x_max) {
  RiccatiProblem p;
  p.a0 = c.a0;
  p.b1 = c.b1;
  p.d0 = c.d0;
  p.x_min = x_min;
  p.x_max = x_max;
  return p;
}

RiccatiProblem RiccatiProblem::from(const ExpansionCoeffs& c) {
  RiccatiProblem p = from(c, -1.0, 1.0);
  const double L = p.length_scale();
  p.x_min = -25.0 * L;
  p.x_max = 25.0 * L;
  return p;
}

double RiccatiProblem::length_scale() const { return std::cbrt(4.0 * a0 * d0 / (b1 * b1)); }

double RiccatiProblem::omega_scale() const { return std::cbrt(2.0 * d0 * d0 / (a0 * b1)); }

namespace {

void check_problem(const RiccatiProblem& p) {
  if (!(p.a0 > 0.0 && p.b1 > 0.0 && p.d0 > 0.0))
    throw PreconditionError("riccati: a0, b1, d0 must be positive (jump-off sign convention)");
  if (!(p.x_min <= -10.0 * std::cbrt(p.d0 / p.b1)))
    throw PreconditionError("riccati: x_min must be <= -10 (d0/b1)^{1/3}");
  if (!(p.x_max > 0.0)) throw PreconditionError("riccati: x_max must be positive");
}

// u(x) on [x_min, x_max] as a dense trajectory (time = x, state = (u, 0)).
Trajectory special_trajectory(const RiccatiProblem& p) {
  check_problem(p);
  const double a0 = p.a0, b1 = p.b1, d0 = p.d0;
  const VectorField rhs = [=](double x, const Vec2& s) { return Vec2{(d0 + b1 * x * s.x) / (a0 * s.x), 0.0}; };
  Event zero;
  zero.name = "u=0";
  zero.g = [](double, const Vec2& s) { return s.x; };
  OdeOptions o;
  o.rtol = 1e-13;
  o.atol = 1e-15;
  const double u0 = -(d0 / b1) / p.x_min;
  OdeResult r = solve(rhs, p.x_min, {u0, 0.0}, p.x_max, o, {zero});
  if (r.reason == StopReason::event) {
    std::ostringstream os;
    os << "riccati_special_solution: u crosses 0 at x = " << r.t_final
       << " before the turning region; retry with a more negative x_min";
    throw ConvergenceError(os.str());
  }
  return std::move(r.traj);
}

double zeta_at(const Trajectory& tr, double x) { return tr.at(x).x; }

}  // namespace

RiccatiSolution riccati_special_solution(const RiccatiProblem& prob, const std::vector<double>& grid) {
  const Trajectory tr = special_trajectory(prob);
  RiccatiSolution out;
  out.x = grid;
  out.zeta.reserve(grid.size());
  for (double x : grid) {
    if (x < prob.x_min || x > prob.x_max) throw PreconditionError("riccati_special_solution: grid outside [x_min, x_max]");
    const double z = zeta_at(tr, x);
    out.positive = out.positive && z > 0.0;
    out.zeta.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------

double bessel_j_series(double nu, double w) {
  if (std::fabs(w) > 20.0) throw PreconditionError("bessel_j_series: |w| > 20");
  if (w == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double h = 0.5 * w;
  // first term, then ratio recurrence
  double term = std::pow(h, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -h * h / (k * (k + nu));
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

namespace {

double omega_fn(double z) {
  const double w = 2.0 * std::pow(z, 1.5) / 3.0;
  return bessel_j_series(-1.0 / 3.0, w) + bessel_j_series(1.0 / 3.0, w);
}

template <class Fn>
double bisect(Fn&& f, double a, double b, double fa) {
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(b)); ++i) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double omega0_constant(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw PreconditionError("omega0_constant: scan step must lie in (0, 0.5]");
  double a = step, fa = omega_fn(a);
  for (double b = a + step; b <= 5.0 + 1e-12; b += step) {
    const double fb = omega_fn(b);
    if ((fa > 0) != (fb > 0)) return bisect(omega_fn, a, b, fa);
    a = b;
    fa = fb;
  }
  throw ConsistencyError("omega0_constant: no sign change on (0, 5]");
}

double airy_ai_series(double x) {
  constexpr double c1 = 0.355028053887817239;  // Ai(0)
  constexpr double c2 = 0.258819403792806798;  // -Ai'(0)
  const double x3 = x * x * x;
  double f = 1.0, g = x, tf = 1.0, tg = x;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
    tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
    f += tf;
    g += tg;
    if (std::fabs(tf) + std::fabs(tg) < 1e-18 * (std::fabs(f) + std::fabs(g))) break;
  }
  return c1 * f - c2 * g;
}

double airy_first_zero_series() {
  auto h = [](double z) { return airy_ai_series(-z); };
  double a = 0.0, fa = h(a);
  for (double b = 0.01; b <= 5.0; b += 0.01) {
    const double fb = h(b);
    if ((fa > 0) != (fb > 0)) return bisect(h, a, b, fa);
    a = b;
    fa = fb;
  }
  throw ConsistencyError("airy_first_zero_series: no sign change on (0, 5]");
}

// ---------------------------------------------------------------------------

TailFit left_tail_fit(const RiccatiProblem& prob, double x_near, double x_far) {
  if (x_near == 0.0) x_near = 3.0 * prob.length_scale();
  if (x_far == 0.0) x_far = 12.0 * prob.length_scale();
  if (!(0.0 < x_near && x_near < x_far && -x_far >= prob.x_min))
    throw PreconditionError("left_tail_fit: need 0 < x_near < x_far <= -x_min");
  const Trajectory tr = special_trajectory(prob);
  constexpr int n = 16;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double ax = x_near * std::pow(x_far / x_near, static_cast<double>(i) / (n - 1));
    const double e = std::fabs(zeta_at(tr, -ax) + (prob.d0 / prob.b1) / (-ax));
    const double lx = std::log(ax), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  TailFit fit;
  fit.exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

TailFit right_tail_fit(const RiccatiProblem& prob, double x_near, double x_far) {
  if (x_near == 0.0) x_near = 6.0 * prob.length_scale();
  if (x_far == 0.0) x_far = prob.x_max;
  if (!(0.0 < x_near && x_near < x_far && x_far <= prob.x_max))
    throw PreconditionError("right_tail_fit: need 0 < x_near < x_far <= x_max");
  const Trajectory tr = special_trajectory(prob);
  // normal equations for r(x) = C + k3 x^-3 + k4 x^-4
  constexpr int n = 31;
  double A[3][3] = {}, rhs[3] = {};
  for (int i = 0; i < n; ++i) {
    const double x = x_near + (x_far - x_near) * i / (n - 1);
    const double r = zeta_at(tr, x) - prob.b1 / (2.0 * prob.a0) * x * x + (2.0 * prob.d0 / prob.b1) / x;
    const double phi[3] = {1.0, std::pow(x, -3.0), std::pow(x, -4.0)};
    for (int a = 0; a < 3; ++a) {
      rhs[a] += phi[a] * r;
      for (int b = 0; b < 3; ++b) A[a][b] += phi[a] * phi[b];
    }
  }
  // Gaussian elimination with partial pivoting
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double m = A[r][c] / A[c][c];
      for (int k = c; k < 3; ++k) A[r][k] -= m * A[c][k];
      rhs[r] -= m * rhs[c];
    }
  }
  double sol[3];
  for (int c = 2; c >= 0; --c) {
    double acc = rhs[c];
    for (int k = c + 1; k < 3; ++k) acc -= A[c][k] * sol[k];
    sol[c] = acc / A[c][c];
  }
  TailFit fit;
  fit.constant = sol[0];
  fit.predicted = prob.omega_scale() * omega0_constant();
  return fit;
}

double normalised_mapping_error(const RiccatiProblem& prob, const std::vector<double>& grid) {
  const double alpha = std::cbrt(prob.b1 * prob.b1 / (4.0 * prob.a0 * prob.d0));
  const double beta = std::cbrt(prob.a0 * prob.b1 / (2.0 * prob.d0 * prob.d0));
  RiccatiProblem norm_prob;
  norm_prob.a0 = 1.0;
  norm_prob.b1 = 2.0;
  norm_prob.d0 = 1.0;
  norm_prob.x_min = alpha * prob.x_min;
  norm_prob.x_max = alpha * prob.x_max;
  const Trajectory direct = special_trajectory(prob);
  const Trajectory normal = special_trajectory(norm_prob);
  double worst = 0.0;
  for (double x : grid) {
    if (x < prob.x_min || x > prob.x_max) throw PreconditionError("normalised_mapping_error: grid outside the span");
    const double mapped = zeta_at(normal, alpha * x) / beta;
    const double d = zeta_at(direct, x);
    worst = std::max(worst, std::fabs(mapped - d) / std::max(1.0, std::fabs(d)));
  }
  return worst;
}

ExitCheck sigma2_exit_check(const RiccatiProblem& prob, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("sigma2_exit_check: delta must lie in (0, 1)");
  const double x = std::cbrt(1.0 / delta);
  if (x > prob.x_max) throw PreconditionError("sigma2_exit_check: delta^{-1/3} beyond x_max");
  const Trajectory tr = special_trajectory(prob);
  ExitCheck c;
  c.delta = delta;
  c.direct = zeta_at(tr, x);
  c.predicted = prob.b1 / (2.0 * prob.a0) * std::pow(delta, -2.0 / 3.0) + prob.omega_scale() * omega0_constant() -
                (2.0 * prob.d0 / prob.b1) * std::cbrt(delta);
  return c;
}

}  // namespace gspt
