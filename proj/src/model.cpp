#include "gspt/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gspt/errors.hpp"

namespace gspt {

namespace {

const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

double fd_step(double v) { return kFdStep * std::max(1.0, std::fabs(v)); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite value of ") + what);
}

}  // namespace

Vec2 gradient_fd(const std::function<double(const Vec2&)>& f, const Vec2& z) {
  const double hx = fd_step(z.x), hy = fd_step(z.y);
  const double fxp = f({z.x + hx, z.y}), fxm = f({z.x - hx, z.y});
  const double fyp = f({z.x, z.y + hy}), fym = f({z.x, z.y - hy});
  if (!std::isfinite(fxp) || !std::isfinite(fxm) || !std::isfinite(fyp) || !std::isfinite(fym))
    throw DomainError("gradient_fd: non-finite sample near the evaluation point");
  return {(fxp - fxm) / (2 * hx), (fyp - fym) / (2 * hy)};
}

Mat2 jacobian_fd(const std::function<Vec2(const Vec2&)>& F, const Vec2& z) {
  const double hx = fd_step(z.x), hy = fd_step(z.y);
  const Vec2 cx = (F({z.x + hx, z.y}) - F({z.x - hx, z.y})) / (2 * hx);
  const Vec2 cy = (F({z.x, z.y + hy}) - F({z.x, z.y - hy})) / (2 * hy);
  if (!is_finite(cx) || !is_finite(cy))
    throw DomainError("jacobian_fd: non-finite sample near the evaluation point");
  return Mat2::from_columns(cx, cy);
}

Mat2 PlaneField::jac(const Vec2& z, double eps) const {
  if (jacobian) return jacobian(z, eps);
  return jacobian_fd([&](const Vec2& p) { return value(p, eps); }, z);
}

double ModelSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw PreconditionError("model '" + name + "' has no parameter '" + key + "'");
  return it->second;
}

Mat2 ModelSpec::jacobian(const Vec2& z, double eps) const {
  const Vec2 n = N(z);
  Mat2 J = Mat2::outer(n, grad_f(z)) + f(z) * n_field.jac(z);
  if (eps != 0.0) J = J + eps * g_field.jac(z, eps);
  return J;
}

double ModelSpec::divergence(const Vec2& z, double eps) const {
  double d = f(z) * n_field.jac(z).trace() + lambda(z);
  if (eps != 0.0) d += eps * g_field.jac(z, eps).trace();
  return d;
}

Vec2 eval_rhs(const ModelSpec& model, const Vec2& z, double eps) {
  if (!is_finite(z)) throw PreconditionError("eval_rhs: non-finite state");
  if (!(eps >= 0.0)) throw PreconditionError("eval_rhs: eps must be nonnegative");
  const Vec2 n = model.N(z);
  if (!is_finite(n)) throw DomainError("eval_rhs: N is non-finite at the given state");
  const double fv = model.f(z);
  require_finite(fv, "f");
  Vec2 out = fv * n;
  if (eps != 0.0) {
    const Vec2 g = model.G(z, eps);
    if (!is_finite(g)) throw DomainError("eval_rhs: G is non-finite at the given state");
    out += eps * g;
  }
  return out;
}

VectorField full_field(const ModelSpec& model, double eps) {
  return [&model, eps](double, const Vec2& z) { return model.rhs(z, eps); };
}

ModelSpec reverse_time(const ModelSpec& model) {
  ModelSpec r = model;
  const PlaneField n = model.n_field, g = model.g_field;
  r.n_field.value = [n](const Vec2& z, double e) { return -n.value(z, e); };
  r.n_field.jacobian = [n](const Vec2& z, double e) { return -1.0 * n.jac(z, e); };
  r.g_field.value = [g](const Vec2& z, double e) { return -g.value(z, e); };
  r.g_field.jacobian = [g](const Vec2& z, double e) { return -1.0 * g.jac(z, e); };
  r.reversed = !model.reversed;
  return r;
}

std::pair<double, double> em_turning_point(double mu, double kappa, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(kappa > 0.0) || !std::isfinite(mu))
    throw PreconditionError("em_turning_point: need a, b, kappa > 0");
  const double ratio = a / ((a + b) * kappa);
  if (!(kappa < a / (a + b)))
    throw PreconditionError("em_turning_point: requires kappa < a/(a+b)");
  const double xs = mu * std::pow(ratio, a / b) * (b / (a + b));
  const double ys = -std::log(ratio) / b;
  return {xs, ys};
}

// ---------------------------------------------------------------------------
// model zoo

const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> cat = {
      {"minimal", {}, "rational two-stroke model, N=(1-y, x-1+y), f=y, G=(0,1)"},
      {"ebers_moll", {"mu", "kappa", "a", "b"},
       "desingularised Ebers-Moll transistor, N=(-y_*-y, x-x_* e^{-ay}), f=y, G=(0,1)"},
      {"stickslip_exp", {"v0", "mu_m", "mu_s", "a"},
       "stick-slip with exponential friction mu=mu_m+(mu_s-mu_m)e^{-ay}"},
      {"stickslip_poly", {"v0", "v_m", "mu_m", "mu_s"},
       "stick-slip with cubic friction mu=mu_s-3(mu_s-mu_m)y/(2v_m)+(mu_s-mu_m)y^3/(2v_m^3)"},
      {"vdp", {}, "van der Pol in general form, N=(1,0), f=y+x-x^3/3, G=(0,-x)"},
      {"transition", {"delta", "v0", "mu_s", "a1", "a3"},
       "two/four-stroke transition model, N=(delta(v0-y), x-mu_s+a1 y-a3 y^3), f=y, G=(0,1)"},
  };
  return cat;
}

Params default_params(const std::string& name) {
  if (name == "minimal" || name == "vdp") return {};
  if (name == "ebers_moll") return {{"mu", 1.0}, {"kappa", 1e-2}, {"a", 4.0}, {"b", 6.0}};
  if (name == "stickslip_exp") return {{"v0", 0.5}, {"mu_m", 1.0}, {"mu_s", 2.0}, {"a", 3.0}};
  if (name == "stickslip_poly") return {{"v0", 0.25}, {"v_m", 1.0}, {"mu_m", 0.5}, {"mu_s", 1.0}};
  if (name == "transition")
    return {{"delta", 5.0}, {"v0", 2.0}, {"mu_s", 9.0}, {"a1", 4.0}, {"a3", 0.1}};
  throw PreconditionError("unknown model '" + name + "'");
}

namespace {

const ModelInfo& info_for(const std::string& name) {
  for (const auto& m : model_catalog())
    if (m.name == name) return m;
  throw PreconditionError("unknown model '" + name + "'");
}

ScalarField f_equals_y() {
  return {[](const Vec2& z) { return z.y; }, [](const Vec2&) { return Vec2{0.0, 1.0}; }};
}

PlaneField g_unit_y() {
  return {[](const Vec2&, double) { return Vec2{0.0, 1.0}; },
          [](const Vec2&, double) { return Mat2{}; }};
}

// Table 1 shape: N = (s (v0 - y), x - mu(y)), f = y, G = (0, 1).
ModelSpec two_stroke(const std::string& name, const Params& p, double v0, double scale,
                     std::function<double(double)> mu, std::function<double(double)> dmu) {
  ModelSpec m;
  m.name = name;
  m.params = p;
  m.n_field.value = [=](const Vec2& z, double) { return Vec2{scale * (v0 - z.y), z.x - mu(z.y)}; };
  m.n_field.jacobian = [=](const Vec2& z, double) { return Mat2{0.0, -scale, 1.0, -dmu(z.y)}; };
  m.f_field = f_equals_y();
  m.g_field = g_unit_y();
  m.time_factor = f_equals_y();
  return m;
}

double get(const Params& p, const std::string& model, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw PreconditionError("model '" + model + "' requires parameter '" + key + "'");
  if (!std::isfinite(it->second))
    throw PreconditionError("model '" + model + "': parameter '" + key + "' is not finite");
  return it->second;
}

void require_positive(double v, const std::string& model, const std::string& key) {
  if (!(v > 0.0))
    throw PreconditionError("model '" + model + "': parameter '" + key + "' must be positive");
}

}  // namespace

ModelSpec builtin_model(const std::string& name, const Params& params) {
  const ModelInfo& info = info_for(name);
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const auto& r : info.required) known = known || r == k;
    if (!known) throw PreconditionError("model '" + name + "' has no parameter '" + k + "'");
  }
  for (const auto& r : info.required) get(params, name, r);

  if (name == "minimal") {
    ModelSpec m = two_stroke(name, params, 1.0, 1.0, [](double y) { return 1.0 - y; },
                             [](double) { return -1.0; });
    m.window = {-13.0, 3.0, -0.5, 7.5};
    return m;
  }
  if (name == "ebers_moll") {
    const double mu = get(params, name, "mu"), kappa = get(params, name, "kappa");
    const double a = get(params, name, "a"), b = get(params, name, "b");
    const auto [xs, ys] = em_turning_point(mu, kappa, a, b);
    Params p = params;
    p["x_star"] = xs;
    p["y_star"] = ys;
    ModelSpec m = two_stroke(
        name, p, -ys, 1.0, [xs, a](double y) { return xs * std::exp(-a * y); },
        [xs, a](double y) { return -a * xs * std::exp(-a * y); });
    m.window = {-8.5, 9.0, -0.3, 8.5};
    return m;
  }
  if (name == "stickslip_exp") {
    const double v0 = get(params, name, "v0"), mm = get(params, name, "mu_m");
    const double ms = get(params, name, "mu_s"), a = get(params, name, "a");
    require_positive(v0, name, "v0");
    require_positive(a, name, "a");
    ModelSpec m = two_stroke(
        name, params, v0, 1.0, [=](double y) { return mm + (ms - mm) * std::exp(-a * y); },
        [=](double y) { return -a * (ms - mm) * std::exp(-a * y); });
    m.window = {mm - 1.6, ms + 0.5, -0.1, 2.0};
    return m;
  }
  if (name == "stickslip_poly") {
    const double v0 = get(params, name, "v0"), vm = get(params, name, "v_m");
    const double mm = get(params, name, "mu_m"), ms = get(params, name, "mu_s");
    require_positive(v0, name, "v0");
    require_positive(vm, name, "v_m");
    const double d = ms - mm;
    ModelSpec m = two_stroke(
        name, params, v0, 1.0,
        [=](double y) { return ms - 1.5 * d * y / vm + 0.5 * d * y * y * y / (vm * vm * vm); },
        [=](double y) { return -1.5 * d / vm + 1.5 * d * y * y / (vm * vm * vm); });
    m.window = {-0.3, 1.2, -0.05, 1.0};
    return m;
  }
  if (name == "transition") {
    const double delta = get(params, name, "delta"), v0 = get(params, name, "v0");
    const double ms = get(params, name, "mu_s"), a1 = get(params, name, "a1");
    const double a3 = get(params, name, "a3");
    require_positive(delta, name, "delta");
    require_positive(v0, name, "v0");
    ModelSpec m = two_stroke(
        name, params, v0, delta, [=](double y) { return ms - a1 * y + a3 * y * y * y; },
        [=](double y) { return -a1 + 3.0 * a3 * y * y; });
    m.window = {ms - 16.0, ms + 4.0, -0.5, 2.0 * v0 + 2.0};
    return m;
  }
  if (name == "vdp") {
    ModelSpec m;
    m.name = name;
    m.params = params;
    m.n_field = {[](const Vec2&, double) { return Vec2{1.0, 0.0}; },
                 [](const Vec2&, double) { return Mat2{}; }};
    m.f_field = {[](const Vec2& z) { return z.y + z.x - z.x * z.x * z.x / 3.0; },
                 [](const Vec2& z) { return Vec2{1.0 - z.x * z.x, 1.0}; }};
    m.g_field = {[](const Vec2& z, double) { return Vec2{0.0, -z.x}; },
                 [](const Vec2&, double) { return Mat2{0.0, 0.0, -1.0, 0.0}; }};
    m.window = {-3.0, 3.0, -2.0, 2.0};
    return m;
  }
  throw PreconditionError("unknown model '" + name + "'");
}

ModelSpec builtin_model_with_defaults(const std::string& name, const Params& overrides) {
  Params p = default_params(name);
  for (const auto& [k, v] : overrides) p[k] = v;
  return builtin_model(name, p);
}

std::optional<std::function<double(double)>> characteristic(const ModelSpec& m) {
  const auto& p = m.params;
  auto val = [&](const char* k) { return p.at(k); };
  if (m.name == "minimal") return [](double y) { return 1.0 - y; };
  if (m.name == "ebers_moll") {
    const double xs = val("x_star"), a = val("a");
    return [=](double y) { return xs * std::exp(-a * y); };
  }
  if (m.name == "stickslip_exp") {
    const double mm = val("mu_m"), ms = val("mu_s"), a = val("a");
    return [=](double y) { return mm + (ms - mm) * std::exp(-a * y); };
  }
  if (m.name == "stickslip_poly") {
    const double vm = val("v_m"), mm = val("mu_m"), ms = val("mu_s"), d = ms - mm;
    return [=](double y) { return ms - 1.5 * d * y / vm + 0.5 * d * y * y * y / (vm * vm * vm); };
  }
  if (m.name == "transition") {
    const double ms = val("mu_s"), a1 = val("a1"), a3 = val("a3");
    return [=](double y) { return ms - a1 * y + a3 * y * y * y; };
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

PhysicalTime physical_time(const ModelSpec& model, const Trajectory& traj) {
  if (!model.time_factor) throw PreconditionError("physical_time: model has no time factor");
  if (traj.size() < 2) return {};
  const ScalarField& tf = *model.time_factor;
  // 5-point Gauss-Legendre on every step of the dense output
  static constexpr double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
  static constexpr double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
  PhysicalTime out;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double a = traj.times[i], b = traj.times[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double v = tf(traj.at(mid + half * xg[k]));
      pos = pos || v > 0.0;
      neg = neg || v < 0.0;
      acc += wg[k] * v;
    }
    out.value += half * acc;
  }
  out.orientation_reversed = pos && neg;
  return out;
}

}  // namespace gspt
