#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gspt/geometry.hpp"
#include "gspt/ode.hpp"

namespace gspt {

using Params = std::map<std::string, double>;

/// Central-difference gradient, step (machine eps)^{1/3} * max(1, |z_i|).
Vec2 gradient_fd(const std::function<double(const Vec2&)>& f, const Vec2& z);
/// Central-difference Jacobian; column j is the derivative with respect to coordinate j.
Mat2 jacobian_fd(const std::function<Vec2(const Vec2&)>& F, const Vec2& z);

/// Scalar map with optional analytic gradient.
struct ScalarField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;  // empty: finite differences

  double operator()(const Vec2& z) const { return value(z); }
  Vec2 grad(const Vec2& z) const { return gradient ? gradient(z) : gradient_fd(value, z); }
  bool analytic() const { return static_cast<bool>(gradient); }
};

/// Planar vector field; the eps slot lets G depend on the perturbation parameter.
struct PlaneField {
  std::function<Vec2(const Vec2&, double)> value;
  std::function<Mat2(const Vec2&, double)> jacobian;  // empty: finite differences

  Vec2 operator()(const Vec2& z, double eps = 0.0) const { return value(z, eps); }
  Mat2 jac(const Vec2& z, double eps = 0.0) const;
  bool analytic() const { return static_cast<bool>(jacobian); }
};

/// z' = N(z) f(z) + eps G(z; eps). Immutable once built; eps is supplied at call sites.
struct ModelSpec {
  std::string name;
  PlaneField n_field;
  ScalarField f_field;
  PlaneField g_field;
  Params params;
  std::optional<ScalarField> time_factor;  // dt = factor * dt_bar
  Window window{-1.0, 1.0, -1.0, 1.0};     // default plotting window
  bool reversed = false;                   // built by reverse_time()

  double param(const std::string& key) const;

  Vec2 N(const Vec2& z) const { return n_field(z); }
  double f(const Vec2& z) const { return f_field(z); }
  Vec2 grad_f(const Vec2& z) const { return f_field.grad(z); }
  Vec2 G(const Vec2& z, double eps) const { return g_field(z, eps); }
  /// <grad f, N>, the nontrivial layer eigenvalue on S.
  double lambda(const Vec2& z) const { return dot(grad_f(z), N(z)); }

  /// Unchecked N f + eps G (hot path of the integrators).
  Vec2 rhs(const Vec2& z, double eps) const { return f(z) * N(z) + eps * G(z, eps); }
  /// Jacobian of N f + eps G.
  Mat2 jacobian(const Vec2& z, double eps) const;
  /// Trace of the Jacobian: f tr DN + <grad f, N> + eps tr DG.
  double divergence(const Vec2& z, double eps) const;
};

/// N(z) f(z) + eps G(z; eps), with a domain error naming the field that is non-finite.
Vec2 eval_rhs(const ModelSpec& model, const Vec2& z, double eps);

/// The autonomous field of the model at fixed eps, as a VectorField.
VectorField full_field(const ModelSpec& model, double eps);

/// Same orbits, opposite orientation: N -> -N, G -> -G.
ModelSpec reverse_time(const ModelSpec& model);

/// Closed-form turning point (x_*, y_*) of the Ebers-Moll characteristic.
std::pair<double, double> em_turning_point(double mu, double kappa, double a, double b);

struct ModelInfo {
  std::string name;
  std::vector<std::string> required;
  std::string description;
};

/// The zoo: minimal, ebers_moll, stickslip_exp, stickslip_poly, vdp, transition.
const std::vector<ModelInfo>& model_catalog();
/// Parameter values used for the zoo figures.
Params default_params(const std::string& name);
/// Builds a zoo model; every required parameter must be present.
ModelSpec builtin_model(const std::string& name, const Params& params);
/// builtin_model with `overrides` merged over default_params(name).
ModelSpec builtin_model_with_defaults(const std::string& name, const Params& overrides = {});

/// Friction-type characteristic mu(y) of the Table 1 models, when the model has one.
std::optional<std::function<double(double)>> characteristic(const ModelSpec& model);

struct PhysicalTime {
  double value = 0.0;
  bool orientation_reversed = false;  // time factor changed sign along the trajectory
};

/// Integral of the time factor along traj (desingularised time to original time).
PhysicalTime physical_time(const ModelSpec& model, const Trajectory& traj);

}  // namespace gspt
