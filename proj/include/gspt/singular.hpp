#pragma once

#include <string>
#include <vector>

#include "gspt/geometry.hpp"
#include "gspt/model.hpp"

namespace gspt {

struct CurveSample {
  Vec2 z;
  double lambda = 0.0;
};

enum class Stability { attracting, repelling };

/// Maximal piece of S on which lambda keeps one sign.
struct Branch {
  std::vector<CurveSample> samples;
  Stability stability = Stability::attracting;
  std::size_t arc = 0;  // index into CriticalCurve::arcs
};

/// Connected component of S inside the window, before splitting at contact points.
struct Arc {
  std::vector<CurveSample> samples;
  bool closed = false;
};

struct CriticalCurve {
  std::vector<Arc> arcs;
  std::vector<Branch> branches;
  std::vector<std::string> violations;  // roots where grad f nearly vanishes
  bool empty() const { return arcs.empty(); }
};

enum class JumpClass { jump_off, jump_on, none };

struct ContactPoint {
  Vec2 location;
  int order = 1;
  bool regular = false;
  JumpClass jump_class = JumpClass::none;
};

enum class SingularityKind {
  unstable_focus,
  unstable_node,
  stable_focus,
  stable_node,
  saddle,
  center_degenerate
};

struct NSingularity {
  Vec2 location;
  double trace = 0.0;  // of the layer Jacobian DN(p) f(p)
  double det = 0.0;
  SingularityKind kind = SingularityKind::center_degenerate;
};

const char* to_string(Stability s);
const char* to_string(JumpClass j);
const char* to_string(SingularityKind k);

/// Tolerances shared by the singular-limit routines.
inline constexpr double kOnManifoldTol = 1e-8;
inline constexpr double kRootTol = 1e-10;
inline constexpr double kLambdaZeroTol = 1e-9;
inline constexpr double kDerivativeTol = 1e-5;

/// <grad f, N> at a point of S.
double nontrivial_eigenvalue(const ModelSpec& model, const Vec2& z);

/// Newton projection onto S along grad f.
Vec2 project_to_manifold(const ModelSpec& model, const Vec2& z, double tol = kRootTol);

/// Zero set of f in the window: marching squares, Brent refinement, arcs split at lambda sign changes.
CriticalCurve trace_critical_curve(const ModelSpec& model, const Window& window, int resolution);

/// Zeros of N, classified by the layer Jacobian DN f. `diagnostic` explains an empty result.
std::vector<NSingularity> find_N_singularities(const ModelSpec& model, const Window& window,
                                               std::string* diagnostic = nullptr);

/// Order of tangency of the layer flow with S at F (1..3).
int contact_order(const ModelSpec& model, const Vec2& F);

struct ContactClass {
  bool regular = false;
  JumpClass jump_class = JumpClass::none;
};
ContactClass classify_contact(const ModelSpec& model, const Vec2& F, int order);

/// Points of the curve where lambda vanishes, each with order and class.
std::vector<ContactPoint> find_contact_points(const ModelSpec& model, const CriticalCurve& curve);

/// I - N Df / <grad f, N>.
Mat2 projection(const ModelSpec& model, const Vec2& z);

/// det(N|G)/lambda * (-f_y, f_x), checked against Pi G.
Vec2 reduced_rhs(const ModelSpec& model, const Vec2& z);

/// det(N|G) * (f_y, -f_x); regular through contact points.
Vec2 desingularised_rhs(const ModelSpec& model, const Vec2& z);

/// Coordinates (s, u) with u = f and s the graph coordinate of S (x, or y when swapped).
class Rectified {
 public:
  Rectified(const ModelSpec& model, const Vec2& z0);

  bool swapped() const { return swapped_; }
  /// Point (x, y) with graph coordinate s and f = u (1-D Newton from the last solution).
  Vec2 to_plane(double s, double u) const;
  Vec2 from_plane(const Vec2& z) const;
  /// (N_s, <grad f, N>) at the plane point of (s, u).
  Vec2 n_tilde(double s, double u) const;
  /// (G_s, <grad f, G>).
  Vec2 g_tilde(double s, double u, double eps) const;
  /// (s', u') of the full system.
  Vec2 rhs(double s, double u, double eps) const;

 private:
  const ModelSpec* model_;
  bool swapped_ = false;
  mutable double last_ = 0.0;  // last solved free coordinate
};

struct ExpansionCoeffs {
  double a0 = 0.0, b1 = 0.0, d0 = 0.0, c0 = 0.0;
};

/// Leading normal-form coefficients at a regular order-1 contact point.
ExpansionCoeffs expansion_coeffs(const ModelSpec& model, const Vec2& F);

}  // namespace gspt
