#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gspt/cycle.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"
#include "gspt/polyline.hpp"

namespace gspt {

/// Segment {base + s*direction : |s| <= half_width}; crossings count only when
/// <field, normal> has the sign `orientation` (normal = perp(direction)).
struct PoincareSection {
  Vec2 base;
  Vec2 direction{1.0, 0.0};
  double half_width = 1.0;
  int orientation = 1;

  Vec2 normal() const { return perp(direction); }
  Vec2 point(double s) const { return base + s * direction; }
  double coord(const Vec2& z) const { return dot(z - base, direction); }
  double side(const Vec2& z) const { return dot(z - base, normal()); }
};

/// Adaptive integration of the full system at fixed eps, tol in [1e-13, 1e-5].
Trajectory integrate(const ModelSpec& model, const Vec2& z0, double eps, double t0, double t1,
                     double tol = 1e-10);

struct ReturnOptions {
  double tol = 1e-10;
  double max_time = 1e9;
  double max_arclength = std::numeric_limits<double>::infinity();
  bool keep_trajectory = false;
  bool derivative = true;  // central-difference derivative (two extra returns)
};

struct PoincareResult {
  Vec2 z1;
  double s1 = 0.0;
  double time = 0.0;
  /// Derivative of s -> s1: central difference, or exp(log_derivative) once that is below e^-10
  /// (the difference quotient is then integration noise). May underflow to 0.
  double derivative = 0.0;
  /// log of the derivative from the divergence integral (finite even when derivative underflows).
  double log_derivative = 0.0;
  Trajectory traj;
};

/// First return of the flow from z0 (on the section) to the section.
PoincareResult poincare_return(const ModelSpec& model, double eps, const PoincareSection& section,
                               const Vec2& z0, const ReturnOptions& opts = {});

enum class SeedStrategy { automatic, singular_cycle, equilibrium };

struct CycleOptions {
  SeedStrategy seed = SeedStrategy::automatic;
  std::optional<PoincareSection> section;  // overrides automatic placement
  std::optional<Vec2> seed_point;          // on the given section
  double tol = 1e-10;
  int max_iter = 100;
  double fixed_point_tol = 1e-10;
  double max_time = 1e9;
  std::optional<Window> window;  // search window for equilibria / curve tracing
};

struct LimitCycle {
  double eps = 0.0;
  Polyline samples;            // one period, refined with the dense output
  std::vector<double> sample_times;
  std::vector<double> speeds;  // |z'| at the samples
  double period_desing = 0.0;
  double period_physical = 0.0;
  bool physical_orientation_reversed = false;
  double log_multiplier = 0.0;    // integral of div over one period
  double floquet_exponent = 0.0;  // per unit slow time: log_multiplier / (eps * period_desing)
  double floquet_fast = 0.0;      // log_multiplier / period_desing
  double return_derivative = 0.0;
  double log_return_derivative = 0.0;
  double return_residual = 0.0;
  Window amplitude;
  int strokes = -1;  // -1 when the speed profile has no timescale separation
  bool attracting = false;
  bool repelling_construction = false;  // found in reversed time (jump-on model)
  PoincareSection section;
  Vec2 fixed_point;
  int iterations = 0;
  std::string seed;  // "singular_cycle" or "equilibrium"
  Trajectory orbit;
};

/// Fixed point of the return map; fills period, Floquet data and strokes.
LimitCycle find_limit_cycle(const ModelSpec& model, double eps, const CycleOptions& opts = {});

/// log(return_derivative) / period_desing.
double floquet_exponent(const LimitCycle& cycle, double return_derivative);

/// Number of alternating slow/fast blocks along the cycle (threshold: geometric mean speed).
int stroke_count(const LimitCycle& cycle);

struct Equilibrium {
  Vec2 z;
  double trace = 0.0, det = 0.0;
};
/// Zeros of N f + eps G in the window (Newton from a seed grid).
std::vector<Equilibrium> find_equilibria(const ModelSpec& model, double eps, const Window& window);

struct UniquenessProbe {
  std::vector<double> distances;  // Hausdorff distance of each seed's cycle to the first
  double max_distance = 0.0;
};
/// Limit cycles from n seeds displaced by +-radius off the singular cycle.
UniquenessProbe uniqueness_probe(const ModelSpec& model, double eps, int n_seeds, double radius,
                                 const CycleOptions& opts = {});

}  // namespace gspt
