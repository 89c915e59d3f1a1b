#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gspt/geometry.hpp"

namespace gspt {

/// Right-hand side z' = F(t, z).
using VectorField = std::function<Vec2(double t, const Vec2& z)>;

/// Continuous extension of one accepted Dormand-Prince step (Hairer's contd5).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  Vec2 r1, r2, r3, r4, r5;

  Vec2 eval(double t) const {
    const double s = (t - t0) / h, s1 = 1.0 - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

/// Sampled solution with a piecewise quartic interpolant between the samples.
/// Times are strictly increasing; `physical` marks trajectories in original time.
class Trajectory {
 public:
  std::vector<double> times;
  std::vector<Vec2> states;
  std::vector<DenseSegment> segments;  // segments[i] spans [times[i], times[i+1]]
  bool physical = false;

  bool empty() const { return times.empty(); }
  std::size_t size() const { return times.size(); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  double duration() const { return empty() ? 0.0 : t_end() - t_begin(); }
  const Vec2& front() const { return states.front(); }
  const Vec2& back() const { return states.back(); }

  /// Interpolated state; t is clamped to the covered interval.
  Vec2 at(double t) const;
  /// n states equally spaced in time (n >= 2).
  std::vector<Vec2> resample(std::size_t n) const;
  /// Drops everything after t (t inside the covered interval).
  void truncate(double t);
};

/// Scalar event function g(t, z); a root of g is an event.
struct Event {
  std::function<double(double, const Vec2&)> g;
  /// +1: only increasing crossings, -1: only decreasing, 0: both.
  int direction = 0;
  bool terminal = true;
  /// Optional gate evaluated at the located root; a crossing is ignored when it returns false.
  std::function<bool(double, const Vec2&)> armed;
  std::string name;
};

struct EventHit {
  std::size_t index = 0;
  double t = 0.0;
  Vec2 z;
};

enum class StopReason { completed, event, max_steps, observer };

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 selects an initial step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
  bool store = true;  // keep samples and dense segments
  /// Called after every accepted step; returning false stops the integration.
  std::function<bool(double, const Vec2&)> observer;
};

struct OdeResult {
  Trajectory traj;
  StopReason reason = StopReason::completed;
  std::vector<EventHit> hits;  // every located crossing, terminal or not
  double t_final = 0.0;
  Vec2 z_final;
  long accepted = 0;
  long rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of z' = F(t,z) from t0 to t_end > t0.
/// Events are located by Brent iteration on the dense output.
/// Throws StepSizeError when the step size underflows, DomainError on non-finite states.
OdeResult solve(const VectorField& rhs, double t0, const Vec2& z0, double t_end,
                const OdeOptions& opts = {}, const std::vector<Event>& events = {});

/// Brent root of a scalar function on [a, b] with g(a), g(b) of opposite sign.
double brent_root(const std::function<double(double)>& g, double a, double b, double ga, double gb,
                  double xtol = 1e-14, int max_iter = 200);

}  // namespace gspt
