#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/ode.hpp"
#include "gspt/polyline.hpp"
#include "gspt/singular.hpp"

namespace gspt {

struct LayerOptions {
  /// Integrate sigma N (same orbits as N f off S, nonzero on S) instead of N f.
  bool desingularised = true;
  /// Sign sigma for the desingularised mode; 0 takes sign f(z0).
  int side = 0;
  bool stop_on_manifold = true;
  /// Crossings of S inside this ball are ignored.
  Vec2 exclude_center;
  double exclude_radius = 0.0;
  std::optional<Window> window;  // stop when leaving it
  double max_time = 1e3;
  double tol = 1e-12;
  double stall_radius = 1e-6;  // distance to V0 treated as stalling
};

enum class LayerStatus { reached_manifold, left_window, timeout, stalled };
const char* to_string(LayerStatus s);

struct LayerResult {
  Trajectory traj;
  LayerStatus status = LayerStatus::timeout;
  Vec2 end;
};

/// Layer problem z' = N f from z0 with manifold/window/time/stall stopping rules.
LayerResult layer_flow(const ModelSpec& model, const Vec2& z0, const LayerOptions& opts = {});

struct ReciprocalResult {
  Vec2 point;
  double lambda = 0.0;          // at the landing point
  bool attracting = false;      // landing branch
  Trajectory arc;               // layer orbit from F to the landing point
  bool reversed_time = false;   // built on the time-reversed model (jump-on F)
};

/// Reciprocal point of a regular order-1 contact point, with the layer arc.
ReciprocalResult reciprocal_search(const ModelSpec& model, const ContactPoint& F, double tol = 1e-12);
Vec2 reciprocal_point(const ModelSpec& model, const ContactPoint& F);

struct ReducedSegment {
  Polyline points;
  double desing_time = 0.0;   // time of the desingularised flow
  double reduced_time = 0.0;  // integral of -lambda along the arc
  bool reduced_time_finite = true;
};

/// Desingularised flow along S from `from` to the contact point `to`.
ReducedSegment reduced_segment(const ModelSpec& model, const Vec2& from, const ContactPoint& to);

struct AssumptionsReport {
  bool basic = true;  // S regularly embedded in the window
  bool a1 = false;    // exactly one regular order-1 jump point
  bool a2 = false;    // reciprocal point on the attracting branch + reduced return
  bool jump_on = false;
  std::vector<std::string> notes;
  std::string summary() const;
};

/// Raised when the hypotheses of the relaxation-cycle construction fail; carries the report.
class AssumptionFailure : public Error {
 public:
  AssumptionFailure(const std::string& what, AssumptionsReport r) : Error(what), report(std::move(r)) {}
  AssumptionsReport report;
};

struct SingularCycle {
  ContactPoint F;
  Vec2 L_F;
  Trajectory layer_arc;
  ReducedSegment reduced_arc;
  AssumptionsReport assumptions_report;
  bool repelling = false;                 // jump-on construction
  std::vector<NSingularity> singularities;

  /// Closed polyline Gamma: layer arc (dense) followed by the reduced arc.
  Polyline polyline(std::size_t layer_samples = 2000) const;
};

/// Full construction: contact points, reciprocal point, reduced return.
SingularCycle build_singular_cycle(const ModelSpec& model, std::optional<Window> window = std::nullopt,
                                   int resolution = 256);

}  // namespace gspt
