#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gspt/cycle.hpp"
#include "gspt/model.hpp"
#include "gspt/simulate.hpp"

namespace gspt {

/// Exit-section data near a regular jump-off point F.
struct SectionOffsets {
  double y_s = 0.0;  // slow-manifold exit on Sigma_out
  double y_l = 0.0;  // critical fiber (layer orbit of F) on Sigma_out
  double rho = 0.0;
  double x_out = 0.0;  // Sigma_out = {x = x_out}
  Vec2 F;
  double offset() const { return y_s - y_l; }
};

/// Zoo default for the Sigma_out distance (0.1 for user models).
double default_rho(const ModelSpec& model);

/// y_s and y_l on Sigma_out = {x = x_F +- rho}. The slow seed sits on S^a at horizontal
/// distance seed_distance from F, lifted by eps off S.
SectionOffsets section_offsets(const ModelSpec& model, double eps, std::optional<double> rho = std::nullopt,
                               double seed_distance = 0.5);

/// Least-squares fit log y = slope * log x + c with a 95% t half-width on the slope.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
  int n = 0;
  bool valid() const { return n >= 3; }
};
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// n log-spaced values 10^lo ... 10^hi.
std::vector<double> log_ladder(double lo_exp, double hi_exp, int n);

/// Largest distance from the slow samples of the cycle to S^a, over the central half of Gamma^R.
double slow_segment_distance(const LimitCycle& cycle, const SingularCycle& gamma);

struct ScalingOptions {
  std::optional<double> rho;
  bool cycles = true;  // also run find_limit_cycle per eps
  double tol = 1e-10;
};

struct ScalingReport {
  std::vector<double> eps_values;
  std::vector<double> offsets;    // |y_s - y_l|
  std::vector<double> floquet;    // per unit slow time
  std::vector<double> hausdorff;  // Gamma_eps vs Gamma
  std::vector<double> slow_dist;
  std::vector<std::string> notes;  // per eps, empty when every measurement succeeded
  double rho = 0.0;
  LogLogFit offset_fit;   // expect 2/3
  LogLogFit floquet_fit;  // -floquet vs 1/eps, expect 1
  LogLogFit slow_fit;     // expect 1
  bool hausdorff_decreasing = false;  // strictly decreasing as eps decreases
  double floquet_eps_spread = 0.0;    // max |(-floquet eps)/median - 1|
};

ScalingReport epsilon_scaling_report(const ModelSpec& model, std::vector<double> eps_values,
                                     const ScalingOptions& opts = {});

enum class Regime { steady_sliding, pure_slip, stick_slip, unresolved };
const char* to_string(Regime r);

struct RegimeMap {
  // v0 sweep
  std::vector<double> v0_values;
  std::vector<Regime> labels;
  std::vector<double> dwell;   // fraction of the physical period with y < 5 eps
  std::vector<double> trace;   // equilibrium trace
  double v_m_analytic = 0.0;
  double v_m_detected = 0.0;
  std::optional<std::pair<double, double>> v_ss;  // [last stick_slip, first pure_slip]
  // (eps, delta) grid, row-major over eps
  std::vector<double> eps_values, delta_values;
  std::vector<int> strokes;  // -1 no separation, -2 no convergence
  std::vector<std::string> notes;
};

struct RegimeOptions {
  double eps = 1e-3;
  double delta = 1.0;
  bool refine = true;       // bisect v_m and v_ss
  double v_ss_width = 2e-3;  // bracket width when refining
};

/// Steady-sliding / pure-slip / stick-slip labels along v0 for the transition model.
/// base holds mu_s, a1, a3 (delta and v0 are set per cell).
RegimeMap stickslip_regime_sweep(const Params& base, const std::vector<double>& v0_values,
                                 const RegimeOptions& opts = {});

/// Label of a single v0 (used by the sweep and its bisection).
Regime classify_regime(const ModelSpec& transition_model, double eps, double* dwell = nullptr,
                       double* trace = nullptr);

/// Stroke count per (eps, delta) cell of the transition model.
RegimeMap stroke_phase_diagram(const std::vector<double>& eps_values, const std::vector<double>& delta_values,
                               const Params& base);

}  // namespace gspt
