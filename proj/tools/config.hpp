#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gspt/geometry.hpp"
#include "gspt/model.hpp"

namespace gspt::cli {

/// Schema violation; `where` is a JSON pointer (or "line L, column C" for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error("config error at " + where + ": " + what), where(where) {}
  std::string where;
};

struct ModelConfig {
  std::string name;
  Params params;  // only the user-given ones; defaults are merged at build time
};

struct SectionConfig {
  Vec2 base, direction{1.0, 0.0};
  double half_width = 1.0;
  int orientation = 1;
};

struct RunConfig {
  std::optional<ModelConfig> model;
  std::vector<double> eps;  // scalar -> one entry
  std::optional<Window> window;
  double tolerance = 1e-10;
  int resolution = 256;
  std::string output = "out";
  std::optional<SectionConfig> section;

  // simulate
  std::optional<Vec2> z0;
  double t_end = 100.0;
  std::string seed = "automatic";
  // scale
  std::optional<double> rho;
  bool cycles = true;
  // regimes
  std::vector<double> v0_values;
  double regime_delta = 1.0;
  Params regime_params;
  bool refine = true;
  // strokes
  std::vector<double> stroke_eps, stroke_delta;
  Params stroke_params;
  // riccati
  std::optional<double> a0, b1, d0;
  bool riccati_from_model = false;
  std::optional<double> x_min, x_max;
  int riccati_count = 401;
};

/// Parses and validates; unknown keys anywhere are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace gspt::cli
