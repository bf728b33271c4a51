#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "helebern/evolve.hpp"

namespace helebern {

struct ShapeSpec {
  enum class Kind { Ball, Ellipse };
  Kind kind = Kind::Ball;
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;
  /// Semi-axes, used when kind is Ellipse.
  Point axes{1.0, 1.0, 1.0};

  bool operator==(const ShapeSpec&) const = default;
};

/// Flat run configuration. Every field maps to one config key.
struct RunConfig {
  int dim = 2;
  double grid_min = -4.0;
  double grid_max = 4.0;
  int grid_n = 256;
  ShapeSpec source;
  double g0 = 1.0;
  ShapeSpec init;
  std::string law_f = "constant";
  double law_c = -1.0;
  double law_a = 1.0;
  /// One value for run/compare, several for sweep and oracle.
  std::vector<double> lambda;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  double dt_cap = 1e-3;
  int reinit_every = 5;
  int diag_every = 50;
  double steady_res_tol = 0.0;
  double steady_disp_tol = 0.0;
  double solver_tol = 1e-8;
  long solver_max_iter = 200000;
  std::string out_dir = "out";
  bool out_contours = true;
  bool out_fields = true;

  bool operator==(const RunConfig&) const = default;

  GridSpec grid() const;
  SpeedLaw law(double lambda_value) const;
  /// Flow setup for one lambda value.
  FlowConfig flow(double lambda_value) const;
  /// Flow setup for the single configured lambda; throws BadValue for a list.
  FlowConfig flow() const;
};

/// Parses `key = value` lines; `#` starts a comment. Errors carry the line
/// number and use UnknownKey, MissingKey or BadValue.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Text that parses back to an equal RunConfig.
std::string serialize(const RunConfig& cfg);

/// Keys accepted by parse_config.
const std::vector<std::string>& config_keys();

LevelSetField make_shape(const ShapeSpec& shape, const GridSpec& grid);

}  // namespace helebern
