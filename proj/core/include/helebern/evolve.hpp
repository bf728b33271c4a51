#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helebern/capacity.hpp"
#include "helebern/contour.hpp"
#include "helebern/speed.hpp"

namespace helebern {

struct FlowConfig {
  GridSpec grid;
  SourceSpec source;
  LevelSetField initial;
  SpeedLaw law;
  double t_end = 1.0;
  int reinit_every = 5;
  /// Zero selects the default: 0.05 |c|, or 0.05 lambda median(|Du|^2) when c = 0.
  double steady_res_tol = 0.0;
  /// Zero selects h / 2.
  double steady_disp_tol = 0.0;
  int steady_window = 20;
  int diag_every = 50;
  SolverParams solver;
  double cfl_safety = 0.5;
  double dt_cap = 1e-3;
  /// Keep the level set of every snapshot (needed for time alignment).
  bool keep_fields = true;

  void validate() const;
};

struct StepParams {
  SolverParams solver;
  double cfl_safety = 0.5;
  double dt_cap = 1e-3;
  /// Overrides the CFL step when set.
  std::optional<double> fixed_dt;
};

struct StepDiagnostics {
  double dt = 0.0;
  double max_speed = 0.0;
  bool stencil_blocked = false;
  long solver_iterations = 0;
};

struct StepResult {
  LevelSetField phi;
  StepDiagnostics diag;
  /// Capacity solution on the input level set (absent when lambda = 0).
  std::optional<CapacitySolution> solution;
};

/// One forward-Euler update of the band under V = c + lambda |Du|^2 (Godunov
/// upwinding) plus the central mean-curvature term. `warm` seeds the
/// capacity solve; `max_dt` bounds the CFL step (e.g. to land on t_end).
StepResult step(const LevelSetField& phi, const SpeedLaw& law, const SourceSpec& source, const StepParams& params,
                const ScalarField* warm = nullptr, double max_dt = std::numeric_limits<double>::infinity());

struct ResidualStats {
  double res_min = 0.0;
  double res_max = 0.0;
  double hbar_median = 0.0;
  std::size_t points = 0;
};

/// h_lambda at every contour vertex of phi.
ResidualStats boundary_residual_stats(const LevelSetField& phi, const SpeedLaw& law, const SourceSpec& source,
                                      const SolverParams& solver);
/// Same, reusing an existing solution and contour.
ResidualStats boundary_residual_stats(const LevelSetField& phi, const SpeedLaw& law,
                                      const CapacitySolution* sol, const ContourPolyline& contour);

struct FlowDiagnostics {
  double vol = 0.0;
  double cap = 0.0;
  double j_lambda = 0.0;
  double res_min = 0.0;
  double res_max = 0.0;
  double dt = 0.0;
  std::size_t npts = 0;
  double eq_radius = 0.0;
  /// Distance between the moving boundary and S.
  double clearance = 0.0;
};

struct FlowSnapshot {
  double t = 0.0;
  long step = 0;
  std::shared_ptr<const LevelSetField> phi;
  FlowDiagnostics diag;
};

enum class FlowStatus { ReachedTEnd, SteadyState, SourceCollision, DomainOverflow, SolverFailure };

std::string_view to_string(FlowStatus s) noexcept;

struct FlowOutcome {
  FlowStatus status = FlowStatus::ReachedTEnd;
  FlowSnapshot final;
  std::vector<FlowSnapshot> trajectory;
  std::string message;
  long steps = 0;
};

/// Time-steps the flow until t_end, a steady state, or a guard fires.
FlowOutcome run(const FlowConfig& config);

}  // namespace helebern
