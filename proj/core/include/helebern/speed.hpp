#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "helebern/capacity.hpp"
#include "helebern/geometry.hpp"

namespace helebern {

/// F = c.
struct ConstantSpeed {
  double c = -1.0;
};
/// F = a * Tr(H) / (N - 1): the mean curvature scaled by a >= 0.
struct MeanCurvatureSpeed {
  double a = 1.0;
};
/// F = a * Tr(H) / (N - 1) + c.
struct AffineSpeed {
  double a = 0.0;
  double c = 0.0;
};

using CurvaturePart = std::variant<ConstantSpeed, MeanCurvatureSpeed, AffineSpeed>;

/// Normal velocity law h_lambda = F(nu, H) + lambda * |Du|^2.
///
/// Positive values expand the set. F is nondecreasing in the curvature
/// matrix for every variant (a >= 0), which is what makes the flow elliptic.
struct SpeedLaw {
  CurvaturePart curvature_part = ConstantSpeed{};
  double lambda = 0.0;

  void validate() const;

  /// Coefficient of Tr(H) / (N - 1), zero for ConstantSpeed.
  double curvature_coeff() const noexcept;
  /// Curvature-independent part of F.
  double constant_part() const noexcept;
};

/// Band-limited velocity split into an upwinded part and a parabolic coefficient.
struct SpeedField {
  ScalarField advective;
  double parabolic_coeff = 0.0;
  double valid_band = 0.0;
  bool stencil_blocked = false;
};

/// F(nu, H) for a given trace of the curvature matrix. The normal is accepted
/// for completeness; none of the built-in laws depend on it.
double eval_F(const SpeedLaw& law, double trace_H, int dim = 2);

/// |Du|^2 carried from the foot point of every band node, averaged from the
/// samples at nearby contour vertices. Nodes outside the band hold zero.
ScalarField extend_hbar(const LevelSetField& phi, const CapacitySolution& sol, bool* any_blocked = nullptr);

/// c + lambda * extended |Du|^2 on the band; the extension is skipped when lambda = 0.
SpeedField assemble_speed(const LevelSetField& phi, const SpeedLaw& law, const CapacitySolution* sol);

/// Explicit stability bound safety * min(h / (N max|adv|), h^2 / (4 N a)).
/// Returns dt_cap when neither term limits the step (zero speed, no curvature).
double cfl_dt(const SpeedField& field, double h, double safety, double dt_cap);

}  // namespace helebern
