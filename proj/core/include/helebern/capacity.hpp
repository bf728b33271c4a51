#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "helebern/contour.hpp"
#include "helebern/geometry.hpp"

namespace helebern {

/// Fixed source S with a constant Dirichlet datum g0 on its boundary.
struct SourceSpec {
  LevelSetField phi_s;
  double g0 = 1.0;

  void validate() const;
};

enum class NodeClass : std::uint8_t { Fluid, Source, Exterior };

/// Per-axis cut towards a neighbor that is not a fluid node.
struct BoundaryCut {
  bool crossing = false;  ///< false: the neighbor is a fluid node
  double theta = 1.0;     ///< fraction of h to the boundary, in [theta_min, 1]
  double value = 0.0;     ///< Dirichlet value at the crossing
};

/// Node classification for the annular region between S and the moving boundary.
struct DomainMask {
  static constexpr double kThetaMin = 1e-3;

  GridSpec grid;
  std::vector<NodeClass> cls;
  /// Cuts indexed [node * 2 * dim + 2 * axis + (dir > 0)], filled for fluid nodes.
  std::vector<BoundaryCut> cuts;
  /// Fluid nodes whose nearest cut fell below kThetaMin; they carry the
  /// boundary value directly.
  std::vector<std::optional<double>> pinned;
  std::size_t fluid_count = 0;
  bool thin_gap = false;

  bool is_fluid(std::size_t i) const noexcept { return cls[i] == NodeClass::Fluid; }
  const BoundaryCut& cut(std::size_t node, int axis, int dir) const noexcept {
    return cuts[node * 2 * grid.dim + 2 * axis + (dir > 0)];
  }
};

struct SolverParams {
  double tol = 1e-8;            ///< relative to g0
  long max_iter = 200000;       ///< relaxation sweeps
  int check_every = 50;         ///< sweeps between residual checks
};

struct CapacitySolution {
  ScalarField u;
  double residual = 0.0;
  long iterations = 0;
  DomainMask mask;
  double g0 = 1.0;
  /// Copies kept for boundary sampling.
  LevelSetField phi_omega;
  LevelSetField phi_s;
};

struct HbarSample {
  double value = 0.0;
  bool stencil_blocked = false;
};

/// Builds the fluid / source / exterior classification and boundary cuts.
/// Throws SourceNotEnclosed when S does not sit inside Omega with 2h clearance.
DomainMask classify(const LevelSetField& phi_omega, const SourceSpec& source);

/// Solves -Laplace u = 0 in Omega \ S, u = g0 on dS, u = 0 on dOmega with the
/// Shortley-Weller stencil and red-black over-relaxation.
///
/// `warm_start`, when given on the same grid, seeds the iteration.
CapacitySolution solve_capacity(const LevelSetField& phi_omega, const SourceSpec& source, const SolverParams& params,
                                const ScalarField* warm_start = nullptr);

/// |Du|^2 at a boundary point from a one-sided normal stencil.
HbarSample boundary_hbar(const CapacitySolution& sol, const Point& x_b);

/// Integral of |Du|^2 over Omega \ S.
double capacity_integral(const CapacitySolution& sol);

/// Measure of Omega \ S with a smoothed Heaviside of width 1.5 h.
double volume(const LevelSetField& phi_omega, const SourceSpec& source);

/// Shape derivative of the capacity along a deformation with normal
/// component `normal_push(x)`: -integral over dOmega of |Du|^2 <theta, nu>.
double hadamard_capacity_derivative(const CapacitySolution& sol, const ContourPolyline& contour,
                                    const std::function<double(const Point&)>& normal_push);
double hadamard_capacity_derivative(const CapacitySolution& sol, const ContourPolyline& contour);

}  // namespace helebern
