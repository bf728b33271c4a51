#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "helebern/grid.hpp"

namespace helebern {

/// Gradients with magnitude below this (in grid units, i.e. per unit of h
/// change over one spacing) are treated as degenerate.
inline constexpr double kGradientFloor = 1e-6;

/// Signed-distance sample of a set: negative inside, positive outside.
struct LevelSetField {
  ScalarField phi;
  double band_width = 0.0;

  const GridSpec& grid() const noexcept { return phi.grid; }
  double operator[](std::size_t i) const noexcept { return phi[i]; }
  double& operator[](std::size_t i) noexcept { return phi[i]; }

  /// Default band: eight grid spacings.
  static double default_band(const GridSpec& g) noexcept { return 8.0 * g.h; }

  bool has_interface() const noexcept;
};

struct NormalSample {
  Point normal{0.0, 0.0, 0.0};
  double grad_norm = 0.0;
  bool degenerate = false;
};

struct CurvatureSample {
  double trace = 0.0;
  bool degenerate = false;
};

/// Distance to a sphere, |x - center| - radius at every node.
LevelSetField sdf_ball(const Point& center, double radius, const GridSpec& grid);

/// Reinitialized level set from samples of an implicit function f (f < 0 inside).
LevelSetField sdf_from_implicit(const std::function<double(const Point&)>& f, const GridSpec& grid,
                                double band);
LevelSetField sdf_from_samples(ScalarField raw, double band);

/// Restores the signed-distance property with a fast-sweeping eikonal solve.
///
/// Nodes adjacent to the interface are fixed first using phi / |D phi|,
/// which keeps the zero level set in place to sub-cell accuracy. The
/// remaining nodes are filled with a first-order Godunov upwind solve of
/// |D d| = 1 swept in all 2^dim orderings until the update stalls.
LevelSetField reinitialize(const LevelSetField& phi);

/// Central-difference gradient at a node (one-sided on the box faces).
Point gradient(const ScalarField& f, std::size_t node) noexcept;

/// Multilinear interpolation of the node gradient at an arbitrary point.
Point gradient_at(const ScalarField& f, const Point& p) noexcept;

NormalSample normal_and_gradnorm(const LevelSetField& phi, std::size_t node) noexcept;

/// Trace of the curvature matrix, -div(D phi / |D phi|): -(N-1)/R on a sphere.
CurvatureSample curvature_trace(const LevelSetField& phi, std::size_t node) noexcept;

/// Sum of principal curvatures at a node as a raw array over all nodes (band
/// nodes only; zero elsewhere). Used by the flow stepper.
std::vector<double> curvature_trace_band(const LevelSetField& phi);

/// Closest interface point estimate x - phi(x) * nu(x). Throws
/// DegenerateGradient when |D phi| is below the floor.
Point foot_point(const LevelSetField& phi, std::size_t node);

/// max over nodes of (phi2 - phi1); nonpositive means {phi1 < 0} is contained in {phi2 < 0}.
double inclusion_defect(const LevelSetField& phi1, const LevelSetField& phi2);

/// Smoothed Heaviside of width eps: 0 below -eps, 1 above eps.
double smoothed_heaviside(double s, double eps) noexcept;

}  // namespace helebern
