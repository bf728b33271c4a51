#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "helebern/geometry.hpp"

namespace helebern {

/// Discrete zero level set.
///
/// In 2D the vertices are ordered loop by loop and `segments` joins
/// consecutive vertices; `closed[k]` tells whether loop k wraps around. In
/// 3D only the edge-crossing points are produced (no surface connectivity),
/// each as its own loop with no segments.
struct ContourPolyline {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<std::array<std::size_t, 2>> segments;
  std::vector<int> loop_of_vertex;
  std::vector<bool> closed;

  std::size_t loop_count() const noexcept { return closed.size(); }
  bool empty() const noexcept { return vertices.empty(); }

  /// Signed area enclosed by the closed loops (2D; counter-clockwise positive
  /// after orientation fixing, so the result is the area of {phi < 0}).
  double enclosed_area() const;
  double length() const;
};

ContourPolyline extract_contour(const LevelSetField& phi);

/// Symmetric Hausdorff distance between two contours, measured from the
/// vertices of each to the segments (or vertices, without segments) of the other.
double hausdorff_distance(const ContourPolyline& a, const ContourPolyline& b);

/// Distance from a point to the nearest segment (or vertex) of a contour.
double distance_to_contour(const ContourPolyline& c, const Point& p);

/// sqrt(area / pi) in 2D; in 3D the radius of the ball with the same volume
/// as {phi < 0}.
double equivalent_radius(const LevelSetField& phi, const ContourPolyline& contour);

}  // namespace helebern
