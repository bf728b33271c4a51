#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace helebern {

/// Physical point; components beyond the grid dimension are zero.
using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform Cartesian node lattice in 2 or 3 dimensions.
///
/// Nodes are stored with x varying fastest, then y, then z. The physical box
/// spans [origin, origin + (nodes - 1) * h] on every axis.
struct GridSpec {
  int dim = 2;
  Point origin{0.0, 0.0, 0.0};
  double h = 0.0;
  Index3 nodes{1, 1, 1};

  static constexpr int kMinNodes = 16;

  /// Cube [lo, hi]^dim split into `cells` intervals per axis.
  static GridSpec box(int dim, double lo, double hi, int cells);

  /// Throws InvalidArgument if dim, spacing or node counts are invalid.
  void validate() const;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2];
  }
  std::ptrdiff_t stride(int axis) const noexcept {
    return axis == 0 ? 1 : axis == 1 ? nodes[0] : std::ptrdiff_t(nodes[0]) * nodes[1];
  }

  std::size_t flatten(const Index3& ijk) const noexcept {
    return static_cast<std::size_t>(ijk[0] + nodes[0] * (ijk[1] + std::ptrdiff_t(nodes[1]) * ijk[2]));
  }
  Index3 unflatten(std::size_t idx) const noexcept {
    Index3 ijk{0, 0, 0};
    ijk[0] = static_cast<int>(idx % nodes[0]);
    idx /= nodes[0];
    ijk[1] = static_cast<int>(idx % nodes[1]);
    ijk[2] = static_cast<int>(idx / nodes[1]);
    return ijk;
  }

  Point position(const Index3& ijk) const noexcept {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + h * ijk[d];
    return p;
  }
  Point position(std::size_t idx) const noexcept { return position(unflatten(idx)); }

  Point upper() const noexcept {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + h * (nodes[d] - 1);
    return p;
  }

  bool contains(const Point& p) const noexcept;

  /// Node index of the grid point closest to p (clamped to the box).
  Index3 nearest(const Point& p) const noexcept;

  bool operator==(const GridSpec&) const = default;
};

/// Node-sampled real function on a grid.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }

  /// Multilinear interpolation; points outside the box are clamped.
  double interpolate(const Point& p) const noexcept;

  bool all_finite() const noexcept;
};

double distance(const Point& a, const Point& b) noexcept;
double dot(const Point& a, const Point& b) noexcept;
double norm(const Point& a) noexcept;

}  // namespace helebern
