#include "helebern/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helebern/error.hpp"

namespace helebern {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BallOutsideGrid: return "BallOutsideGrid";
    case ErrorCode::NoInterface: return "NoInterface";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SourceNotEnclosed: return "SourceNotEnclosed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadRadii: return "BadRadii";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::SourceCollision: return "SourceCollision";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

GridSpec GridSpec::box(int dim, double lo, double hi, int cells) {
  GridSpec g;
  g.dim = dim;
  g.h = (hi - lo) / cells;
  for (int d = 0; d < 3; ++d) {
    g.origin[d] = d < dim ? lo : 0.0;
    g.nodes[d] = d < dim ? cells + 1 : 1;
  }
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3)
    throw Error(ErrorCode::InvalidArgument, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  for (int d = 0; d < 3; ++d) {
    if (d < dim && nodes[d] < kMinNodes)
      throw Error(ErrorCode::InvalidArgument,
                  "axis " + std::to_string(d) + " has " + std::to_string(nodes[d]) + " nodes, need at least " +
                      std::to_string(kMinNodes));
    if (d >= dim && nodes[d] != 1)
      throw Error(ErrorCode::InvalidArgument, "unused axes must have exactly one node");
  }
}

bool GridSpec::contains(const Point& p) const noexcept {
  const Point hi = upper();
  for (int d = 0; d < dim; ++d)
    if (p[d] < origin[d] || p[d] > hi[d]) return false;
  return true;
}

Index3 GridSpec::nearest(const Point& p) const noexcept {
  Index3 ijk{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    const long k = std::lround((p[d] - origin[d]) / h);
    ijk[d] = static_cast<int>(std::clamp<long>(k, 0, nodes[d] - 1));
  }
  return ijk;
}

double ScalarField::interpolate(const Point& p) const noexcept {
  const GridSpec& g = grid;
  Index3 base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int d = 0; d < g.dim; ++d) {
    double s = (p[d] - g.origin[d]) / g.h;
    s = std::clamp(s, 0.0, double(g.nodes[d] - 1));
    int k = std::min(static_cast<int>(std::floor(s)), g.nodes[d] - 2);
    base[d] = k;
    frac[d] = s - k;
  }
  double acc = 0.0;
  const int corners = 1 << g.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    Index3 ijk = base;
    for (int d = 0; d < g.dim; ++d) {
      const bool up = (c >> d) & 1;
      ijk[d] += up;
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    if (w != 0.0) acc += w * values[g.flatten(ijk)];
  }
  return acc;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double dot(const Point& a, const Point& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }
double distance(const Point& a, const Point& b) noexcept {
  return norm(Point{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

}  // namespace helebern
