#include "helebern/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helebern/error.hpp"
#include "stencil.hpp"

namespace helebern {

bool LevelSetField::has_interface() const noexcept {
  const auto [lo, hi] = std::minmax_element(phi.values.begin(), phi.values.end());
  return lo != phi.values.end() && *lo < 0.0 && *hi > 0.0;
}

LevelSetField sdf_ball(const Point& center, double radius, const GridSpec& grid) {
  grid.validate();
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  LevelSetField ls{ScalarField(grid), LevelSetField::default_band(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) ls.phi[i] = distance(grid.position(i), center) - radius;
  if (!ls.has_interface()) throw Error(ErrorCode::BallOutsideGrid, "ball boundary does not cross the grid");
  return ls;
}

LevelSetField sdf_from_samples(ScalarField raw, double band) {
  LevelSetField ls{std::move(raw), band};
  if (!ls.has_interface()) throw Error(ErrorCode::NoInterface, "implicit function has constant sign on the grid");
  return reinitialize(ls);
}

LevelSetField sdf_from_implicit(const std::function<double(const Point&)>& f, const GridSpec& grid, double band) {
  grid.validate();
  ScalarField raw(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) raw[i] = f(grid.position(i));
  return sdf_from_samples(std::move(raw), band);
}

Point gradient(const ScalarField& f, std::size_t node) noexcept {
  const GridSpec& g = f.grid;
  const Index3 ijk = g.unflatten(node);
  Point grad{0.0, 0.0, 0.0};
  for (int d = 0; d < g.dim; ++d) {
    std::size_t lo = node, hi = node;
    const bool has_lo = detail::neighbor(g, ijk, node, d, -1, lo);
    const bool has_hi = detail::neighbor(g, ijk, node, d, +1, hi);
    const double span = (has_lo && has_hi) ? 2.0 * g.h : g.h;
    grad[d] = (f[hi] - f[lo]) / span;
  }
  return grad;
}

Point gradient_at(const ScalarField& f, const Point& p) noexcept {
  const GridSpec& g = f.grid;
  Index3 base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int d = 0; d < g.dim; ++d) {
    double s = std::clamp((p[d] - g.origin[d]) / g.h, 0.0, double(g.nodes[d] - 1));
    const int k = std::min(static_cast<int>(std::floor(s)), g.nodes[d] - 2);
    base[d] = k;
    frac[d] = s - k;
  }
  Point acc{0.0, 0.0, 0.0};
  for (int c = 0; c < (1 << g.dim); ++c) {
    double w = 1.0;
    Index3 ijk = base;
    for (int d = 0; d < g.dim; ++d) {
      const bool up = (c >> d) & 1;
      ijk[d] += up;
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    if (w == 0.0) continue;
    const Point gc = gradient(f, g.flatten(ijk));
    for (int d = 0; d < g.dim; ++d) acc[d] += w * gc[d];
  }
  return acc;
}

NormalSample normal_and_gradnorm(const LevelSetField& phi, std::size_t node) noexcept {
  NormalSample s;
  const Point g = gradient(phi.phi, node);
  s.grad_norm = norm(g);
  s.degenerate = s.grad_norm < kGradientFloor;
  const double scale = 1.0 / std::max(s.grad_norm, kGradientFloor);
  for (int d = 0; d < 3; ++d) s.normal[d] = g[d] * scale;
  return s;
}

namespace {

// -div(D phi / |D phi|) from the standard second-order central stencil.
CurvatureSample curvature_at(const ScalarField& f, std::size_t node) noexcept {
  const GridSpec& g = f.grid;
  const Index3 ijk = g.unflatten(node);
  const double h = g.h;
  std::array<double, 3> first{0.0, 0.0, 0.0};
  double second[3][3] = {};
  std::array<std::size_t, 3> lo{}, hi{};
  for (int d = 0; d < g.dim; ++d) {
    lo[d] = detail::clamped(g, ijk, node, d, -1);
    hi[d] = detail::clamped(g, ijk, node, d, +1);
    first[d] = (f[hi[d]] - f[lo[d]]) / (2.0 * h);
    second[d][d] = (f[hi[d]] - 2.0 * f[node] + f[lo[d]]) / (h * h);
  }
  for (int a = 0; a < g.dim; ++a) {
    for (int b = a + 1; b < g.dim; ++b) {
      const Index3 ia = g.unflatten(hi[a]);
      const Index3 ja = g.unflatten(lo[a]);
      const double pp = f[detail::clamped(g, ia, hi[a], b, +1)];
      const double pm = f[detail::clamped(g, ia, hi[a], b, -1)];
      const double mp = f[detail::clamped(g, ja, lo[a], b, +1)];
      const double mm = f[detail::clamped(g, ja, lo[a], b, -1)];
      second[a][b] = second[b][a] = (pp - pm - mp + mm) / (4.0 * h * h);
    }
  }
  double grad2 = 0.0, laplace = 0.0, hess_form = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    grad2 += first[a] * first[a];
    laplace += second[a][a];
    for (int b = 0; b < g.dim; ++b) hess_form += first[a] * second[a][b] * first[b];
  }
  const double gn = std::sqrt(grad2);
  CurvatureSample s;
  if (gn < kGradientFloor) {
    s.degenerate = true;
    return s;
  }
  s.trace = -(grad2 * laplace - hess_form) / (grad2 * gn);
  return s;
}

}  // namespace

CurvatureSample curvature_trace(const LevelSetField& phi, std::size_t node) noexcept {
  return curvature_at(phi.phi, node);
}

std::vector<double> curvature_trace_band(const LevelSetField& phi) {
  std::vector<double> out(phi.phi.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (std::abs(phi[i]) <= phi.band_width) out[i] = curvature_at(phi.phi, i).trace;
  return out;
}

Point foot_point(const LevelSetField& phi, std::size_t node) {
  const NormalSample n = normal_and_gradnorm(phi, node);
  if (n.degenerate) throw Error(ErrorCode::DegenerateGradient, "gradient vanishes at node " + std::to_string(node));
  Point x = phi.grid().position(node);
  for (int d = 0; d < phi.grid().dim; ++d) x[d] -= phi[node] * n.normal[d];
  return x;
}

double inclusion_defect(const LevelSetField& phi1, const LevelSetField& phi2) {
  if (!(phi1.grid() == phi2.grid())) throw Error(ErrorCode::GridMismatch, "inclusion_defect needs identical grids");
  double defect = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi1.phi.size(); ++i) defect = std::max(defect, phi2[i] - phi1[i]);
  return defect;
}

double smoothed_heaviside(double s, double eps) noexcept {
  if (s <= -eps) return 0.0;
  if (s >= eps) return 1.0;
  return 0.5 * (1.0 + s / eps + std::sin(std::numbers::pi * s / eps) / std::numbers::pi);
}

}  // namespace helebern
