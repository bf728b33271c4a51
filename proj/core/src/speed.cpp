#include "helebern/speed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "helebern/contour.hpp"
#include "helebern/error.hpp"

namespace helebern {

void SpeedLaw::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  const double a = curvature_coeff();
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorCode::InvalidArgument, "curvature coefficient must be >= 0");
  if (!std::isfinite(constant_part())) throw Error(ErrorCode::InvalidArgument, "constant speed must be finite");
}

double SpeedLaw::curvature_coeff() const noexcept {
  if (const auto* m = std::get_if<MeanCurvatureSpeed>(&curvature_part)) return m->a;
  if (const auto* f = std::get_if<AffineSpeed>(&curvature_part)) return f->a;
  return 0.0;
}

double SpeedLaw::constant_part() const noexcept {
  if (const auto* c = std::get_if<ConstantSpeed>(&curvature_part)) return c->c;
  if (const auto* f = std::get_if<AffineSpeed>(&curvature_part)) return f->c;
  return 0.0;
}

double eval_F(const SpeedLaw& law, double trace_H, int dim) {
  return law.curvature_coeff() * trace_H / (dim - 1) + law.constant_part();
}

ScalarField extend_hbar(const LevelSetField& phi, const CapacitySolution& sol, bool* any_blocked) {
  const GridSpec& g = phi.grid();
  const double h = g.h;
  ScalarField out(g, 0.0);
  bool blocked = false;

  // Samples at the contour vertices, bucketed by nearest grid node.
  const ContourPolyline contour = extract_contour(phi);
  const std::size_t nv = contour.vertices.size();
  std::vector<double> sample(nv);
  std::vector<long> head(g.size(), -1), next(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    const HbarSample s = boundary_hbar(sol, contour.vertices[v]);
    blocked = blocked || s.stencil_blocked;
    sample[v] = s.value;
    const std::size_t cell = g.flatten(g.nearest(contour.vertices[v]));
    next[v] = head[cell];
    head[cell] = static_cast<long>(v);
  }

  auto gather = [&](const Point& x, double radius, double& value) {
    const Index3 c = g.nearest(x);
    const int reach = static_cast<int>(std::ceil(radius)) + 1;
    Index3 lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) {
      lo[d] = std::max(0, c[d] - reach);
      hi[d] = std::min(g.nodes[d] - 1, c[d] + reach);
    }
    const double r2 = radius * radius * h * h;
    double sw = 0.0, sv = 0.0;
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i)
          for (long v = head[g.flatten({i, j, k})]; v >= 0; v = next[v]) {
            const double d = distance(contour.vertices[v], x);
            if (d * d >= r2) continue;
            const double t = 1.0 - d * d / r2;
            sw += t * t;
            sv += t * t * sample[v];
          }
    if (sw <= 0.0) return false;
    value = sv / sw;
    return true;
  };

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(phi[i]) > phi.band_width) continue;
    const NormalSample n = normal_and_gradnorm(phi, i);
    if (n.degenerate) continue;
    Point x = g.position(i);
    for (int d = 0; d < g.dim; ++d) x[d] -= phi[i] * n.normal[d];
    double value = 0.0;
    if (!gather(x, 1.5, value) && !gather(x, 3.0, value)) {
      const HbarSample s = boundary_hbar(sol, x);
      blocked = blocked || s.stencil_blocked;
      value = s.value;
    }
    out[i] = value;
  }
  if (any_blocked) *any_blocked = blocked;
  return out;
}

SpeedField assemble_speed(const LevelSetField& phi, const SpeedLaw& law, const CapacitySolution* sol) {
  const GridSpec& g = phi.grid();
  SpeedField f;
  f.parabolic_coeff = law.curvature_coeff();
  f.valid_band = phi.band_width;
  const double c = law.constant_part();
  f.advective = ScalarField(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(phi[i]) <= phi.band_width) f.advective[i] = c;
  if (law.lambda > 0.0) {
    if (!sol) throw Error(ErrorCode::InvalidArgument, "lambda > 0 needs a capacity solution");
    const ScalarField hb = extend_hbar(phi, *sol, &f.stencil_blocked);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(phi[i]) <= phi.band_width) f.advective[i] += law.lambda * hb[i];
  }
  return f;
}

double cfl_dt(const SpeedField& field, double h, double safety, double dt_cap) {
  if (!(safety > 0.0 && safety <= 1.0)) throw Error(ErrorCode::InvalidArgument, "cfl safety must lie in (0, 1]");
  const int dim = field.advective.grid.dim;
  double vmax = 0.0;
  for (double v : field.advective.values) vmax = std::max(vmax, std::abs(v));
  double bound = std::numeric_limits<double>::infinity();
  if (vmax > 0.0) bound = h / (dim * vmax);
  if (field.parabolic_coeff > 0.0) bound = std::min(bound, h * h / (4.0 * dim * field.parabolic_coeff));
  if (!std::isfinite(bound)) return dt_cap;
  return safety * bound;
}

}  // namespace helebern
