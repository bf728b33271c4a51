#include <algorithm>
#include <cmath>
#include <limits>

#include "helebern/error.hpp"
#include "helebern/geometry.hpp"
#include "stencil.hpp"

namespace helebern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKeepTolerance = 0.05;

// Godunov upwind solution of |D u| = 1 given the smallest neighbor value per axis.
double godunov_update(std::array<double, 3> a, int dim, double h) noexcept {
  std::sort(a.begin(), a.begin() + dim);
  double u = a[0] + h;
  if (dim >= 2 && u > a[1]) {
    const double diff = a[0] - a[1];
    u = 0.5 * (a[0] + a[1] + std::sqrt(std::max(0.0, 2.0 * h * h - diff * diff)));
    if (dim == 3 && u > a[2]) {
      const double s = a[0] + a[1] + a[2];
      const double q = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - h * h;
      u = (s + std::sqrt(std::max(0.0, s * s - 3.0 * q))) / 3.0;
    }
  }
  return u;
}

}  // namespace

LevelSetField reinitialize(const LevelSetField& in) {
  if (!in.has_interface()) throw Error(ErrorCode::NoInterface, "reinitialize needs a sign change");
  const GridSpec& g = in.grid();
  const double h = g.h;
  const std::size_t n = g.size();

  std::vector<double> dist(n, kInf);
  std::vector<char> fixed(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const double pi = in[i];
    if (pi == 0.0) {
      dist[i] = 0.0;
      fixed[i] = 1;
      continue;
    }
    const Index3 ijk = g.unflatten(i);
    double axis_bound = kInf;
    for (int d = 0; d < g.dim; ++d) {
      for (int dir : {-1, 1}) {
        std::size_t j;
        if (!detail::neighbor(g, ijk, i, d, dir, j)) continue;
        if (pi * in[j] < 0.0) axis_bound = std::min(axis_bound, h * pi / (pi - in[j]));
        else if (in[j] == 0.0) axis_bound = std::min(axis_bound, h);
      }
    }
    if (axis_bound == kInf) continue;
    const double gn = norm(gradient(in.phi, i));
    double d = gn > kGradientFloor ? std::abs(pi) / gn : axis_bound;
    // Values that already behave like a distance are kept, so repeated calls
    // do not move the interface.
    if (std::abs(gn - 1.0) <= kKeepTolerance) d = std::abs(pi);
    dist[i] = std::min(d, axis_bound);
    fixed[i] = 1;
  }

  const int nx = g.nodes[0], ny = g.nodes[1], nz = g.nodes[2];
  const int orderings = 1 << g.dim;
  const double stall = 1e-12 * h;
  for (int pass = 0; pass < 64; ++pass) {
    double max_change = 0.0;
    for (int o = 0; o < orderings; ++o) {
      const int sx = (o & 1) ? -1 : 1, sy = (o & 2) ? -1 : 1, sz = (o & 4) ? -1 : 1;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = sz > 0 ? kk : nz - 1 - kk;
        for (int jj = 0; jj < ny; ++jj) {
          const int j = sy > 0 ? jj : ny - 1 - jj;
          for (int ii = 0; ii < nx; ++ii) {
            const int i = sx > 0 ? ii : nx - 1 - ii;
            const Index3 ijk{i, j, k};
            const std::size_t idx = g.flatten(ijk);
            if (fixed[idx]) continue;
            std::array<double, 3> a{kInf, kInf, kInf};
            for (int d = 0; d < g.dim; ++d) {
              std::size_t nb;
              if (detail::neighbor(g, ijk, idx, d, -1, nb)) a[d] = std::min(a[d], dist[nb]);
              if (detail::neighbor(g, ijk, idx, d, +1, nb)) a[d] = std::min(a[d], dist[nb]);
            }
            if (*std::min_element(a.begin(), a.begin() + g.dim) == kInf) continue;
            const double u = godunov_update(a, g.dim, h);
            if (u < dist[idx]) {
              if (dist[idx] != kInf) max_change = std::max(max_change, dist[idx] - u);
              else max_change = std::max(max_change, h);
              dist[idx] = u;
            }
          }
        }
      }
    }
    if (max_change <= stall) break;
  }

  LevelSetField out{ScalarField(g), in.band_width};
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] < 0.0 ? -dist[i] : dist[i];
  return out;
}

}  // namespace helebern
