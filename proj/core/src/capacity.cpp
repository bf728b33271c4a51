#include "helebern/capacity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "helebern/error.hpp"
#include "stencil.hpp"

namespace helebern {

void SourceSpec::validate() const {
  if (!std::isfinite(g0) || g0 < 0.0) throw Error(ErrorCode::InvalidArgument, "g0 must be a nonnegative number");
  if (!phi_s.has_interface()) throw Error(ErrorCode::InvalidArgument, "source level set has no boundary on the grid");
}

namespace {

// Fraction of the way from a node (value f0) to its neighbor (f1) where the
// level set crosses zero. With the value behind the node the crossing comes
// from the quadratic through the three samples, otherwise from the chord.
double crossing_fraction(double f0, double f1, std::optional<double> behind) noexcept {
  const double linear = f0 / (f0 - f1);
  if (!behind) return linear;
  // q(s) = f0 + b s + a s^2 with q(-1) = behind, q(1) = f1.
  const double a = 0.5 * (f1 + *behind) - f0;
  const double b = 0.5 * (f1 - *behind);
  if (std::abs(a) < 1e-12 * (std::abs(b) + std::abs(f0))) return linear;
  const double disc = b * b - 4.0 * a * f0;
  if (disc < 0.0) return linear;
  const double sq = std::sqrt(disc);
  // Numerically stable roots of a s^2 + b s + f0.
  const double qv = -0.5 * (b + std::copysign(sq, b));
  double best = linear;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double root : {qv / a, qv != 0.0 ? f0 / qv : linear}) {
    if (root > 0.0 && root <= 1.0 && std::abs(root - linear) < best_gap) {
      best = root;
      best_gap = std::abs(root - linear);
    }
  }
  return best;
}

}  // namespace

DomainMask classify(const LevelSetField& phi_omega, const SourceSpec& source) {
  const GridSpec& g = phi_omega.grid();
  if (!(g == source.phi_s.grid())) throw Error(ErrorCode::GridMismatch, "source and domain use different grids");
  source.validate();

  const double h = g.h;
  DomainMask m;
  m.grid = g;
  m.cls.resize(g.size());
  m.cuts.assign(g.size() * 2 * g.dim, BoundaryCut{});
  m.pinned.assign(g.size(), std::nullopt);

  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ps = source.phi_s[i], po = phi_omega[i];
    if (ps <= 0.0) {
      if (po >= -2.0 * h)
        throw Error(ErrorCode::SourceNotEnclosed,
                    "source node at distance " + std::to_string(-po) + " from the moving boundary (need >= 2h)");
      m.cls[i] = NodeClass::Source;
    } else {
      m.cls[i] = po < 0.0 ? NodeClass::Fluid : NodeClass::Exterior;
    }
  }

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (m.cls[i] != NodeClass::Fluid) continue;
    ++m.fluid_count;
    const double ps = source.phi_s[i], po = phi_omega[i];
    if (ps - po < 2.0 * h) m.thin_gap = true;
    const Index3 ijk = g.unflatten(i);
    double smallest = 1.0;
    for (int d = 0; d < g.dim; ++d) {
      for (int dir : {-1, 1}) {
        BoundaryCut& c = m.cuts[i * 2 * g.dim + 2 * d + (dir > 0)];
        std::size_t j;
        if (!detail::neighbor(g, ijk, i, d, dir, j)) {
          c = BoundaryCut{true, 1.0, 0.0};
          continue;
        }
        if (m.cls[j] == NodeClass::Fluid) continue;
        std::size_t back = i;
        const bool has_back = detail::neighbor(g, ijk, i, d, -dir, back);
        double theta;
        if (m.cls[j] == NodeClass::Source) {
          theta = crossing_fraction(ps, source.phi_s[j], has_back ? std::optional<double>(source.phi_s[back]) : std::nullopt);
          c.value = source.g0;
        } else {
          theta = crossing_fraction(po, phi_omega[j], has_back ? std::optional<double>(phi_omega[back]) : std::nullopt);
          c.value = 0.0;
        }
        c.crossing = true;
        if (theta < smallest) {
          smallest = theta;
          if (theta < DomainMask::kThetaMin) m.pinned[i] = c.value;
        }
        c.theta = std::clamp(theta, DomainMask::kThetaMin, 1.0);
      }
    }
  }
  return m;
}

namespace {

struct Row {
  std::size_t node;
  double inv_diag;
  double rhs;
  std::array<std::size_t, 6> nb;
  std::array<double, 6> w;
  int count;
};

// Shortley-Weller rows for every unpinned fluid node, split by color.
void assemble(const DomainMask& m, std::vector<Row>& red, std::vector<Row>& black) {
  const GridSpec& g = m.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.is_fluid(i) || m.pinned[i]) continue;
    const Index3 ijk = g.unflatten(i);
    Row r{i, 0.0, 0.0, {}, {}, 0};
    double diag = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const BoundaryCut& lo = m.cut(i, d, -1);
      const BoundaryCut& hi = m.cut(i, d, +1);
      const double tl = lo.crossing ? lo.theta : 1.0;
      const double th = hi.crossing ? hi.theta : 1.0;
      const double wl = 2.0 / (tl * (tl + th));
      const double wh = 2.0 / (th * (tl + th));
      diag += wl + wh;
      for (int side = 0; side < 2; ++side) {
        const BoundaryCut& c = side ? hi : lo;
        const double w = side ? wh : wl;
        if (c.crossing) {
          r.rhs += w * c.value;
        } else {
          r.nb[r.count] = side ? i + g.stride(d) : i - g.stride(d);
          r.w[r.count] = w;
          ++r.count;
        }
      }
    }
    r.inv_diag = 1.0 / diag;
    ((ijk[0] + ijk[1] + ijk[2]) % 2 == 0 ? red : black).push_back(r);
  }
}

double row_update(const Row& r, const std::vector<double>& u) noexcept {
  double acc = r.rhs;
  for (int k = 0; k < r.count; ++k) acc += r.w[k] * u[r.nb[k]];
  return acc * r.inv_diag;
}

// max |Laplace_h u| over the rows, in units of u / h^2.
double max_residual(const std::vector<Row>& rows, const std::vector<double>& u) noexcept {
  double res = 0.0;
  for (const Row& r : rows) res = std::max(res, std::abs(row_update(r, u) - u[r.node]) / r.inv_diag);
  return res;
}

}  // namespace

CapacitySolution solve_capacity(const LevelSetField& phi_omega, const SourceSpec& source, const SolverParams& params,
                                const ScalarField* warm_start) {
  CapacitySolution sol;
  sol.mask = classify(phi_omega, source);
  sol.g0 = source.g0;
  sol.phi_omega = phi_omega;
  sol.phi_s = source.phi_s;
  const GridSpec& g = phi_omega.grid();
  sol.u = ScalarField(g, 0.0);
  if (source.g0 == 0.0) return sol;

  std::vector<double>& u = sol.u.values;
  const bool warm = warm_start && warm_start->grid == g;
  double width = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sol.mask.is_fluid(i)) continue;
    if (sol.mask.pinned[i]) {
      u[i] = *sol.mask.pinned[i];
    } else if (warm) {
      u[i] = std::clamp((*warm_start)[i], 0.0, source.g0);
    }
    width = std::max(width, std::min(source.phi_s[i], -phi_omega[i]));
  }

  std::vector<Row> red, black;
  assemble(sol.mask, red, black);

  // Over-relaxation factor tuned to the widest fluid channel.
  const double n_eff = std::max(2.0, 2.0 * width / g.h + 2.0);
  const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi / n_eff));

  const double target = params.tol * source.g0;
  const int check = std::max(1, params.check_every);
  const double inv_h2 = 1.0 / (g.h * g.h);
  auto residual = [&] { return std::max(max_residual(red, u), max_residual(black, u)) * inv_h2 / source.g0; };

  sol.residual = residual();
  long sweeps = 0;
  while (sol.residual * source.g0 > target) {
    if (sweeps >= params.max_iter)
      throw Error(ErrorCode::NoConvergence, "capacity solve stopped after " + std::to_string(sweeps) +
                                                " sweeps with residual " + std::to_string(sol.residual));
    for (int s = 0; s < check && sweeps < params.max_iter; ++s, ++sweeps) {
      for (const Row& r : red) u[r.node] += omega * (row_update(r, u) - u[r.node]);
      for (const Row& r : black) u[r.node] += omega * (row_update(r, u) - u[r.node]);
    }
    sol.residual = residual();
    if (!std::isfinite(sol.residual)) throw Error(ErrorCode::SolverFailure, "capacity iteration produced NaN");
  }
  sol.iterations = sweeps;
  return sol;
}

namespace {

bool sample_in_fluid(const CapacitySolution& sol, const Point& p) {
  if (!sol.u.grid.contains(p)) return false;
  return sol.phi_omega.phi.interpolate(p) < 0.0 && sol.phi_s.phi.interpolate(p) > 0.0;
}

// Weighted least-squares quadratic through nearby fluid nodes and boundary
// crossings, centered at `center`. Third-order accurate for smooth u.
struct LocalQuadratic {
  Point center{};
  double h = 1.0;
  int dim = 2;
  std::array<double, 10> coef{};

  double operator()(const Point& x) const noexcept {
    double q[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) q[d] = (x[d] - center[d]) / h;
    double v = coef[0];
    int col = 1;
    for (int d = 0; d < dim; ++d) v += coef[col++] * q[d];
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) v += coef[col++] * q[a] * q[b];
    return v;
  }
};

template <int N>
bool solve_normal(const Eigen::Matrix<double, 10, 10>& normal, const Eigen::Matrix<double, 10, 1>& rhs,
                  std::array<double, 10>& coef) {
  const Eigen::Matrix<double, N, N> block = normal.topLeftCorner<N, N>();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> eig(block, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (!(ev(0) > 1e-10 * ev(N - 1))) return false;
  const Eigen::Matrix<double, N, 1> x = block.ldlt().solve(rhs.head<N>());
  for (int k = 0; k < N; ++k) coef[k] = x(k);
  return true;
}

std::optional<LocalQuadratic> fit_quadratic(const CapacitySolution& sol, const Point& center, double radius) {
  const GridSpec& g = sol.u.grid;
  const DomainMask& m = sol.mask;
  const int dim = g.dim;
  const int nbasis = dim == 2 ? 6 : 10;
  const double h = g.h;

  Eigen::Matrix<double, 10, 10> normal = Eigen::Matrix<double, 10, 10>::Zero();
  Eigen::Matrix<double, 10, 1> rhs = Eigen::Matrix<double, 10, 1>::Zero();
  int npts = 0;
  auto add = [&](const Point& x, double v) {
    double q[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) q[d] = (x[d] - center[d]) / h;
    const double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if (r2 > radius * radius) return;
    const double w = 1.0 / (1.0 + r2);
    Eigen::Matrix<double, 10, 1> row = Eigen::Matrix<double, 10, 1>::Zero();
    int col = 0;
    row(col++) = 1.0;
    for (int d = 0; d < dim; ++d) row(col++) = q[d];
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) row(col++) = q[a] * q[b];
    normal.noalias() += (w * w) * row * row.transpose();
    rhs.noalias() += (w * w * v) * row;
    ++npts;
  };

  const Index3 c = g.nearest(center);
  const int reach = static_cast<int>(std::ceil(radius)) + 1;
  Index3 lo{0, 0, 0}, hi{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    lo[d] = std::max(0, c[d] - reach);
    hi[d] = std::min(g.nodes[d] - 1, c[d] + reach);
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const Index3 ijk{i, j, k};
        const std::size_t idx = g.flatten(ijk);
        if (!m.is_fluid(idx)) continue;
        const Point x = g.position(ijk);
        add(x, sol.u[idx]);
        for (int d = 0; d < dim; ++d)
          for (int dir : {-1, 1}) {
            const BoundaryCut& cut = m.cut(idx, d, dir);
            if (!cut.crossing) continue;
            Point xb = x;
            xb[d] += dir * cut.theta * h;
            add(xb, cut.value);
          }
      }
  if (npts < nbasis + 2) return std::nullopt;

  LocalQuadratic q;
  q.center = center;
  q.h = h;
  q.dim = dim;
  const bool ok = dim == 2 ? solve_normal<6>(normal, rhs, q.coef) : solve_normal<10>(normal, rhs, q.coef);
  if (!ok) return std::nullopt;
  return q;
}

}  // namespace

HbarSample boundary_hbar(const CapacitySolution& sol, const Point& x_b) {
  HbarSample out;
  if (sol.g0 == 0.0) return out;
  const GridSpec& g = sol.u.grid;
  const double h = g.h;
  const Point grad = gradient_at(sol.phi_omega.phi, x_b);
  const double gn = norm(grad);
  if (gn < kGradientFloor) {
    out.stencil_blocked = true;
    return out;
  }
  auto along = [&](double s) {
    Point p = x_b;
    for (int d = 0; d < g.dim; ++d) p[d] -= s * h * grad[d] / gn;
    return p;
  };
  const Point p1 = along(1.0), p2 = along(2.0);
  const bool ok1 = sample_in_fluid(sol, p1);
  const bool ok2 = ok1 && sample_in_fluid(sol, p2);

  double slope;
  // One local fit covers the boundary point and both interior samples.
  const auto fit = ok2 ? fit_quadratic(sol, p1, 2.6) : std::nullopt;
  if (fit) {
    slope = (4.0 * (*fit)(p1) - (*fit)(p2)) / (2.0 * h);
  } else if (const auto near = fit_quadratic(sol, along(0.5), 2.3); near && ok1) {
    slope = (*near)(p1) / h;
    out.stencil_blocked = true;
  } else if (near && sample_in_fluid(sol, along(0.5))) {
    slope = (*near)(along(0.5)) / (0.5 * h);
    out.stencil_blocked = true;
  } else {
    out.stencil_blocked = true;
    return out;
  }
  out.value = slope * slope;
  return out;
}

namespace {

// Derivative at 0 of the quadratic through (a, fa), (0, f0), (b, fb), a < 0 < b.
double three_point_slope(double a, double fa, double f0, double b, double fb) noexcept {
  return -b / (a * (a - b)) * fa - (a + b) / (a * b) * f0 - a / ((b - a) * b) * fb;
}

}  // namespace

double capacity_integral(const CapacitySolution& sol) {
  const GridSpec& g = sol.u.grid;
  const DomainMask& m = sol.mask;
  const double h = g.h;
  std::vector<double> grad2(g.size(), 0.0);
  std::vector<char> known(g.size(), 0);

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.is_fluid(i)) continue;
    const Index3 ijk = g.unflatten(i);
    double acc = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const BoundaryCut& lo = m.cut(i, d, -1);
      const BoundaryCut& hi = m.cut(i, d, +1);
      std::size_t jl = i, jh = i;
      detail::neighbor(g, ijk, i, d, -1, jl);
      detail::neighbor(g, ijk, i, d, +1, jh);
      const double a = lo.crossing ? -lo.theta * h : -h;
      const double b = hi.crossing ? hi.theta * h : h;
      const double fa = lo.crossing ? lo.value : sol.u[jl];
      const double fb = hi.crossing ? hi.value : sol.u[jh];
      const double s = three_point_slope(a, fa, sol.u[i], b, fb);
      acc += s * s;
    }
    grad2[i] = acc;
    known[i] = 1;
  }

  const double eps = 1.5 * h;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = smoothed_heaviside(-sol.phi_omega[i], eps) * smoothed_heaviside(sol.phi_s[i], eps);
    if (w == 0.0) continue;
    double value = grad2[i];
    if (!known[i]) {
      // Constant extension from the nearest fluid nodes in a growing window.
      const Index3 ijk = g.unflatten(i);
      value = 0.0;
      for (int reach = 1; reach <= 2; ++reach) {
        double sum = 0.0;
        int count = 0;
        Index3 lo{0, 0, 0}, hi{0, 0, 0};
        for (int d = 0; d < g.dim; ++d) {
          lo[d] = std::max(0, ijk[d] - reach);
          hi[d] = std::min(g.nodes[d] - 1, ijk[d] + reach);
        }
        for (int k = lo[2]; k <= hi[2]; ++k)
          for (int j = lo[1]; j <= hi[1]; ++j)
            for (int ii = lo[0]; ii <= hi[0]; ++ii) {
              const std::size_t q = g.flatten({ii, j, k});
              if (known[q]) {
                sum += grad2[q];
                ++count;
              }
            }
        if (count > 0) {
          value = sum / count;
          break;
        }
      }
    }
    total += w * value;
  }
  return total * std::pow(h, g.dim);
}

double volume(const LevelSetField& phi_omega, const SourceSpec& source) {
  const GridSpec& g = phi_omega.grid();
  if (!(g == source.phi_s.grid())) throw Error(ErrorCode::GridMismatch, "source and domain use different grids");
  const double eps = 1.5 * g.h;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    total += smoothed_heaviside(-phi_omega[i], eps) * smoothed_heaviside(source.phi_s[i], eps);
  return total * std::pow(g.h, g.dim);
}

double hadamard_capacity_derivative(const CapacitySolution& sol, const ContourPolyline& contour,
                                    const std::function<double(const Point&)>& normal_push) {
  const GridSpec& g = sol.u.grid;
  if (contour.dim == 2) {
    std::vector<double> hb(contour.vertices.size());
    for (std::size_t v = 0; v < hb.size(); ++v) hb[v] = boundary_hbar(sol, contour.vertices[v]).value;
    double total = 0.0;
    for (const auto& s : contour.segments) {
      const Point& a = contour.vertices[s[0]];
      const Point& b = contour.vertices[s[1]];
      const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.0};
      total -= 0.5 * (hb[s[0]] + hb[s[1]]) * normal_push(mid) * distance(a, b);
    }
    return total;
  }
  // Without surface connectivity, integrate against a smoothed delta of the
  // (distance) level set and read |Du|^2 at the foot points.
  const double eps = 1.5 * g.h;
  const double cell = std::pow(g.h, g.dim);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = sol.phi_omega[i];
    if (std::abs(p) >= eps) continue;
    const double delta = 0.5 / eps * (1.0 + std::cos(std::numbers::pi * p / eps));
    const NormalSample n = normal_and_gradnorm(sol.phi_omega, i);
    if (n.degenerate) continue;
    Point x = g.position(i);
    for (int d = 0; d < g.dim; ++d) x[d] -= p * n.normal[d];
    total -= boundary_hbar(sol, x).value * normal_push(x) * delta * n.grad_norm * cell;
  }
  return total;
}

double hadamard_capacity_derivative(const CapacitySolution& sol, const ContourPolyline& contour) {
  return hadamard_capacity_derivative(sol, contour, [](const Point&) { return 1.0; });
}

}  // namespace helebern
