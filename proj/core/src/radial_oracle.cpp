#include "helebern/radial_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helebern/error.hpp"

namespace helebern::radial {

void RadialCase::validate() const {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "radial case needs dim >= 2");
  if (!(r0 > 0.0)) throw Error(ErrorCode::BadRadii, "source radius must be positive");
  if (!(g0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "g0 must be positive");
  law.validate();
}

namespace {

void check_radii(const RadialCase& c, double R) {
  if (!(R > c.r0)) throw Error(ErrorCode::BadRadii, "outer radius must exceed the source radius");
}

}  // namespace

double unit_sphere_area(int dim) {
  // Gamma(dim/2) for integer and half-integer arguments.
  double gamma;
  if (dim % 2 == 0) {
    gamma = 1.0;
    for (int k = 1; k < dim / 2; ++k) gamma *= k;
  } else {
    gamma = std::sqrt(std::numbers::pi);
    for (int k = 1; k < dim; k += 2) gamma *= 0.5 * k;
  }
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / gamma;
}

double u_radial(const RadialCase& c, double R, double r) {
  check_radii(c, R);
  if (!(r > c.r0 && r <= R)) throw Error(ErrorCode::BadRadii, "evaluation radius must lie in (r0, R]");
  if (c.dim == 2) return c.g0 * std::log(R / r) / std::log(R / c.r0);
  const double p = 2.0 - c.dim;
  return c.g0 * (std::pow(r, p) - std::pow(R, p)) / (std::pow(c.r0, p) - std::pow(R, p));
}

double hbar_radial(const RadialCase& c, double R) {
  check_radii(c, R);
  double slope;
  if (c.dim == 2) {
    slope = c.g0 / (R * std::log(R / c.r0));
  } else {
    const double p = 2.0 - c.dim;
    slope = c.g0 * (c.dim - 2) * std::pow(R, 1.0 - c.dim) / (std::pow(c.r0, p) - std::pow(R, p));
  }
  return slope * slope;
}

double velocity_radial(const RadialCase& c, double R) {
  check_radii(c, R);
  // Tr(H) / (N - 1) = -1 / R on a sphere.
  const double f_ball = -c.law.curvature_coeff() / R + c.law.constant_part();
  return f_ball + c.law.lambda * hbar_radial(c, R);
}

double steady_radius(const RadialCase& c, double lo, double hi) {
  check_radii(c, lo);
  check_radii(c, hi);
  if (lo > hi) std::swap(lo, hi);
  double vlo = velocity_radial(c, lo), vhi = velocity_radial(c, hi);
  if (vlo == 0.0) return lo;
  if (vhi == 0.0) return hi;
  if ((vlo > 0.0) == (vhi > 0.0))
    throw Error(ErrorCode::NoSignChange, "radial velocity keeps its sign on the bracket");
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    const double vm = velocity_radial(c, mid);
    if (vm == 0.0) return mid;
    if ((vm > 0.0) == (vlo > 0.0)) {
      lo = mid;
      vlo = vm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Trajectory integrate_radius(const RadialCase& c, double R_init, double t_end, double dt) {
  check_radii(c, R_init);
  if (!(dt > 0.0) || t_end < 0.0) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and t_end >= 0");
  Trajectory traj;
  const double floor = c.r0 * (1.0 + 1e-6);
  double t = 0.0, R = R_init;
  traj.points.push_back({t, R});
  auto f = [&](double r) { return velocity_radial(c, std::max(r, floor)); };
  while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
    const double step = std::min(dt, t_end - t);
    const double k1 = f(R);
    const double k2 = f(R + 0.5 * step * k1);
    const double k3 = f(R + 0.5 * step * k2);
    const double k4 = f(R + step * k3);
    R += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
    traj.points.push_back({t, R});
    if (R <= floor) {
      traj.source_collision = true;
      break;
    }
  }
  return traj;
}

Functionals cap_vol_radial(const RadialCase& c, double R) {
  check_radii(c, R);
  Functionals out;
  const double g2 = c.g0 * c.g0;
  if (c.dim == 2) {
    const double L = std::log(R / c.r0);
    out.cap = 2.0 * std::numbers::pi * g2 / L;
    out.dcap_dR = -2.0 * std::numbers::pi * g2 / (R * L * L);
  } else {
    const double p = 2.0 - c.dim;
    const double denom = std::pow(c.r0, p) - std::pow(R, p);
    const double k = g2 * (c.dim - 2) * unit_sphere_area(c.dim);
    out.cap = k / denom;
    // denom' = (N - 2) R^(1-N) > 0, so the capacity decreases with R.
    out.dcap_dR = -k * ((c.dim - 2) * std::pow(R, 1.0 - c.dim)) / (denom * denom);
  }
  out.vol = unit_sphere_area(c.dim) / c.dim * (std::pow(R, c.dim) - std::pow(c.r0, c.dim));
  out.j_lambda = out.vol + c.law.lambda * out.cap;
  return out;
}

double radius_at(const Trajectory& traj, double t) {
  const auto& pts = traj.points;
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  if (t <= pts.front().t) return pts.front().R;
  if (t >= pts.back().t) return pts.back().R;
  auto it = std::lower_bound(pts.begin(), pts.end(), t, [](const TrajectoryPoint& p, double v) { return p.t < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.R + w * (b.R - a.R);
}

}  // namespace helebern::radial
