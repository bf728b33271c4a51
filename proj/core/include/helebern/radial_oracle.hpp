#pragma once

#include <utility>
#include <vector>

#include "helebern/speed.hpp"

namespace helebern::radial {

/// Concentric configuration: source ball of radius r0 carrying g0, moving ball of radius R.
struct RadialCase {
  int dim = 2;
  double r0 = 1.0;
  double g0 = 1.0;
  SpeedLaw law;

  void validate() const;
};

struct Functionals {
  double cap = 0.0;
  double vol = 0.0;
  double j_lambda = 0.0;
  double dcap_dR = 0.0;
};

struct TrajectoryPoint {
  double t = 0.0;
  double R = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  bool source_collision = false;
};

/// Area of the unit sphere in R^dim, 2 pi^(dim/2) / Gamma(dim/2).
double unit_sphere_area(int dim);

/// Harmonic potential in the annulus r0 < r <= R.
double u_radial(const RadialCase& c, double R, double r);
/// |Du|^2 on the outer sphere.
double hbar_radial(const RadialCase& c, double R);
/// F on the sphere of radius R plus lambda * hbar_radial.
double velocity_radial(const RadialCase& c, double R);
/// Root of velocity_radial in [lo, hi] by bisection.
double steady_radius(const RadialCase& c, double lo, double hi);
/// Classical RK4 for dR/dt = velocity_radial(R); stops early on collision with the source.
Trajectory integrate_radius(const RadialCase& c, double R_init, double t_end, double dt);
Functionals cap_vol_radial(const RadialCase& c, double R);

/// Linear interpolation of a trajectory at time t (clamped to its range).
double radius_at(const Trajectory& traj, double t);

}  // namespace helebern::radial
