#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helebern/error.hpp"
#include "helebern/radial_oracle.hpp"

using namespace helebern;
using namespace helebern::radial;

namespace {

const double kE = std::numbers::e;

RadialCase bernoulli(double lambda, int dim = 2) { return {dim, 1.0, 1.0, SpeedLaw{ConstantSpeed{-1.0}, lambda}}; }

}  // namespace

TEST_CASE("annulus potential") {
  const RadialCase c = bernoulli(0.0);
  CHECK(u_radial(c, 2.0, 1.5) == doctest::Approx(0.415037).epsilon(1e-6));
  CHECK(u_radial(c, 2.0, 2.0) == 0.0);
  CHECK(u_radial(c, 2.0, 1.0 + 1e-12) == doctest::Approx(1.0));
  CHECK_THROWS_AS(u_radial(c, 2.0, 0.5), Error);
  CHECK_THROWS_AS(u_radial(c, 0.5, 0.7), Error);
}

TEST_CASE("boundary gradient squared") {
  CHECK(hbar_radial(bernoulli(0.0), 2.0) == doctest::Approx(0.520343).epsilon(1e-6));
  CHECK(hbar_radial(bernoulli(0.0, 3), 2.0) == doctest::Approx(0.25));
  const double R = 1e6;
  CHECK(hbar_radial(bernoulli(0.0), R) * R * R * std::log(R) * std::log(R) == doctest::Approx(1.0));
  double prev = hbar_radial(bernoulli(0.0), 1.01);
  for (double r = 1.1; r < 20.0; r += 0.37) {
    const double v = hbar_radial(bernoulli(0.0), r);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(hbar_radial(bernoulli(0.0), 1.0), Error);
}

TEST_CASE("radial velocity") {
  CHECK(velocity_radial(bernoulli(kE * kE), kE) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(velocity_radial(bernoulli(0.0), 3.0) == -1.0);
  const RadialCase mc{2, 1.0, 1.0, SpeedLaw{MeanCurvatureSpeed{1.0}, kE}};
  CHECK(std::abs(velocity_radial(mc, kE)) < 1e-12);
  const RadialCase aff{2, 1.0, 1.0, SpeedLaw{AffineSpeed{1.0, -0.5}, 0.0}};
  CHECK(velocity_radial(aff, 2.0) == doctest::Approx(-1.0));
}

TEST_CASE("steady radius by bisection") {
  const double r = steady_radius(bernoulli(kE * kE), 1.0 + 1e-6, 10.0);
  CHECK(r == doctest::Approx(kE).epsilon(1e-9));
  CHECK(std::abs(velocity_radial(bernoulli(kE * kE), r)) <= 1e-8);
  CHECK(steady_radius(bernoulli(0.1), 1.0 + 1e-6, 10.0) == doctest::Approx(1.2802).epsilon(1e-3 / 1.2802));
  const double root1 = steady_radius(bernoulli(1.0), 1.0 + 1e-6, 10.0);
  CHECK(root1 * std::log(root1) == doctest::Approx(1.0).epsilon(1e-9));
  const RadialCase mc{2, 1.0, 1.0, SpeedLaw{MeanCurvatureSpeed{1.0}, kE}};
  CHECK(steady_radius(mc, 1.5, 10.0) == doctest::Approx(kE).epsilon(1e-9));
  CHECK_THROWS_AS(steady_radius(bernoulli(kE * kE), 3.0, 4.0), Error);
}

TEST_CASE("ODE trajectories") {
  const Trajectory lin = integrate_radius(bernoulli(0.0), 2.0, 0.5, 1e-3);
  CHECK(lin.points.back().R == doctest::Approx(1.5).epsilon(1e-12));
  const RadialCase mc{2, 1.0, 1.0, SpeedLaw{MeanCurvatureSpeed{1.0}, 0.0}};
  const Trajectory circ = integrate_radius(mc, 2.0, 0.5, 1e-3);
  CHECK(std::abs(circ.points.back().R - std::sqrt(3.0)) <= 1e-8);

  const Trajectory up = integrate_radius(bernoulli(kE * kE), 1.5, 10.0, 1e-3);
  for (std::size_t k = 1; k < up.points.size(); ++k) CHECK(up.points[k].R >= up.points[k - 1].R);
  CHECK(up.points.back().R == doctest::Approx(kE).epsilon(1e-6));

  const double star = steady_radius(bernoulli(kE * kE), 1.0 + 1e-6, 10.0);
  const Trajectory fixed = integrate_radius(bernoulli(kE * kE), star, 10.0, 1e-2);
  CHECK(std::abs(fixed.points.back().R - star) <= 1e-6);

  const Trajectory crash = integrate_radius(bernoulli(0.0), 1.5, 2.0, 1e-3);
  CHECK(crash.source_collision);
  CHECK(crash.points.back().t < 0.6);
  CHECK(radius_at(lin, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("radial functionals") {
  const Functionals f = cap_vol_radial(bernoulli(0.0), 2.0);
  CHECK(f.cap == doctest::Approx(9.064720).epsilon(1e-6));
  CHECK(f.vol == doctest::Approx(9.424778).epsilon(1e-6));
  CHECK(f.dcap_dR == doctest::Approx(-6.538837).epsilon(1e-5));
  CHECK(f.j_lambda == doctest::Approx(f.vol));
  CHECK(cap_vol_radial(bernoulli(0.0, 3), 2.0).cap == doctest::Approx(8.0 * std::numbers::pi));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));

  for (int dim : {2, 3}) {
    const RadialCase c = bernoulli(2.0, dim);
    const double d = 1e-5;
    const double fd = (cap_vol_radial(c, 2.0 + d).cap - cap_vol_radial(c, 2.0 - d).cap) / (2.0 * d);
    CHECK(cap_vol_radial(c, 2.0).dcap_dR == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("scaling inequality holds in closed form") {
  const RadialCase c = bernoulli(0.0);
  for (double rho : {0.8, 0.9}) CHECK(hbar_radial(c, rho * 3.0) >= hbar_radial(c, 3.0) / (rho * rho));
}
