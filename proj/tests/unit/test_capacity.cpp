#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helebern/capacity.hpp"
#include "helebern/error.hpp"

using namespace helebern;

namespace {

struct Annulus {
  GridSpec grid;
  SourceSpec source;
  LevelSetField omega;
};

Annulus annulus(double R, double r0, int cells, double half, double g0 = 1.0) {
  Annulus a;
  a.grid = GridSpec::box(2, -half, half, cells);
  a.source = SourceSpec{sdf_ball({0, 0, 0}, r0, a.grid), g0};
  a.omega = sdf_ball({0, 0, 0}, R, a.grid);
  return a;
}

const double kHbar2 = 1.0 / std::pow(2.0 * std::log(2.0), 2);
const double kCap2 = 2.0 * std::numbers::pi / std::log(2.0);

}  // namespace

TEST_CASE("classification of an annulus") {
  const Annulus a = annulus(2.0, 1.0, 160, 2.5);
  const DomainMask m = classify(a.omega, a.source);
  std::size_t fluid = 0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    const Point x = a.grid.position(i);
    const double r = std::hypot(x[0], x[1]);
    if (m.is_fluid(i)) {
      ++fluid;
      CHECK(r > 1.0);
      CHECK(r < 2.0);
    }
  }
  CHECK(fluid == m.fluid_count);
  CHECK(fluid * a.grid.h * a.grid.h == doctest::Approx(3.0 * std::numbers::pi).epsilon(0.02));
}

TEST_CASE("source too close to the boundary") {
  const Annulus a = annulus(1.05, 1.0, 64, 2.0);
  CHECK_THROWS_WITH_AS(classify(a.omega, a.source), doctest::Contains("SourceNotEnclosed"), Error);
}

TEST_CASE("ellipse domain fluid count matches the area") {
  const GridSpec g = GridSpec::box(2, -3.0, 3.0, 192);
  const LevelSetField omega = sdf_from_implicit(
      [](const Point& x) { return (std::sqrt(x[0] * x[0] / 6.25 + x[1] * x[1] / 2.56) - 1.0) * 1.6; }, g,
      LevelSetField::default_band(g));
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const DomainMask m = classify(omega, src);
  const double area = std::numbers::pi * (2.5 * 1.6 - 1.0);
  CHECK(m.fluid_count * g.h * g.h == doctest::Approx(area).epsilon(0.02));
  CHECK(volume(omega, src) == doctest::Approx(area).epsilon(0.02));
}

TEST_CASE("radial potential, maximum principle and scaling") {
  const Annulus a = annulus(2.0, 1.0, 320, 2.5);
  const CapacitySolution sol = solve_capacity(a.omega, a.source, SolverParams{});
  CHECK(sol.residual <= 1e-8);
  const Point p{1.5, 0.0, 0.0};
  CHECK(sol.u[a.grid.flatten(a.grid.nearest(p))] == doctest::Approx(std::log(2.0 / 1.5) / std::log(2.0)).epsilon(5e-3));
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (!sol.mask.is_fluid(i)) continue;
    CHECK(sol.u[i] >= 0.0);
    CHECK(sol.u[i] <= 1.0);
  }

  SUBCASE("g0 = 2 doubles u and quadruples the capacity") {
    const Annulus b = annulus(2.0, 1.0, 320, 2.5, 2.0);
    const CapacitySolution s2 = solve_capacity(b.omega, b.source, SolverParams{}, &sol.u);
    const std::size_t k = a.grid.flatten(a.grid.nearest(p));
    CHECK(s2.u[k] == doctest::Approx(2.0 * sol.u[k]).epsilon(1e-6));
    CHECK(capacity_integral(s2) == doctest::Approx(4.0 * capacity_integral(sol)).epsilon(1e-6));
  }
  SUBCASE("g0 = 0 gives u = 0") {
    SourceSpec zero = a.source;
    zero.g0 = 0.0;
    const CapacitySolution s0 = solve_capacity(a.omega, zero, SolverParams{});
    for (double v : s0.u.values) CHECK(v == 0.0);
    CHECK(boundary_hbar(s0, {2, 0, 0}).value == 0.0);
  }
}

TEST_CASE("radial hbar and capacity at h = 1/128, with >= 3x error decay from 1/64") {
  double err_h[2], err_c[2];
  int k = 0;
  for (int cells : {320, 640}) {
    const Annulus a = annulus(2.0, 1.0, cells, 2.5);
    const CapacitySolution sol = solve_capacity(a.omega, a.source, SolverParams{});
    const double hb = boundary_hbar(sol, {2, 0, 0}).value;
    const double cap = capacity_integral(sol);
    err_h[k] = std::abs(hb - kHbar2);
    err_c[k] = std::abs(cap - kCap2);
    ++k;
  }
  CHECK(err_h[1] <= 0.02 * kHbar2);
  CHECK(err_c[1] <= 0.02 * kCap2);
  CHECK(err_h[0] / err_h[1] >= 3.0);
  CHECK(err_c[0] / err_c[1] >= 3.0);
}

TEST_CASE("volume of an annulus and its scaling") {
  const Annulus a = annulus(2.0, 1.0, 256, 2.5);
  CHECK(volume(a.omega, a.source) == doctest::Approx(3.0 * std::numbers::pi).epsilon(0.01));
  const Annulus b = annulus(4.0, 2.0, 256, 5.0);
  CHECK(volume(b.omega, b.source) == doctest::Approx(12.0 * std::numbers::pi).epsilon(0.01));
  SourceSpec same{a.omega, 1.0};
  // Only the smoothed-Heaviside overlap of width 1.5 h along the circle remains.
  CHECK(volume(a.omega, same) <= 1.5 * a.grid.h * 4.0 * std::numbers::pi * 0.5);
}

TEST_CASE("hadamard derivative of the capacity") {
  const Annulus a = annulus(2.0, 1.0, 320, 2.5);
  const CapacitySolution sol = solve_capacity(a.omega, a.source, SolverParams{});
  const ContourPolyline c = extract_contour(a.omega);
  const double d = hadamard_capacity_derivative(sol, c);
  CHECK(d == doctest::Approx(-6.538837).epsilon(0.03));
  const double flipped = hadamard_capacity_derivative(sol, c, [](const Point&) { return -1.0; });
  CHECK(flipped == doctest::Approx(-d));

  const double delta = 0.05;
  double caps[2];
  int k = 0;
  for (double R : {2.0 + delta, 2.0 - delta}) {
    const Annulus b = annulus(R, 1.0, 320, 2.5);
    caps[k++] = capacity_integral(solve_capacity(b.omega, b.source, SolverParams{}));
  }
  CHECK(d == doctest::Approx((caps[0] - caps[1]) / (2.0 * delta)).epsilon(0.03));
}

TEST_CASE("domain monotonicity at a tangency point") {
  const GridSpec g = GridSpec::box(2, -3.2, 3.6, 272);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const CapacitySolution s1 = solve_capacity(sdf_ball({0, 0, 0}, 2.0, g), src, SolverParams{});
  const CapacitySolution s2 = solve_capacity(sdf_ball({0.5, 0, 0}, 2.5, g), src, SolverParams{});
  const double h1 = boundary_hbar(s1, {-2, 0, 0}).value;
  const double h2 = boundary_hbar(s2, {-2, 0, 0}).value;
  CHECK(h1 <= 1.02 * h2);
}

TEST_CASE("disconnected fluid piece carries u = 0") {
  const GridSpec g = GridSpec::box(2, -3.0, 3.0, 96);
  LevelSetField omega = sdf_ball({-1.3, 0, 0}, 1.2, g);
  const LevelSetField island = sdf_ball({1.7, 0, 0}, 0.8, g);
  for (std::size_t i = 0; i < g.size(); ++i) omega[i] = std::min(omega[i], island[i]);
  const SourceSpec src{sdf_ball({-1.3, 0, 0}, 0.5, g), 1.0};
  const CapacitySolution sol = solve_capacity(omega, src, SolverParams{});
  CHECK(sol.u[g.flatten(g.nearest({1.7, 0, 0}))] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(boundary_hbar(sol, {2.5, 0, 0}).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("solver reports non-convergence") {
  const Annulus a = annulus(2.0, 1.0, 128, 2.5);
  SolverParams p;
  p.max_iter = 10;
  p.check_every = 5;
  CHECK_THROWS_WITH_AS(solve_capacity(a.omega, a.source, p), doctest::Contains("NoConvergence"), Error);
}

TEST_CASE("3D radial hbar and capacity") {
  const GridSpec g = GridSpec::box(3, -2.4, 2.4, 96);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const CapacitySolution sol = solve_capacity(sdf_ball({0, 0, 0}, 2.0, g), src, SolverParams{});
  CHECK(boundary_hbar(sol, {2, 0, 0}).value == doctest::Approx(0.25).epsilon(0.02));
  CHECK(capacity_integral(sol) == doctest::Approx(8.0 * std::numbers::pi).epsilon(0.03));
}
