#include <cmath>

#include "doctest.h"
#include "helebern/error.hpp"
#include "helebern/speed.hpp"

using namespace helebern;

TEST_CASE("F variants") {
  const SpeedLaw constant{ConstantSpeed{-1.0}, 0.0};
  CHECK(eval_F(constant, 3.7) == -1.0);
  CHECK(eval_F(constant, -12.0) == -1.0);
  const SpeedLaw mc{MeanCurvatureSpeed{1.0}, 0.0};
  CHECK(eval_F(mc, -1.0 / 2.5) == doctest::Approx(-0.4));
  CHECK(eval_F(mc, -1.0, 3) == doctest::Approx(-0.5));
  const SpeedLaw affine{AffineSpeed{1.0, -0.5}, 0.0};
  CHECK(eval_F(affine, 0.0) == -0.5);
}

TEST_CASE("F is nondecreasing in the curvature trace") {
  for (const SpeedLaw& law : {SpeedLaw{ConstantSpeed{0.3}, 0.0}, SpeedLaw{MeanCurvatureSpeed{2.0}, 0.0},
                              SpeedLaw{AffineSpeed{0.5, -1.0}, 1.0}}) {
    double prev = eval_F(law, -10.0);
    for (double t = -9.5; t <= 10.0; t += 0.5) {
      const double v = eval_F(law, t);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS((SpeedLaw{ConstantSpeed{-1.0}, -1.0}.validate()), Error);
  CHECK_THROWS_AS((SpeedLaw{MeanCurvatureSpeed{-1.0}, 0.0}.validate()), Error);
  CHECK_NOTHROW((SpeedLaw{AffineSpeed{0.0, 2.0}, 0.0}.validate()));
}

TEST_CASE("CFL bounds") {
  const double h = 1.0 / 64.0;
  const GridSpec g = GridSpec::box(2, -0.5, 0.5, 64);
  SpeedField f;
  f.advective = ScalarField(g, 0.0);
  f.advective[10] = -2.0;
  CHECK(cfl_dt(f, h, 0.5, 1e-3) == doctest::Approx(0.5 * h / 4.0));
  f.advective[10] = 0.0;
  f.parabolic_coeff = 1.0;
  CHECK(cfl_dt(f, h, 0.5, 1e-3) == doctest::Approx(0.5 * h * h / 8.0));
  f.parabolic_coeff = 0.0;
  CHECK(cfl_dt(f, h, 0.5, 1e-3) == 1e-3);
  CHECK_THROWS_AS(cfl_dt(f, h, 0.0, 1e-3), Error);

  // Monotone in max speed and in the parabolic coefficient.
  double prev = 1e9;
  for (double v : {0.5, 1.0, 2.0, 4.0}) {
    f.advective[10] = v;
    f.parabolic_coeff = v;
    const double dt = cfl_dt(f, h, 0.5, 1e-3);
    CHECK(dt <= prev);
    prev = dt;
  }
}

TEST_CASE("extension of hbar is constant along normals in the radial case") {
  const GridSpec g = GridSpec::box(2, -2.5, 2.5, 640);
  const LevelSetField omega = sdf_ball({0, 0, 0}, 2.0, g);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const CapacitySolution sol = solve_capacity(omega, src, SolverParams{});
  const ScalarField ext = extend_hbar(omega, sol);
  double lo = 1e9, hi = -1e9;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(omega[i]) > omega.band_width) {
      CHECK(ext[i] == 0.0);
      continue;
    }
    lo = std::min(lo, ext[i]);
    hi = std::max(hi, ext[i]);
  }
  CHECK(lo >= 0.0);
  CHECK((hi - lo) / lo <= 0.03);
  const double exact = 1.0 / std::pow(2.0 * std::log(2.0), 2);
  CHECK(ext[g.flatten(g.nearest({2, 0, 0}))] == doctest::Approx(exact).epsilon(0.02));
  CHECK(ext[g.flatten(g.nearest({2.03125, 0, 0}))] == doctest::Approx(ext[g.flatten(g.nearest({2, 0, 0}))]).epsilon(0.01));
}

TEST_CASE("speed assembly") {
  const GridSpec g = GridSpec::box(2, -3.0, 3.0, 96);
  const LevelSetField omega = sdf_ball({0, 0, 0}, 2.0, g);
  const SpeedField pure = assemble_speed(omega, SpeedLaw{ConstantSpeed{-1.0}, 0.0}, nullptr);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(pure.advective[i] == (std::abs(omega[i]) <= omega.band_width ? -1.0 : 0.0));
  CHECK_THROWS_AS(assemble_speed(omega, SpeedLaw{ConstantSpeed{-1.0}, 1.0}, nullptr), Error);
  const SpeedField mc = assemble_speed(omega, SpeedLaw{MeanCurvatureSpeed{2.0}, 0.0}, nullptr);
  CHECK(mc.parabolic_coeff == 2.0);
}
