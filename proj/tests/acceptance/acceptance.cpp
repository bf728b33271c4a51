// Acceptance checks. Prints one `criterion N: PASS|FAIL ...` line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helebern/config.hpp"
#include "helebern/harness.hpp"
#include "helebern/io.hpp"
#include "helebern/radial_oracle.hpp"

using namespace helebern;

namespace {

const double kE = std::numbers::e;
const double kE2 = kE * kE;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [x]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FlowConfig radial_flow(int cells, double half, double R0, SpeedLaw law, double t_end, double dt_cap = 2e-3) {
  FlowConfig c;
  c.grid = GridSpec::box(2, -half, half, cells);
  c.source = SourceSpec{sdf_ball({0, 0, 0}, 1.0, c.grid), 1.0};
  c.initial = sdf_ball({0, 0, 0}, R0, c.grid);
  c.law = law;
  c.t_end = t_end;
  c.dt_cap = dt_cap;
  c.keep_fields = false;
  return c;
}

// h = 1/32 with S = B(0,1), F = -1, lambda = e^2. The B(0,4) start needs a
// wider box at the same spacing.
FlowConfig bernoulli_from(double R0, double t_end) {
  const SpeedLaw law{ConstantSpeed{-1.0}, kE2};
  return R0 < 3.0 ? radial_flow(256, 4.0, R0, law, t_end) : radial_flow(320, 5.0, R0, law, t_end);
}

double max_oracle_error(const FlowConfig& cfg, const FlowOutcome& out, double t_max) {
  const radial::RadialCase rc{2, 1.0, 1.0, cfg.law};
  const radial::Trajectory traj = radial::integrate_radius(rc, 4.0, t_max, 1e-4);
  double worst = 0.0;
  for (const FlowSnapshot& s : out.trajectory)
    if (s.t <= t_max + 1e-12) worst = std::max(worst, std::abs(s.diag.eq_radius - radial::radius_at(traj, s.t)));
  return worst;
}

double input_value(const ExperimentReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.inputs)
    if (k == key) return std::stod(v);
  return std::nan("");
}

std::string failed_checks(const ExperimentReport& rep) {
  std::string s;
  for (const CheckRecord& c : rep.checks)
    if (!c.pass) s += " " + c.metric + "=" + num(c.value);
  return s.empty() ? "" : " failed:" + s;
}

Verdict radial_equilibrium() {
  Verdict v;
  for (double R0 : {1.5, 4.0}) {
    const FlowConfig cfg = bernoulli_from(R0, 20.0);
    const auto t0 = std::chrono::steady_clock::now();
    const FlowOutcome out = run(cfg);
    const double wall = seconds_since(t0);
    const double err = std::abs(out.final.diag.eq_radius - kE);
    const std::string tag = "B(0," + num(R0) + ")";
    v.require(out.status == FlowStatus::SteadyState, tag + " " + std::string(to_string(out.status)) + " at t=" + num(out.final.t));
    v.require(err <= 2.0 * cfg.grid.h, tag + " |R-e|=" + num(err) + " <= " + num(2.0 * cfg.grid.h));
    v.require(wall <= 300.0, tag + " " + num(wall) + "s <= 300s");
  }
  return v;
}

Verdict transient_accuracy() {
  Verdict v;
  const FlowConfig coarse = radial_flow(160, 5.0, 4.0, SpeedLaw{ConstantSpeed{-1.0}, kE2}, 3.0);
  const FlowConfig fine = bernoulli_from(4.0, 3.0);
  const FlowOutcome oc = run(coarse);
  const FlowOutcome of = run(fine);
  v.require(oc.status == FlowStatus::ReachedTEnd && of.status == FlowStatus::ReachedTEnd, "both runs reach t=3");
  const double ec = max_oracle_error(coarse, oc, 3.0);
  const double ef = max_oracle_error(fine, of, 3.0);
  v.require(ec <= 4.0 * coarse.grid.h, "err(h=1/16)=" + num(ec) + " <= " + num(4.0 * coarse.grid.h));
  v.require(ef <= 0.6 * ec, "err(h=1/32)=" + num(ef) + " <= 0.6*err(h=1/16)");
  return v;
}

Verdict capacity_accuracy() {
  Verdict v;
  const radial::RadialCase rc{2, 1.0, 1.0, SpeedLaw{ConstantSpeed{-1.0}, 1.0}};
  const double hbar_exact = radial::hbar_radial(rc, 2.0);
  const double cap_exact = radial::cap_vol_radial(rc, 2.0).cap;
  v.require(std::abs(hbar_exact - 0.520343) <= 1e-6 && std::abs(cap_exact - 9.06472) <= 1e-5, "oracle values");
  double eh[2], ec[2];
  int k = 0;
  for (int cells : {320, 640}) {
    const GridSpec g = GridSpec::box(2, -2.5, 2.5, cells);
    const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
    const CapacitySolution sol = solve_capacity(sdf_ball({0, 0, 0}, 2.0, g), src, SolverParams{});
    eh[k] = std::abs(boundary_hbar(sol, {2.0, 0, 0}).value - hbar_exact) / hbar_exact;
    ec[k] = std::abs(capacity_integral(sol) - cap_exact) / cap_exact;
    ++k;
  }
  v.require(eh[1] <= 0.02, "hbar rel err " + num(eh[1]) + " <= 0.02");
  v.require(ec[1] <= 0.02, "cap rel err " + num(ec[1]) + " <= 0.02");
  v.require(eh[0] / eh[1] >= 3.0, "hbar err ratio " + num(eh[0] / eh[1]) + " >= 3");
  v.require(ec[0] / ec[1] >= 3.0, "cap err ratio " + num(ec[0] / ec[1]) + " >= 3");
  return v;
}

Verdict inclusion() {
  Verdict v;
  const FlowConfig c1 = radial_flow(448, 3.5, 1.5, SpeedLaw{ConstantSpeed{-1.0}, 6.0}, 2.0);
  const FlowConfig c2 = radial_flow(448, 3.5, 2.0, SpeedLaw{ConstantSpeed{-1.0}, 8.0}, 2.0);
  const ExperimentReport rep = inclusion_experiment(c1, c2, 2.0 * c1.grid.h);
  const CheckRecord* d = rep.find("max_inclusion_defect");
  v.require(rep.pass, "max defect " + (d ? num(d->value) : std::string("n/a")) + " <= " + num(2.0 * c1.grid.h) +
                          " over " + num(input_value(rep, "aligned_snapshots")) + " snapshots" + failed_checks(rep));
  return v;
}

Verdict descent() {
  Verdict v;
  FlowConfig cfg = radial_flow(256, 4.0, 2.0, SpeedLaw{ConstantSpeed{-1.0}, 4.0}, 20.0);
  ShapeSpec ellipse;
  ellipse.kind = ShapeSpec::Kind::Ellipse;
  ellipse.axes = {2.5, 1.6, 1.0};
  cfg.initial = make_shape(ellipse, cfg.grid);
  const ExperimentReport rep = descent_experiment(cfg, 1e-3);
  const CheckRecord* inc = rep.find("max_increase_over_J0");
  v.require(rep.pass, "max increase/J0 " + (inc ? num(inc->value) : std::string("n/a")) + " <= 1e-3" + failed_checks(rep));
  const double dec = input_value(rep, "relative_decrease");
  v.require(dec >= 0.05, "total decrease " + num(dec) + " >= 0.05");
  return v;
}

Verdict hadamard() {
  Verdict v;
  const auto annulus = [](double R) {
    const GridSpec g = GridSpec::box(2, -2.5, 2.5, 640);
    const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
    return std::make_pair(sdf_ball({0, 0, 0}, R, g), solve_capacity(sdf_ball({0, 0, 0}, R, g), src, SolverParams{}));
  };
  const auto [phi, sol] = annulus(2.0);
  const double d = hadamard_capacity_derivative(sol, extract_contour(phi));
  const double delta = 0.05;
  const double fd = (capacity_integral(annulus(2.0 + delta).second) - capacity_integral(annulus(2.0 - delta).second)) /
                    (2.0 * delta);
  const double e1 = std::abs(d + 6.538837) / 6.538837;
  const double e2 = std::abs(d - fd) / std::abs(fd);
  v.require(e1 <= 0.03, "-int hbar = " + num(d) + ", rel err " + num(e1) + " <= 0.03");
  v.require(e2 <= 0.03, "vs finite difference " + num(fd) + ", rel err " + num(e2) + " <= 0.03");
  return v;
}

Verdict lemmas() {
  Verdict v;
  const ExperimentReport rep = lemma_suite({1.0 / 32.0});
  v.require(rep.pass, num(static_cast<double>(rep.checks.size())) + " checks at h=1/32" + failed_checks(rep));
  return v;
}

Verdict uniqueness() {
  Verdict v;
  FlowConfig base = radial_flow(256, 4.0, 2.0, SpeedLaw{ConstantSpeed{-1.0}, 4.0}, 20.0);
  ShapeSpec src;
  src.kind = ShapeSpec::Kind::Ellipse;
  src.axes = {1.3, 0.8, 1.0};
  base.source = SourceSpec{make_shape(src, base.grid), 1.0};
  ShapeSpec tall;
  tall.kind = ShapeSpec::Kind::Ellipse;
  tall.axes = {2.0, 3.0, 1.0};
  const std::vector<LevelSetField> initials{sdf_ball({0, 0, 0}, 1.8, base.grid), make_shape(tall, base.grid)};
  const ExperimentReport rep = uniqueness_experiment(base, initials, 3.0 * base.grid.h);
  const CheckRecord* hd = rep.find("hausdorff_0_1");
  v.require(rep.pass, "ellipse source: Hausdorff " + (hd ? num(hd->value) : std::string("n/a")) + " <= " +
                          num(3.0 * base.grid.h) + failed_checks(rep));

  FlowConfig mc = radial_flow(128, 4.0, 2.9, SpeedLaw{MeanCurvatureSpeed{1.0}, kE}, 40.0);
  mc.diag_every = 400;
  const FlowOutcome out = run(mc);
  const double target = radial::steady_radius({2, 1.0, 1.0, mc.law}, 1.0 + 1e-6, 100.0);
  const double err = std::abs(out.final.diag.eq_radius - target);
  v.require(out.status == FlowStatus::SteadyState, "mean curvature " + std::string(to_string(out.status)));
  v.require(err <= 2.0 * mc.grid.h, "mean curvature |R-R*|=" + num(err) + " <= " + num(2.0 * mc.grid.h) +
                                        " (R*=" + num(target) + ")");
  return v;
}

Verdict lambda_monotonicity() {
  Verdict v;
  const FlowConfig base = radial_flow(256, 4.0, 2.0, SpeedLaw{ConstantSpeed{-1.0}, 1.0}, 20.0);
  std::vector<FlowOutcome> runs;
  const ExperimentReport rep = lambda_sweep(base, {0.1, 1.0, kE, kE2}, 1.0, &runs);
  std::string radii;
  for (const FlowOutcome& o : runs) radii += (radii.empty() ? "" : ",") + num(o.final.diag.eq_radius);
  v.require(rep.pass, "radii " + radii + failed_checks(rep));
  const double small = runs.empty() ? 0.0 : runs.front().final.diag.eq_radius;
  v.require(std::abs(small - 1.2802) <= 2.0 * base.grid.h, "lambda=0.1 radius " + num(small) + " vs 1.2802");
  return v;
}

Verdict determinism() {
  Verdict v;
  const FlowConfig cfg = bernoulli_from(1.5, 20.0);
  std::string csv[2];
  for (std::string& s : csv) {
    std::ostringstream os;
    io::write_diagnostics(os, run(cfg).trajectory);
    s = os.str();
  }
  v.require(csv[0] == csv[1], "diagnostics CSVs identical (" + num(static_cast<double>(csv[0].size())) + " bytes)");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict()>> criteria{
      radial_equilibrium, transient_accuracy, capacity_accuracy, inclusion, descent,
      hadamard,           lemmas,             uniqueness,        lambda_monotonicity, determinism};

  bool all = true;
  for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) {
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[n - 1]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    all = all && v.pass;
    std::printf("criterion %d: %s (%.0fs) %s\n", n, v.pass ? "PASS" : "FAIL", seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
