#include "helebern/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "helebern/error.hpp"
#include "helebern/io.hpp"
#include "helebern/radial_oracle.hpp"

namespace helebern {

void ExperimentReport::add_input(std::string key, std::string value) {
  inputs.emplace_back(std::move(key), std::move(value));
}

void ExperimentReport::add_input(std::string key, double value) {
  add_input(std::move(key), io::format_double(value));
}

bool ExperimentReport::add_check(std::string metric, double value, double threshold, bool ok) {
  checks.push_back({std::move(metric), value, threshold, ok});
  pass = pass && ok;
  return ok;
}

bool ExperimentReport::check_at_most(std::string metric, double value, double threshold) {
  return add_check(std::move(metric), value, threshold, value <= threshold);
}

bool ExperimentReport::check_at_least(std::string metric, double value, double threshold) {
  return add_check(std::move(metric), value, threshold, value >= threshold);
}

const CheckRecord* ExperimentReport::find(const std::string& metric) const {
  for (const CheckRecord& c : checks)
    if (c.metric == metric) return &c;
  return nullptr;
}

std::string ExperimentReport::to_text() const {
  std::ostringstream os;
  os << "name: " << name << '\n';
  for (const auto& [k, v] : inputs) os << "input." << k << ": " << v << '\n';
  for (const CheckRecord& c : checks)
    os << "check." << c.metric << ": " << io::format_double(c.value) << " threshold "
       << io::format_double(c.threshold) << ' ' << (c.pass ? "PASS" : "FAIL") << '\n';
  os << "pass: " << (pass ? "true" : "false") << '\n';
  os << "wall_clock_s: " << wall_clock << '\n';
  return os.str();
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "metric,value,threshold,pass\n";
  for (const CheckRecord& c : checks)
    os << c.metric << ',' << io::format_double(c.value) << ',' << io::format_double(c.threshold) << ','
       << (c.pass ? 1 : 0) << '\n';
  return os.str();
}

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool completed(FlowStatus s) { return s == FlowStatus::ReachedTEnd || s == FlowStatus::SteadyState; }

bool same_source(const SourceSpec& a, const SourceSpec& b) {
  return a.g0 == b.g0 && a.phi_s.grid() == b.phi_s.grid() && a.phi_s.phi.values == b.phi_s.phi.values;
}

bool same_F(const SpeedLaw& a, const SpeedLaw& b) {
  return a.curvature_coeff() == b.curvature_coeff() && a.constant_part() == b.constant_part();
}

// phi at time t by linear interpolation between bracketing snapshots.
std::optional<ScalarField> field_at(const std::vector<FlowSnapshot>& traj, double t) {
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const FlowSnapshot& a = traj[k];
    const FlowSnapshot& b = traj[k + 1];
    if (t < a.t || t > b.t || !a.phi || !b.phi) continue;
    if (b.t == a.t) return a.phi->phi;
    const double s = (t - a.t) / (b.t - a.t);
    ScalarField out = a.phi->phi;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - s) * a.phi->phi[i] + s * b.phi->phi[i];
    return out;
  }
  if (!traj.empty() && traj.back().phi && t == traj.back().t) return traj.back().phi->phi;
  return std::nullopt;
}

std::string law_summary(const SpeedLaw& law) {
  std::ostringstream os;
  os << "a=" << io::format_double(law.curvature_coeff()) << " c=" << io::format_double(law.constant_part())
     << " lambda=" << io::format_double(law.lambda);
  return os.str();
}

void keep(std::vector<FlowOutcome>* runs, const FlowOutcome& o) {
  if (runs) runs->push_back(o);
}

}  // namespace

ExperimentReport inclusion_experiment(const FlowConfig& cfg1, const FlowConfig& cfg2, double eps,
                                      std::vector<FlowOutcome>* runs) {
  Stopwatch clock;
  if (!(cfg1.law.lambda < cfg2.law.lambda))
    throw Error(ErrorCode::ConfigMismatch, "inclusion needs lambda1 < lambda2");
  if (!(cfg1.grid == cfg2.grid)) throw Error(ErrorCode::ConfigMismatch, "inclusion needs a common grid");
  if (!same_source(cfg1.source, cfg2.source)) throw Error(ErrorCode::ConfigMismatch, "inclusion needs a common source");
  if (!same_F(cfg1.law, cfg2.law)) throw Error(ErrorCode::ConfigMismatch, "inclusion needs the same F");
  const double h = cfg1.grid.h;
  const double defect0 = inclusion_defect(cfg1.initial, cfg2.initial);
  if (!(defect0 <= -2.0 * h))
    throw Error(ErrorCode::ConfigMismatch, "initial sets must be strictly nested (defect " + io::format_double(defect0) +
                                               " > -2h)");

  ExperimentReport rep;
  rep.name = "inclusion";
  rep.add_input("law1", law_summary(cfg1.law));
  rep.add_input("law2", law_summary(cfg2.law));
  rep.add_input("h", h);
  rep.add_input("t_end", std::min(cfg1.t_end, cfg2.t_end));
  rep.add_input("eps", eps);

  FlowConfig c1 = cfg1, c2 = cfg2;
  c1.keep_fields = c2.keep_fields = true;
  c1.t_end = c2.t_end = std::min(cfg1.t_end, cfg2.t_end);
  const FlowOutcome o1 = run(c1);
  const FlowOutcome o2 = run(c2);
  rep.add_input("status1", std::string(to_string(o1.status)));
  rep.add_input("status2", std::string(to_string(o2.status)));
  rep.add_check("flow1_completed", completed(o1.status), 1.0, completed(o1.status));
  rep.add_check("flow2_completed", completed(o2.status), 1.0, completed(o2.status));

  // Every snapshot time of either flow inside the common interval.
  const double t_common = std::min(o1.final.t, o2.final.t);
  std::vector<double> times;
  for (const auto* o : {&o1, &o2})
    for (const FlowSnapshot& s : o->trajectory)
      if (s.t <= t_common) times.push_back(s.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  double worst = -std::numeric_limits<double>::infinity();
  std::size_t aligned = 0;
  for (double t : times) {
    const auto f1 = field_at(o1.trajectory, t);
    const auto f2 = field_at(o2.trajectory, t);
    if (!f1 || !f2) continue;
    worst = std::max(worst, inclusion_defect(LevelSetField{*f1, cfg1.initial.band_width}, LevelSetField{*f2, cfg2.initial.band_width}));
    ++aligned;
  }
  rep.add_input("aligned_snapshots", std::to_string(aligned));
  rep.check_at_least("aligned_snapshots", static_cast<double>(aligned), 2.0);
  rep.check_at_most("max_inclusion_defect", worst, eps);
  keep(runs, o1);
  keep(runs, o2);
  rep.wall_clock = clock.seconds();
  return rep;
}

ExperimentReport uniqueness_experiment(const FlowConfig& base, const std::vector<LevelSetField>& initials, double tol,
                                       std::vector<FlowOutcome>* runs) {
  Stopwatch clock;
  ExperimentReport rep;
  rep.name = "uniqueness";
  rep.add_input("law", law_summary(base.law));
  rep.add_input("h", base.grid.h);
  rep.add_input("initials", std::to_string(initials.size()));
  rep.add_input("tol", tol);

  std::vector<ContourPolyline> finals;
  for (std::size_t k = 0; k < initials.size(); ++k) {
    FlowConfig cfg = base;
    cfg.initial = initials[k];
    cfg.keep_fields = false;
    const FlowOutcome o = run(cfg);
    const std::string tag = "run" + std::to_string(k);
    rep.add_input(tag + ".status", std::string(to_string(o.status)));
    rep.add_input(tag + ".t", o.final.t);
    rep.add_input(tag + ".eq_radius", o.final.diag.eq_radius);
    const bool steady = o.status == FlowStatus::SteadyState;
    rep.add_check(tag + ".steady", steady, 1.0, steady);
    if (o.final.phi) finals.push_back(extract_contour(*o.final.phi));
    keep(runs, o);
  }
  for (std::size_t a = 0; a < finals.size(); ++a)
    for (std::size_t b = a + 1; b < finals.size(); ++b)
      rep.check_at_most("hausdorff_" + std::to_string(a) + "_" + std::to_string(b),
                        hausdorff_distance(finals[a], finals[b]), tol);
  rep.wall_clock = clock.seconds();
  return rep;
}

ExperimentReport descent_experiment(const FlowConfig& cfg, double slack, std::vector<FlowOutcome>* runs) {
  Stopwatch clock;
  if (!(cfg.law.lambda > 0.0) || cfg.law.curvature_coeff() != 0.0 || !(cfg.law.constant_part() < 0.0))
    throw Error(ErrorCode::ConfigMismatch, "descent needs F = c < 0 and lambda > 0");
  ExperimentReport rep;
  rep.name = "descent";
  rep.add_input("law", law_summary(cfg.law));
  rep.add_input("h", cfg.grid.h);
  rep.add_input("slack", slack);

  FlowConfig c = cfg;
  c.keep_fields = false;
  const FlowOutcome o = run(c);
  rep.add_input("status", std::string(to_string(o.status)));
  rep.add_check("completed", completed(o.status), 1.0, completed(o.status));

  std::vector<double> J;
  for (const FlowSnapshot& s : o.trajectory)
    if (std::isfinite(s.diag.j_lambda)) J.push_back(s.diag.j_lambda);
  rep.add_input("rows", std::to_string(J.size()));
  if (J.size() < 2) {
    rep.add_check("rows", static_cast<double>(J.size()), 2.0, false);
  } else {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < J.size(); ++k) worst = std::max(worst, J[k + 1] - J[k]);
    rep.add_input("J0", J.front());
    rep.add_input("J_final", J.back());
    rep.check_at_most("max_increase_over_J0", worst / J.front(), slack);
    rep.add_input("relative_decrease", (J.front() - J.back()) / J.front());
  }
  keep(runs, o);
  rep.wall_clock = clock.seconds();
  return rep;
}

namespace {

CapacitySolution solve_balls(const Point& omega_center, double omega_radius, double source_radius, double h,
                             double lo, double hi) {
  const int cells = static_cast<int>(std::ceil((hi - lo) / h - 1e-9));
  const GridSpec g = GridSpec::box(2, lo, lo + cells * h, cells);
  SourceSpec src{sdf_ball({0, 0, 0}, source_radius, g), 1.0};
  return solve_capacity(sdf_ball(omega_center, omega_radius, g), src, SolverParams{});
}

std::string tag(const std::string& base, double v) {
  std::ostringstream os;
  os << base << v;
  return os.str();
}

}  // namespace

ExperimentReport lemma_suite(const std::vector<double>& h_values) {
  Stopwatch clock;
  ExperimentReport rep;
  rep.name = "lemma_suite";
  std::optional<double> c_first;
  for (double h : h_values) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
    const std::string at = "[h=" + io::format_double(h) + "]";
    rep.add_input("h" + std::to_string(rep.inputs.size()), h);

    // Large-ball decay: h * R^2 ln^2 R -> 1 with r0 = 1. The spacing grows
    // with R so the boundary keeps the same relative resolution.
    for (double R : {4.0, 6.0, 8.0}) {
      const double hr = h * std::max(1.0, R / 4.0);
      const CapacitySolution sol = solve_balls({0, 0, 0}, R, 1.0, hr, -R - 0.5, R + 0.5);
      const double hb = boundary_hbar(sol, {R, 0, 0}).value;
      const double ratio = hb * R * R * std::log(R) * std::log(R);
      rep.add_input(tag("decay_ratio_R", R) + at, ratio);
      rep.check_at_most(tag("decay_ratio_deviation_R", R) + at, std::abs(ratio - 1.0), 0.1);
    }
    // Near-source blow-up: h * gamma^2 stays O(1). The gap needs a few cells.
    for (double gamma : {0.05, 0.1, 0.2}) {
      const double hg = std::min(h, gamma / 8.0);
      const CapacitySolution sol = solve_balls({0, 0, 0}, 1.0 + gamma, 1.0, hg, -1.5, 1.5);
      const double v = boundary_hbar(sol, {1.0 + gamma, 0, 0}).value * gamma * gamma;
      rep.add_input(tag("near_source_gamma", gamma) + at, v);
      rep.check_at_most(tag("near_source_deviation_gamma", gamma) + at, std::abs(v - 1.0), 0.5);
    }
    // Translation continuity: Lipschitz ratio of h under a shift of K.
    {
      const double base = boundary_hbar(solve_balls({0, 0, 0}, 2.0, 1.0, h, -2.5, 2.5), {-2, 0, 0}).value;
      double c = 0.0;
      for (double v : {0.05, 0.1}) {
        const double moved = boundary_hbar(solve_balls({v, 0, 0}, 2.0, 1.0, h, -2.5, 2.6), {-2 + v, 0, 0}).value;
        c = std::max(c, std::abs(moved - base) / v);
      }
      if (!c_first) c_first = c;
      const double drift = std::abs(c - *c_first) / *c_first;
      rep.add_input("translation_C" + at, c);
      rep.check_at_most("translation_C_drift" + at, drift, 0.25);
    }
    // Tangent balls: the larger domain has the larger |Du|^2 at the contact point.
    {
      const double h1 = boundary_hbar(solve_balls({0, 0, 0}, 2.0, 1.0, h, -3.2, 3.6), {-2, 0, 0}).value;
      const double h2 = boundary_hbar(solve_balls({0.5, 0, 0}, 2.5, 1.0, h, -3.2, 3.6), {-2, 0, 0}).value;
      rep.check_at_most("tangent_ratio" + at, h1 / h2, 1.02);
    }
    // Scaling inequality h(rho x, rho K) >= rho^-2 h(x, K).
    {
      const double hk = boundary_hbar(solve_balls({0, 0, 0}, 3.0, 1.0, h, -3.5, 3.5), {3, 0, 0}).value;
      for (double rho : {0.8, 0.9}) {
        const double hs = boundary_hbar(solve_balls({0, 0, 0}, 3.0 * rho, 1.0, h, -3.5, 3.5), {3 * rho, 0, 0}).value;
        rep.check_at_least(tag("scaling_rho", rho) + at, hs / (hk / (rho * rho)), 0.98);
      }
    }
    // Small lambda: the steady set collapses towards S.
    {
      const int cells = static_cast<int>(std::ceil(4.4 / h - 1e-9));
      const GridSpec g = GridSpec::box(2, -2.2, -2.2 + cells * h, cells);
      FlowConfig cfg;
      cfg.grid = g;
      cfg.source = SourceSpec{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
      cfg.initial = sdf_ball({0, 0, 0}, 1.6, g);
      cfg.law = SpeedLaw{ConstantSpeed{-1.0}, 0.1};
      cfg.t_end = 20.0;
      cfg.keep_fields = false;
      const FlowOutcome o = run(cfg);
      const double target = radial::steady_radius({2, 1.0, 1.0, cfg.law}, 1.0 + 1e-6, 10.0);
      rep.add_input("small_lambda_status" + at, std::string(to_string(o.status)));
      rep.add_input("small_lambda_oracle", target);
      const bool steady = o.status == FlowStatus::SteadyState;
      rep.add_check("small_lambda_steady" + at, steady, 1.0, steady);
      rep.check_at_most("small_lambda_radius_error" + at, std::abs(o.final.diag.eq_radius - target), 2.0 * h);
    }
  }
  rep.wall_clock = clock.seconds();
  return rep;
}

ExperimentReport lambda_sweep(const FlowConfig& base, const std::vector<double>& lambdas, std::optional<double> r0,
                              std::vector<FlowOutcome>* runs) {
  Stopwatch clock;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "sweep lambdas must be positive");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "sweep lambdas must be strictly increasing");
  }
  const double h = base.grid.h;
  ExperimentReport rep;
  rep.name = "lambda_sweep";
  rep.add_input("h", h);

  std::vector<FlowOutcome> outs;
  for (double lambda : lambdas) {
    FlowConfig cfg = base;
    cfg.law.lambda = lambda;
    cfg.keep_fields = false;
    FlowOutcome o = run(cfg);
    const std::string at = tag("[lambda=", lambda) + "]";
    rep.add_input("status" + at, std::string(to_string(o.status)));
    rep.add_input("radius" + at, o.final.diag.eq_radius);
    const bool steady = o.status == FlowStatus::SteadyState;
    rep.add_check("steady" + at, steady, 1.0, steady);
    if (r0) {
      radial::RadialCase rc{base.grid.dim, *r0, base.source.g0, cfg.law};
      const double target = radial::steady_radius(rc, *r0 * (1.0 + 1e-6), 100.0 * *r0);
      rep.add_input("oracle" + at, target);
      rep.check_at_most("oracle_error" + at, std::abs(o.final.diag.eq_radius - target), 2.0 * h);
    }
    outs.push_back(std::move(o));
  }
  for (std::size_t k = 0; k + 1 < outs.size(); ++k) {
    const std::string at = tag("[", lambdas[k]) + tag("->", lambdas[k + 1]) + "]";
    const double dr = outs[k + 1].final.diag.eq_radius - outs[k].final.diag.eq_radius;
    rep.check_at_least("radius_increase" + at, dr, std::numeric_limits<double>::min());
    if (outs[k].final.phi && outs[k + 1].final.phi) {
      rep.check_at_most("inclusion_defect" + at, inclusion_defect(*outs[k].final.phi, *outs[k + 1].final.phi),
                        2.0 * h);
      rep.add_input("hausdorff_gap" + at, hausdorff_distance(extract_contour(*outs[k].final.phi),
                                                              extract_contour(*outs[k + 1].final.phi)));
    }
  }
  if (runs)
    for (FlowOutcome& o : outs) runs->push_back(std::move(o));
  rep.wall_clock = clock.seconds();
  return rep;
}

}  // namespace helebern
