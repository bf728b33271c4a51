#include "helebern/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "helebern/error.hpp"
#include "stencil.hpp"

namespace helebern {

std::string_view to_string(FlowStatus s) noexcept {
  switch (s) {
    case FlowStatus::ReachedTEnd: return "ReachedTEnd";
    case FlowStatus::SteadyState: return "SteadyState";
    case FlowStatus::SourceCollision: return "SourceCollision";
    case FlowStatus::DomainOverflow: return "DomainOverflow";
    case FlowStatus::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

void FlowConfig::validate() const {
  grid.validate();
  law.validate();
  source.validate();
  if (!(initial.grid() == grid) || !(source.phi_s.grid() == grid))
    throw Error(ErrorCode::GridMismatch, "initial set and source must live on the configured grid");
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (diag_every < 1) throw Error(ErrorCode::InvalidArgument, "diag_every must be >= 1");
  if (reinit_every < 0) throw Error(ErrorCode::InvalidArgument, "reinit_every must be >= 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw Error(ErrorCode::InvalidArgument, "cfl safety must lie in (0, 1]");
  if (!(dt_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt cap must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (source.phi_s[i] <= 0.0 && initial[i] > -4.0 * grid.h)
      throw Error(ErrorCode::SourceNotEnclosed, "initial set must contain S with clearance >= 4h");
}

namespace {

// Godunov upwind |D phi| for a front moving with speed sign `expanding`.
double godunov_norm(const ScalarField& f, std::size_t i, const Index3& ijk, bool expanding) noexcept {
  const GridSpec& g = f.grid;
  double acc = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const double c = f[i];
    const double dm = (c - f[detail::clamped(g, ijk, i, d, -1)]) / g.h;
    const double dp = (f[detail::clamped(g, ijk, i, d, +1)] - c) / g.h;
    double a, b;
    if (expanding) {
      a = std::max(dm, 0.0);
      b = std::min(dp, 0.0);
    } else {
      a = std::min(dm, 0.0);
      b = std::max(dp, 0.0);
    }
    acc += std::max(a * a, b * b);
  }
  return std::sqrt(acc);
}

// kappa |D phi| = (|g|^2 lap - g.H.g) / |g|^2, central differences.
double curvature_times_grad(const ScalarField& f, std::size_t i, const Index3& ijk) noexcept {
  const GridSpec& g = f.grid;
  const double h = g.h;
  double first[3] = {0, 0, 0};
  double second[3][3] = {};
  std::size_t lo[3] = {i, i, i}, hi[3] = {i, i, i};
  for (int d = 0; d < g.dim; ++d) {
    lo[d] = detail::clamped(g, ijk, i, d, -1);
    hi[d] = detail::clamped(g, ijk, i, d, +1);
    first[d] = (f[hi[d]] - f[lo[d]]) / (2.0 * h);
    second[d][d] = (f[hi[d]] - 2.0 * f[i] + f[lo[d]]) / (h * h);
  }
  for (int a = 0; a < g.dim; ++a)
    for (int b = a + 1; b < g.dim; ++b) {
      const Index3 ia = g.unflatten(hi[a]);
      const Index3 ja = g.unflatten(lo[a]);
      const double v = (f[detail::clamped(g, ia, hi[a], b, +1)] - f[detail::clamped(g, ia, hi[a], b, -1)] -
                        f[detail::clamped(g, ja, lo[a], b, +1)] + f[detail::clamped(g, ja, lo[a], b, -1)]) /
                       (4.0 * h * h);
      second[a][b] = second[b][a] = v;
    }
  double grad2 = 0.0, lap = 0.0, form = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    grad2 += first[a] * first[a];
    lap += second[a][a];
    for (int b = 0; b < g.dim; ++b) form += first[a] * second[a][b] * first[b];
  }
  if (grad2 < kGradientFloor * kGradientFloor) return 0.0;
  return (grad2 * lap - form) / grad2;
}

}  // namespace

StepResult step(const LevelSetField& phi, const SpeedLaw& law, const SourceSpec& source, const StepParams& params,
                const ScalarField* warm, double max_dt) {
  law.validate();
  const GridSpec& g = phi.grid();
  StepResult out;
  if (law.lambda > 0.0) {
    out.solution = solve_capacity(phi, source, params.solver, warm);
    out.diag.solver_iterations = out.solution->iterations;
  } else {
    classify(phi, source);
  }
  const SpeedField speed = assemble_speed(phi, law, out.solution ? &*out.solution : nullptr);
  out.diag.stencil_blocked = speed.stencil_blocked;
  for (double v : speed.advective.values) out.diag.max_speed = std::max(out.diag.max_speed, std::abs(v));

  double dt = params.fixed_dt ? *params.fixed_dt
                              : std::min(cfl_dt(speed, g.h, params.cfl_safety, params.dt_cap), params.dt_cap);
  dt = std::min(dt, max_dt);
  if (!(dt > 0.0)) throw Error(ErrorCode::SolverFailure, "nonpositive time step");
  out.diag.dt = dt;

  const double curv = speed.parabolic_coeff / (g.dim - 1);
  out.phi = phi;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(phi[i]) > phi.band_width) continue;
    const Index3 ijk = g.unflatten(i);
    const double v = speed.advective[i];
    double rate = 0.0;
    if (v != 0.0) rate -= v * godunov_norm(phi.phi, i, ijk, v > 0.0);
    if (curv != 0.0) rate += curv * curvature_times_grad(phi.phi, i, ijk);
    out.phi[i] = phi[i] + dt * rate;
  }
  if (!out.phi.phi.all_finite()) throw Error(ErrorCode::SolverFailure, "level set update produced NaN");
  return out;
}

ResidualStats boundary_residual_stats(const LevelSetField& phi, const SpeedLaw& law, const CapacitySolution* sol,
                                      const ContourPolyline& contour) {
  const GridSpec& g = phi.grid();
  ResidualStats st;
  if (contour.vertices.empty()) return st;
  ScalarField trace(g, 0.0);
  if (law.curvature_coeff() != 0.0) {
    const std::vector<double> band = curvature_trace_band(phi);
    trace.values = band;
  }
  std::vector<double> hb;
  hb.reserve(contour.vertices.size());
  st.res_min = std::numeric_limits<double>::infinity();
  st.res_max = -std::numeric_limits<double>::infinity();
  for (const Point& v : contour.vertices) {
    double hbar = 0.0;
    if (law.lambda > 0.0 && sol) hbar = boundary_hbar(*sol, v).value;
    hb.push_back(hbar);
    const double r = eval_F(law, trace.interpolate(v), g.dim) + law.lambda * hbar;
    st.res_min = std::min(st.res_min, r);
    st.res_max = std::max(st.res_max, r);
  }
  std::nth_element(hb.begin(), hb.begin() + hb.size() / 2, hb.end());
  st.hbar_median = hb[hb.size() / 2];
  st.points = contour.vertices.size();
  return st;
}

ResidualStats boundary_residual_stats(const LevelSetField& phi, const SpeedLaw& law, const SourceSpec& source,
                                      const SolverParams& solver) {
  const ContourPolyline contour = extract_contour(phi);
  if (law.lambda > 0.0) {
    const CapacitySolution sol = solve_capacity(phi, source, solver);
    return boundary_residual_stats(phi, law, &sol, contour);
  }
  classify(phi, source);
  return boundary_residual_stats(phi, law, nullptr, contour);
}

namespace {

double contour_clearance(const ContourPolyline& c, const SourceSpec& source) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& v : c.vertices) best = std::min(best, source.phi_s.phi.interpolate(v));
  return best;
}

double node_clearance(const LevelSetField& phi, const SourceSpec& source) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.phi.size(); ++i)
    if (source.phi_s[i] <= 0.0) best = std::min(best, -phi[i]);
  return best;
}

double box_margin(const ContourPolyline& c, const GridSpec& g) {
  const Point hi = g.upper();
  double best = std::numeric_limits<double>::infinity();
  for (const Point& v : c.vertices)
    for (int d = 0; d < g.dim; ++d) best = std::min({best, v[d] - g.origin[d], hi[d] - v[d]});
  return best;
}

}  // namespace

FlowOutcome run(const FlowConfig& config) {
  config.validate();
  const GridSpec& g = config.grid;
  const double h = g.h;
  const SpeedLaw& law = config.law;
  const double disp_tol = config.steady_disp_tol > 0.0 ? config.steady_disp_tol : 0.5 * h;

  StepParams params;
  params.solver = config.solver;
  params.cfl_safety = config.cfl_safety;
  params.dt_cap = config.dt_cap;

  FlowOutcome outcome;
  LevelSetField phi = config.initial;
  double t = 0.0;
  long steps = 0;
  std::optional<ScalarField> warm;
  std::deque<ContourPolyline> window;

  auto make_snapshot = [&](const ContourPolyline& contour, const CapacitySolution* sol, double dt) {
    FlowSnapshot snap;
    snap.t = t;
    snap.step = steps;
    snap.diag.dt = dt;
    snap.diag.vol = volume(phi, config.source);
    snap.diag.cap = sol ? capacity_integral(*sol) : std::numeric_limits<double>::quiet_NaN();
    snap.diag.j_lambda = snap.diag.vol + law.lambda * snap.diag.cap;
    snap.diag.npts = contour.vertices.size();
    snap.diag.eq_radius = equivalent_radius(phi, contour);
    snap.diag.clearance = std::min(contour_clearance(contour, config.source), node_clearance(phi, config.source));
    return snap;
  };
  auto finish = [&](FlowStatus status, FlowSnapshot snap, std::string message) {
    snap.phi = std::make_shared<const LevelSetField>(phi);
    outcome.status = status;
    outcome.message = std::move(message);
    outcome.final = snap;
    outcome.steps = steps;
    if (outcome.trajectory.empty() || outcome.trajectory.back().step != snap.step)
      outcome.trajectory.push_back(snap);
    else
      outcome.trajectory.back() = snap;
    return outcome;
  };
  // Cold or warm solve used when a snapshot is needed without a step.
  auto solve_here = [&]() -> std::optional<CapacitySolution> {
    try {
      return solve_capacity(phi, config.source, config.solver, warm ? &*warm : nullptr);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  while (true) {
    ContourPolyline contour;
    try {
      contour = extract_contour(phi);
    } catch (const Error& e) {
      FlowSnapshot snap;
      snap.t = t;
      snap.step = steps;
      return finish(FlowStatus::SolverFailure, snap, e.what());
    }
    const double clearance = std::min(contour_clearance(contour, config.source), node_clearance(phi, config.source));
    if (clearance < 2.0 * h) {
      FlowSnapshot snap = make_snapshot(contour, nullptr, 0.0);
      return finish(FlowStatus::SourceCollision, snap, "moving boundary within 2h of the source");
    }
    if (box_margin(contour, g) < 4.0 * h) {
      FlowSnapshot snap = make_snapshot(contour, nullptr, 0.0);
      return finish(FlowStatus::DomainOverflow, snap, "moving boundary within 4h of the grid box");
    }
    if (t >= config.t_end * (1.0 - 1e-12)) {
      const auto sol = solve_here();
      FlowSnapshot snap = make_snapshot(contour, sol ? &*sol : nullptr, 0.0);
      const ResidualStats rs = boundary_residual_stats(phi, law, sol ? &*sol : nullptr, contour);
      snap.diag.res_min = rs.res_min;
      snap.diag.res_max = rs.res_max;
      return finish(FlowStatus::ReachedTEnd, snap, "reached t_end");
    }

    StepResult res;
    try {
      res = step(phi, law, config.source, params, warm ? &*warm : nullptr, config.t_end - t);
    } catch (const Error& e) {
      FlowSnapshot snap = make_snapshot(contour, nullptr, 0.0);
      if (e.code() == ErrorCode::SourceNotEnclosed) return finish(FlowStatus::SourceCollision, snap, e.what());
      if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::SolverFailure)
        return finish(FlowStatus::SolverFailure, snap, e.what());
      throw;
    }

    if (steps % config.diag_every == 0) {
      std::optional<CapacitySolution> diag_sol = res.solution;
      if (!diag_sol) diag_sol = solve_here();
      FlowSnapshot snap = make_snapshot(contour, diag_sol ? &*diag_sol : nullptr, res.diag.dt);
      const ResidualStats rs = boundary_residual_stats(phi, law, diag_sol ? &*diag_sol : nullptr, contour);
      snap.diag.res_min = rs.res_min;
      snap.diag.res_max = rs.res_max;
      if (config.keep_fields) snap.phi = std::make_shared<const LevelSetField>(phi);
      outcome.trajectory.push_back(snap);
      if (!res.solution && diag_sol) warm = diag_sol->u;

      double res_tol = config.steady_res_tol;
      if (res_tol <= 0.0) {
        const double c = law.constant_part();
        res_tol = c != 0.0 ? 0.05 * std::abs(c) : 0.05 * law.lambda * rs.hbar_median;
      }
      const bool residual_ok = res_tol > 0.0 && std::max(std::abs(rs.res_min), std::abs(rs.res_max)) <= res_tol;
      window.push_back(contour);
      if (static_cast<int>(window.size()) > config.steady_window + 1) window.pop_front();
      const bool settled = static_cast<int>(window.size()) == config.steady_window + 1 &&
                           hausdorff_distance(window.front(), window.back()) <= disp_tol;
      if (residual_ok || settled)
        return finish(FlowStatus::SteadyState, snap, residual_ok ? "boundary residual below tolerance"
                                                                  : "interface displacement below tolerance");
    }

    phi = std::move(res.phi);
    t += res.diag.dt;
    ++steps;
    if (res.solution) warm = std::move(res.solution->u);
    if (config.reinit_every > 0 && steps % config.reinit_every == 0) phi = reinitialize(phi);
  }
}

}  // namespace helebern
