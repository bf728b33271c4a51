// helebern: run, oracle, suite, compare and sweep driven by flat config files.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "helebern/config.hpp"
#include "helebern/error.hpp"
#include "helebern/harness.hpp"
#include "helebern/io.hpp"
#include "helebern/radial_oracle.hpp"

namespace fs = std::filesystem;
using namespace helebern;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kGuard = 3 };

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SourceCollision:
    case ErrorCode::NoConvergence:
    case ErrorCode::SolverFailure:
    case ErrorCode::DegenerateGradient:
      return kGuard;
    default:
      return kConfig;
  }
}

std::string output_dir(const RunConfig& cfg) {
  const char* env = std::getenv("HELEBERN_OUT");
  const std::string dir = env && *env ? env : cfg.out_dir;
  fs::create_directories(dir);
  return dir;
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void write_report(const std::string& dir, const std::string& stem, const ExperimentReport& rep) {
  io::write_file(join(dir, stem + ".txt"), rep.to_text());
  io::write_file(join(dir, stem + ".csv"), rep.to_csv());
  std::cerr << rep.name << ": " << (rep.pass ? "pass" : "FAIL") << " (" << rep.checks.size() << " checks)\n";
  for (const CheckRecord& c : rep.checks)
    if (!c.pass) std::cerr << "  failed " << c.metric << " = " << c.value << " (threshold " << c.threshold << ")\n";
}

int cmd_run(const std::string& path, bool dump_mask) {
  const RunConfig cfg = load_config(path);
  FlowConfig flow = cfg.flow();
  flow.keep_fields = false;
  const FlowOutcome out = run(flow);
  const std::string dir = output_dir(cfg);

  std::ostringstream diag;
  io::write_diagnostics(diag, out.trajectory);
  io::write_file(join(dir, "diagnostics.csv"), diag.str());
  const LevelSetField& phi = *out.final.phi;
  if (cfg.out_contours) {
    std::ostringstream os;
    io::write_contour(os, extract_contour(phi));
    io::write_file(join(dir, "contour.csv"), os.str());
  }
  if (cfg.out_fields) {
    std::ostringstream os;
    if (dump_mask) {
      const DomainMask mask = classify(phi, flow.source);
      io::write_field(os, phi.phi, &mask);
    } else {
      io::write_field(os, phi.phi);
    }
    io::write_file(join(dir, "field.txt"), os.str());
  }
  std::cerr << "status " << to_string(out.status) << " at t=" << out.final.t << " after " << out.steps
            << " steps, equivalent radius " << out.final.diag.eq_radius << " (" << out.message << ")\n";
  return out.status == FlowStatus::ReachedTEnd || out.status == FlowStatus::SteadyState ? kOk : kGuard;
}

int cmd_oracle(const std::string& path) {
  const RunConfig cfg = load_config(path);
  if (cfg.source.kind != ShapeSpec::Kind::Ball || cfg.init.kind != ShapeSpec::Kind::Ball)
    throw Error(ErrorCode::BadValue, "oracle needs source.kind = ball and init.kind = ball");
  const std::string dir = output_dir(cfg);
  std::ostringstream os;
  os << "lambda,R_star\n";
  for (double lambda : cfg.lambda) {
    const radial::RadialCase rc{cfg.dim, cfg.source.radius, cfg.g0, cfg.law(lambda)};
    const double r = radial::steady_radius(rc, rc.r0 * (1.0 + 1e-6), 100.0 * rc.r0);
    os << io::format_double(lambda) << ',' << io::format_double(r) << '\n';
  }
  io::write_file(join(dir, "oracle.csv"), os.str());
  if (cfg.lambda.size() == 1) {
    const radial::RadialCase rc{cfg.dim, cfg.source.radius, cfg.g0, cfg.law(cfg.lambda.front())};
    const radial::Trajectory traj = radial::integrate_radius(rc, cfg.init.radius, cfg.t_end, cfg.dt_cap);
    std::ostringstream tr;
    tr << "t,R\n";
    for (const auto& p : traj.points) tr << io::format_double(p.t) << ',' << io::format_double(p.R) << '\n';
    io::write_file(join(dir, "oracle_trajectory.csv"), tr.str());
    if (traj.source_collision) std::cerr << "radial trajectory reached the source\n";
  }
  return kOk;
}

int cmd_suite(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const std::string dir = output_dir(cfg);
  const ExperimentReport lemmas = lemma_suite({cfg.grid().h});
  write_report(dir, "lemma_suite", lemmas);
  const ExperimentReport descent = descent_experiment(cfg.flow(), 1e-3);
  write_report(dir, "descent", descent);
  return lemmas.pass && descent.pass ? kOk : kFailed;
}

int cmd_compare(const std::string& a, const std::string& b) {
  const RunConfig ca = load_config(a);
  const RunConfig cb = load_config(b);
  const FlowConfig fa = ca.flow();
  const ExperimentReport rep = inclusion_experiment(fa, cb.flow(), 2.0 * fa.grid.h);
  write_report(output_dir(ca), "compare", rep);
  return rep.pass ? kOk : kFailed;
}

int cmd_sweep(const std::string& path) {
  const RunConfig cfg = load_config(path);
  std::optional<double> r0;
  if (cfg.source.kind == ShapeSpec::Kind::Ball && cfg.init.kind == ShapeSpec::Kind::Ball &&
      cfg.source.center == cfg.init.center)
    r0 = cfg.source.radius;
  std::vector<FlowOutcome> runs;
  const ExperimentReport rep = lambda_sweep(cfg.flow(cfg.lambda.front()), cfg.lambda, r0, &runs);
  const std::string dir = output_dir(cfg);
  std::ostringstream os;
  os << "lambda,radius,status\n";
  for (std::size_t k = 0; k < runs.size(); ++k)
    os << io::format_double(cfg.lambda[k]) << ',' << io::format_double(runs[k].final.diag.eq_radius) << ','
       << to_string(runs[k].status) << '\n';
  io::write_file(join(dir, "sweep.csv"), os.str());
  write_report(dir, "sweep", rep);
  return rep.pass ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set flows for Bernoulli / Hele-Shaw free boundaries"};
  app.require_subcommand(1);

  std::string cfg, cfg2;
  bool dump_mask = false;
  auto* run_cmd = app.add_subcommand("run", "Evolve a flow and write diagnostics, contour and field");
  run_cmd->add_option("config", cfg, "config file")->required();
  run_cmd->add_flag("--dump-mask", dump_mask, "add the node classification to the field snapshot");
  auto* oracle_cmd = app.add_subcommand("oracle", "Radial closed forms: steady radii and trajectory");
  oracle_cmd->add_option("config", cfg, "config file")->required();
  auto* suite_cmd = app.add_subcommand("suite", "Lemma checks and the descent experiment");
  suite_cmd->add_option("config", cfg, "config file")->required();
  auto* compare_cmd = app.add_subcommand("compare", "Inclusion between two flows (lambda1 < lambda2)");
  compare_cmd->add_option("config1", cfg, "smaller lambda")->required();
  compare_cmd->add_option("config2", cfg2, "larger lambda")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "Steady sets over the configured lambda list");
  sweep_cmd->add_option("config", cfg, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(cfg, dump_mask);
    if (*oracle_cmd) return cmd_oracle(cfg);
    if (*suite_cmd) return cmd_suite(cfg);
    if (*compare_cmd) return cmd_compare(cfg, cfg2);
    if (*sweep_cmd) return cmd_sweep(cfg);
  } catch (const Error& e) {
    std::cerr << "helebern: " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "helebern: " << e.what() << '\n';
    return kGuard;
  }
  return kConfig;
}
