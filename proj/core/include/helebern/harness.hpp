#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "helebern/evolve.hpp"

namespace helebern {

struct CheckRecord {
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<CheckRecord> checks;
  bool pass = true;
  double wall_clock = 0.0;

  void add_input(std::string key, std::string value);
  void add_input(std::string key, double value);
  /// Records a check; `pass` of the report becomes the conjunction of all checks.
  bool add_check(std::string metric, double value, double threshold, bool ok);
  /// value <= threshold.
  bool check_at_most(std::string metric, double value, double threshold);
  /// value >= threshold.
  bool check_at_least(std::string metric, double value, double threshold);
  const CheckRecord* find(const std::string& metric) const;

  /// Flat `key: value` lines; the wall clock is the only nondeterministic line.
  std::string to_text() const;
  /// `metric,value,threshold,pass` rows.
  std::string to_csv() const;
};

/// Runs two flows with lambda1 < lambda2 and checks that the first set stays
/// inside the second (up to eps) at every aligned snapshot. Throws
/// ConfigMismatch when the configurations are not comparable or the initial
/// sets are not strictly nested.
ExperimentReport inclusion_experiment(const FlowConfig& cfg1, const FlowConfig& cfg2, double eps,
                                      std::vector<FlowOutcome>* runs = nullptr);

/// Runs `base` from every initial set to a steady state and compares the
/// final contours pairwise.
ExperimentReport uniqueness_experiment(const FlowConfig& base, const std::vector<LevelSetField>& initials, double tol,
                                       std::vector<FlowOutcome>* runs = nullptr);

/// Checks that J_lambda = vol + lambda cap does not increase between
/// diagnostics rows by more than slack * J_lambda(0).
ExperimentReport descent_experiment(const FlowConfig& cfg, double slack, std::vector<FlowOutcome>* runs = nullptr);

/// Capacity-level checks (large-ball decay, near-source blow-up, translation
/// continuity, tangent-ball monotonicity, scaling inequality) and the
/// small-lambda steady radius, at each grid spacing.
ExperimentReport lemma_suite(const std::vector<double>& h_values);

/// Steady sets for increasing lambda. With `r0` (concentric balls about the
/// origin) every radius is also compared against the radial oracle.
ExperimentReport lambda_sweep(const FlowConfig& base, const std::vector<double>& lambdas,
                              std::optional<double> r0 = std::nullopt, std::vector<FlowOutcome>* runs = nullptr);

}  // namespace helebern
