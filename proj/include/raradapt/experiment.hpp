#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "raradapt/design.hpp"
#include "raradapt/rules.hpp"
#include "raradapt/testing.hpp"

namespace raradapt {

// One Monte Carlo experiment: N independent trials of one design/rule/scenario,
// analyzed with the requested strategies.
struct Experiment {
  TrialDesign design;
  std::string rule_name = "equal";
  RuleParams rule_params;
  ScenarioSpec scenario;
  std::vector<Strategy> strategies = {
      Strategy::AdaptiveClosed, Strategy::HolmAdaptive, Strategy::ClosedZ,
      Strategy::HolmZ, Strategy::BonferroniZ};
  long num_sims = 10000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  VarianceMode variance_mode = VarianceMode::Known;
  AuxPolicy aux_policy = AuxPolicy::IndependentPerHypothesis;

  void validate() const;
};

struct StrategyCounts {
  long error_count = 0;  // replicates rejecting >= 1 true null
  long power_count = 0;  // replicates rejecting >= 1 false null
};

struct AnomalyCounts {
  long imaginary = 0;
  long negative_treatment = 0;
  long failed = 0;
};

struct ExperimentResult {
  long num_sims = 0;
  std::uint64_t seed = 0;
  bool has_true_null = false;
  bool has_false_null = false;
  std::map<Strategy, StrategyCounts> counts;
  // Anomalies over the subsets each family of tests evaluates.
  AnomalyCounts closed_anomalies;      // all 2^h - 1 schedules
  AnomalyCounts elementary_anomalies;  // the h elementary schedules
  double wall_seconds = 0.0;

  double fwer(Strategy s) const {
    return static_cast<double>(counts.at(s).error_count) / num_sims;
  }
  double power(Strategy s) const {
    return static_cast<double>(counts.at(s).power_count) / num_sims;
  }
  static double standard_error(double p, long n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
};

// Runs the experiment. Deterministic in (experiment, seed): identical counts
// at any worker count.
ExperimentResult run_experiment(const Experiment& experiment);

// Derivation of the per-replicate auxiliary base seed, exposed so that
// `analyze` can reproduce in-simulation reports from dumped trial data.
std::uint64_t replicate_aux_seed(std::uint64_t seed, long replicate);

// Standardized adaptive statistic moments under the supplied scenario.
struct NullCheckReport {
  long num_valid = 0;
  long num_invalid = 0;
  double mean = 0.0;
  double variance = 0.0;
  double kolmogorov_d = 0.0;  // distance to N(0,1)
};
NullCheckReport null_distribution_check(const Experiment& experiment, HypothesisSet set);

// Disjunctive power of the requested strategies as p2 sweeps over `grid`
// (fixed rule (1-p2, p2), two treatments).
struct PowerCurvePoint {
  double p2 = 0.0;
  std::map<Strategy, double> power;
  std::map<Strategy, double> se;
};
std::vector<PowerCurvePoint> power_curve(const Experiment& base,
                                         const std::vector<double>& grid);

}  // namespace raradapt
