#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "raradapt/auxiliary.hpp"
#include "raradapt/design.hpp"
#include "raradapt/trial.hpp"
#include "raradapt/weights.hpp"

namespace raradapt {

enum class VarianceMode { Known, PooledEstimate };

enum class Strategy {
  AdaptiveClosed,
  HolmAdaptive,
  ClosedZ,
  HolmZ,
  BonferroniZ,
  DualHolm,
  DualClosed,
};

std::string strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);

// Naive z statistic T_I (mean over realized in-set outcomes minus control
// mean). Unavailable when no patient landed in the set.
struct NaiveStat {
  bool available = false;
  double value = 0.0;
  double scale = 1.0;  // sqrt(1/n_I + 1/n_0), realized counts
};
NaiveStat naive_z_statistic(const TrialData& trial, HypothesisSet set);

// Adaptive statistic from a weight schedule. ImaginaryWeights forces the
// statistic to -infinity; Failed leaves it unavailable.
struct AdaptiveStat {
  bool available = false;
  double value = 0.0;
  double scale = 1.0;  // sqrt(1/n_I' + 1/n_0')
  ScheduleStatus status = ScheduleStatus::Valid;
};
AdaptiveStat adaptive_statistic(const TrialData& trial, const WeightSchedule& schedule);

// sigma-hat^2 pooled across arms (control included); arms with fewer than two
// observations contribute no degrees of freedom. Empty when no arm has two.
std::optional<double> pooled_variance(const TrialData& trial);

// Closure over the local decisions: H_i rejected iff every intersection
// containing i is locally rejected. `local` is indexed by subset mask; every
// nonempty mask below 2^h must be present.
std::set<int> closed_test(const std::map<std::uint32_t, bool>& local, int num_treatments);

// Step-down Holm: sort ascending, reject while p_(k) <= alpha/(h-k+1).
std::set<int> holm(const std::vector<double>& p_values, double alpha);
std::set<int> bonferroni(const std::vector<double>& p_values, double alpha);

// Reject only where both components reject.
std::set<int> dual_test(const std::set<int>& naive, const std::set<int>& adaptive);

// Per-intersection detail retained for reports.
struct IntersectionResult {
  HypothesisSet set;
  NaiveStat naive;
  AdaptiveStat adaptive;
  WeightSchedule schedule;
  bool naive_rejected = false;
  bool adaptive_rejected = false;
};

struct TestOptions {
  double alpha = 0.05;
  VarianceMode variance_mode = VarianceMode::Known;
  double known_sigma = 1.0;  // used in Known mode
  AuxPolicy aux_policy = AuxPolicy::IndependentPerHypothesis;
  std::optional<std::pair<int, int>> split;  // control/treatment split override
  bool closed_strategies = true;  // compute all 2^h - 1 intersections
};

// Full end-of-trial analysis: statistics, p-values, rejections per strategy.
struct TestReport {
  double alpha = 0.05;
  VarianceMode variance_mode = VarianceMode::Known;
  double sigma_hat = 1.0;  // estimate in pooled mode, known sd otherwise
  std::vector<IntersectionResult> intersections;  // elementary first
  std::vector<double> naive_p;     // p_i
  std::vector<double> adaptive_p;  // p-tilde_i
  std::map<Strategy, std::set<int>> rejections;

  const IntersectionResult& intersection(HypothesisSet set) const;
};

TestReport analyze_trial(const TrialData& trial, std::uint64_t aux_base_seed,
                         const TestOptions& options);

}  // namespace raradapt
