#include "raradapt/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raradapt/normal.hpp"

namespace raradapt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double p_from_standardized(double z) { return 1.0 - normal_cdf(z); }

}  // namespace

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::AdaptiveClosed: return "adaptive_closed";
    case Strategy::HolmAdaptive: return "holm_adaptive";
    case Strategy::ClosedZ: return "closed_z";
    case Strategy::HolmZ: return "holm_z";
    case Strategy::BonferroniZ: return "bonferroni_z";
    case Strategy::DualHolm: return "dual_holm";
    case Strategy::DualClosed: return "dual_closed";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::AdaptiveClosed, Strategy::HolmAdaptive, Strategy::ClosedZ,
                     Strategy::HolmZ, Strategy::BonferroniZ, Strategy::DualHolm,
                     Strategy::DualClosed}) {
    if (strategy_name(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

NaiveStat naive_z_statistic(const TrialData& trial, HypothesisSet set) {
  NaiveStat stat;
  const int count = trial.realized_in_set(set);
  const int n0 = trial.realized_control_count();
  if (count == 0 || n0 == 0) return stat;
  double sum = 0.0;
  for (std::size_t k = 0; k < trial.arms.size(); ++k) {
    if (trial.arms[k] > 0 && set.contains(trial.arms[k])) sum += trial.outcomes[k];
  }
  stat.available = true;
  stat.value = sum / count - trial.control_outcome_sum() / n0;
  stat.scale = std::sqrt(1.0 / count + 1.0 / n0);
  return stat;
}

AdaptiveStat adaptive_statistic(const TrialData& trial, const WeightSchedule& schedule) {
  AdaptiveStat stat;
  stat.status = schedule.status;
  stat.scale = std::sqrt(1.0 / schedule.aux_treatment_count +
                         1.0 / schedule.aux_control_count);
  if (schedule.status == ScheduleStatus::Failed) return stat;
  if (schedule.status == ScheduleStatus::ImaginaryWeights) {
    stat.available = true;
    stat.value = -kInf;
    return stat;
  }
  stat.available = true;

  const TrialDesign& design = trial.design;
  const HypothesisSet set = schedule.hypothesis;
  double value = 0.0;
  switch (design.regime) {
    case Regime::FullySequentialFixedControl: {
      for (std::size_t k = 0; k < trial.arms.size(); ++k) {
        if (set.contains(trial.arms[k])) {
          value += trial.outcomes[k] / schedule.treatment_weights[k];
        }
      }
      for (int j = 0; j < design.num_control; ++j) {
        const double w = j < schedule.split_n1 ? schedule.split_w1 : schedule.split_w2;
        value -= trial.control_outcomes[j] / w;
      }
      break;
    }
    case Regime::BlockFixedControl: {
      const int J = design.num_blocks();
      const int last_full = schedule.final_split == FinalSplitKind::None ? J : J - 1;
      for (int block = 0; block <= J; ++block) {
        if (block <= last_full) {
          for (int k = trial.block_begin(block); k < trial.block_end(block); ++k) {
            if (set.contains(trial.arms[k])) {
              value += trial.outcomes[k] / schedule.treatment_weights[block];
            }
          }
        }
        // (a split final block has no in-set patients by definition)
      }
      for (int block = 0; block <= last_full; ++block) {
        for (int j = trial.control_block_begin(block); j < trial.control_block_end(block);
             ++j) {
          value -= trial.control_outcomes[j] / schedule.control_weights[block];
        }
      }
      if (schedule.final_split == FinalSplitKind::Control) {
        int group_index = 0;
        for (int j = trial.control_block_begin(J); j < trial.control_block_end(J);
             ++j, ++group_index) {
          const double w =
              group_index < schedule.split_n1 ? schedule.split_w1 : schedule.split_w2;
          value -= trial.control_outcomes[j] / w;
        }
      }
      break;
    }
    case Regime::BlockAdaptiveControl: {
      const int J = design.num_blocks();
      const int last_full = schedule.final_split == FinalSplitKind::None ? J : J - 1;
      for (int block = 0; block <= last_full; ++block) {
        for (int k = trial.block_begin(block); k < trial.block_end(block); ++k) {
          if (trial.arms[k] == 0) {
            value -= trial.outcomes[k] / schedule.control_weights[block];
          } else if (set.contains(trial.arms[k])) {
            value += trial.outcomes[k] / schedule.treatment_weights[block];
          }
        }
      }
      if (schedule.final_split != FinalSplitKind::None) {
        const bool control_split = schedule.final_split == FinalSplitKind::Control;
        int group_index = 0;
        for (int k = trial.block_begin(J); k < trial.block_end(J); ++k) {
          const bool in_group = control_split ? trial.arms[k] == 0
                                              : set.contains(trial.arms[k]);
          if (!in_group) continue;
          const double w =
              group_index < schedule.split_n1 ? schedule.split_w1 : schedule.split_w2;
          value += (control_split ? -1.0 : 1.0) * trial.outcomes[k] / w;
          ++group_index;
        }
      }
      break;
    }
  }
  stat.value = value;
  return stat;
}

std::optional<double> pooled_variance(const TrialData& trial) {
  const TrialDesign& design = trial.design;
  double ss = 0.0;
  long dof = 0;
  auto accumulate_arm = [&](int arm) {
    double sum = 0.0;
    long count = 0;
    for (std::size_t k = 0; k < trial.arms.size(); ++k) {
      if (trial.arms[k] == arm) {
        sum += trial.outcomes[k];
        ++count;
      }
    }
    if (count < 2) return;
    const double mean = sum / count;
    for (std::size_t k = 0; k < trial.arms.size(); ++k) {
      if (trial.arms[k] == arm) ss += (trial.outcomes[k] - mean) * (trial.outcomes[k] - mean);
    }
    dof += count - 1;
  };
  for (int arm = 1; arm <= design.num_treatments; ++arm) accumulate_arm(arm);
  if (design.regime == Regime::BlockAdaptiveControl) {
    accumulate_arm(0);
  } else if (trial.control_outcomes.size() >= 2) {
    const double n0 = static_cast<double>(trial.control_outcomes.size());
    const double mean = trial.control_outcome_sum() / n0;
    for (double x : trial.control_outcomes) ss += (x - mean) * (x - mean);
    dof += trial.control_outcomes.size() - 1;
  }
  if (dof == 0) return std::nullopt;
  return ss / static_cast<double>(dof);
}

std::set<int> closed_test(const std::map<std::uint32_t, bool>& local, int num_treatments) {
  const std::uint32_t full = (1u << num_treatments) - 1u;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (!local.count(mask)) {
      throw ConfigError("closed_test: missing local decision for subset mask " +
                        std::to_string(mask));
    }
  }
  std::set<int> rejected;
  for (int i = 1; i <= num_treatments; ++i) {
    bool all = true;
    for (std::uint32_t mask = 1; mask <= full && all; ++mask) {
      if (mask & (1u << (i - 1))) all = local.at(mask);
    }
    if (all) rejected.insert(i);
  }
  return rejected;
}

std::set<int> holm(const std::vector<double>& p_values, double alpha) {
  const int h = static_cast<int>(p_values.size());
  std::vector<int> order(h);
  std::iota(order.begin(), order.end(), 0);
  // Stable sort: ties keep hypothesis-index order.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return p_values[a] < p_values[b]; });
  std::set<int> rejected;
  for (int k = 0; k < h; ++k) {
    if (p_values[order[k]] <= alpha / (h - k)) {
      rejected.insert(order[k] + 1);
    } else {
      break;
    }
  }
  return rejected;
}

std::set<int> bonferroni(const std::vector<double>& p_values, double alpha) {
  const int h = static_cast<int>(p_values.size());
  std::set<int> rejected;
  for (int i = 0; i < h; ++i) {
    if (p_values[i] <= alpha / h) rejected.insert(i + 1);
  }
  return rejected;
}

std::set<int> dual_test(const std::set<int>& naive, const std::set<int>& adaptive) {
  std::set<int> both;
  std::set_intersection(naive.begin(), naive.end(), adaptive.begin(), adaptive.end(),
                        std::inserter(both, both.begin()));
  return both;
}

const IntersectionResult& TestReport::intersection(HypothesisSet set) const {
  for (const auto& result : intersections) {
    if (result.set == set) return result;
  }
  throw ConfigError("TestReport: no result for subset " + set.label());
}

TestReport analyze_trial(const TrialData& trial, std::uint64_t aux_base_seed,
                         const TestOptions& options) {
  const TrialDesign& design = trial.design;
  const int h = design.num_treatments;
  const double z_alpha =
      options.alpha > 0.0 ? upper_quantile(options.alpha) : kInf;

  TestReport report;
  report.alpha = options.alpha;
  report.variance_mode = options.variance_mode;
  double sigma = options.known_sigma;
  if (options.variance_mode == VarianceMode::PooledEstimate) {
    const auto variance = pooled_variance(trial);
    if (!variance) throw ConfigError("pooled variance unavailable: no arm has two outcomes");
    sigma = std::sqrt(*variance);
  }
  report.sigma_hat = sigma;

  std::vector<HypothesisSet> subsets;
  if (options.closed_strategies) {
    subsets = all_intersections(h);
  } else {
    for (int i = 1; i <= h; ++i) subsets.push_back(HypothesisSet::single(i));
  }

  report.naive_p.assign(h, 1.0);
  report.adaptive_p.assign(h, 1.0);
  std::map<std::uint32_t, bool> naive_local;
  std::map<std::uint32_t, bool> adaptive_local;

  for (HypothesisSet set : subsets) {
    IntersectionResult result;
    result.set = set;
    result.naive = naive_z_statistic(trial, set);
    // Rejection uses >= against the critical value, matching p <= alpha.
    result.naive_rejected =
        result.naive.available &&
        result.naive.value / sigma >= z_alpha * result.naive.scale;

    AuxiliaryDesign aux =
        generate_auxiliary(design, set, aux_base_seed, options.aux_policy);
    result.schedule = compute_weights(trial, aux, options.split);
    result.adaptive = adaptive_statistic(trial, result.schedule);
    result.adaptive_rejected =
        result.adaptive.available &&
        result.adaptive.value / sigma >= z_alpha * result.adaptive.scale;

    naive_local[set.mask()] = result.naive_rejected;
    adaptive_local[set.mask()] = result.adaptive_rejected;
    if (set.size() == 1) {
      const int i = set.lowest() - 1;
      report.naive_p[i] = result.naive.available
                              ? p_from_standardized(result.naive.value /
                                                    (sigma * result.naive.scale))
                              : 1.0;
      report.adaptive_p[i] = result.adaptive.available
                                 ? p_from_standardized(result.adaptive.value /
                                                       (sigma * result.adaptive.scale))
                                 : 1.0;
    }
    report.intersections.push_back(std::move(result));
  }

  report.rejections[Strategy::HolmAdaptive] = holm(report.adaptive_p, options.alpha);
  report.rejections[Strategy::HolmZ] = holm(report.naive_p, options.alpha);
  report.rejections[Strategy::BonferroniZ] = bonferroni(report.naive_p, options.alpha);
  if (options.closed_strategies) {
    report.rejections[Strategy::AdaptiveClosed] = closed_test(adaptive_local, h);
    report.rejections[Strategy::ClosedZ] = closed_test(naive_local, h);
    report.rejections[Strategy::DualClosed] =
        dual_test(report.rejections[Strategy::ClosedZ],
                  report.rejections[Strategy::AdaptiveClosed]);
  }
  report.rejections[Strategy::DualHolm] = dual_test(
      report.rejections[Strategy::HolmZ], report.rejections[Strategy::HolmAdaptive]);
  return report;
}

}  // namespace raradapt
