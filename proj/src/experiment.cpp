#include "raradapt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "raradapt/normal.hpp"

namespace raradapt {

namespace {

constexpr std::uint64_t kTrialTag = static_cast<std::uint64_t>(StreamKind::Trial);
constexpr std::uint64_t kAuxTag = static_cast<std::uint64_t>(StreamKind::Auxiliary);

struct WorkerTotals {
  std::map<Strategy, StrategyCounts> counts;
  AnomalyCounts closed;
  AnomalyCounts elementary;
};

bool needs_closed(const std::vector<Strategy>& strategies) {
  for (Strategy s : strategies) {
    if (s == Strategy::AdaptiveClosed || s == Strategy::ClosedZ ||
        s == Strategy::DualClosed) {
      return true;
    }
  }
  return false;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void Experiment::validate() const {
  design.validate();
  scenario.validate(design.num_treatments);
  if (num_sims < 1) throw ConfigError("run: sims must be >= 1");
  if (strategies.empty()) throw ConfigError("run: the strategy list must be nonempty");
  if (workers < 0) throw ConfigError("run: workers must be nonnegative");
  // Surfaces rule/regime incompatibilities and bad parameters before any work.
  auto rule = make_rule(rule_name, rule_params, design.num_treatments);
  std::vector<int> arms{1};
  std::vector<double> outcomes{0.0};
  ArmHistory seq{design.num_treatments, arms, outcomes};
  BlockHistory block{design.num_treatments, arms, outcomes, {}};
  switch (design.regime) {
    case Regime::FullySequentialFixedControl:
      rule->sequential_probabilities(seq);
      break;
    case Regime::BlockFixedControl:
      rule->block_probabilities(block);
      break;
    case Regime::BlockAdaptiveControl:
      rule->adaptive_control_probabilities(block);
      break;
  }
}

std::uint64_t replicate_aux_seed(std::uint64_t seed, long replicate) {
  return hash_combine(hash_combine(seed, static_cast<std::uint64_t>(replicate)), kAuxTag);
}

ExperimentResult run_experiment(const Experiment& experiment) {
  experiment.validate();
  const auto start = std::chrono::steady_clock::now();
  const int h = experiment.design.num_treatments;
  const bool closed = needs_closed(experiment.strategies);

  std::vector<int> true_nulls;
  std::vector<int> false_nulls;
  for (int i = 1; i <= h; ++i) {
    (experiment.scenario.effects[i - 1] == 0.0 ? true_nulls : false_nulls).push_back(i);
  }

  TestOptions options;
  options.alpha = experiment.design.alpha;
  options.variance_mode = experiment.variance_mode;
  options.known_sigma = experiment.scenario.outcome_sd;
  options.aux_policy = experiment.aux_policy;
  options.closed_strategies = closed;

  const int workers = resolve_workers(experiment.workers);
  std::vector<WorkerTotals> totals(workers);
  std::atomic<long> next_replicate{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto work = [&](int worker_index) {
    auto rule = make_rule(experiment.rule_name, experiment.rule_params, h);
    WorkerTotals& mine = totals[worker_index];
    for (Strategy s : experiment.strategies) mine.counts[s];
    try {
      while (true) {
        const long rep = next_replicate.fetch_add(1, std::memory_order_relaxed);
        if (rep >= experiment.num_sims || failed.load(std::memory_order_relaxed)) break;
        RngStream trial_rng = RngStream::keyed(experiment.seed, rep, StreamKind::Trial);
        TrialData trial =
            run_trial(experiment.design, *rule, experiment.scenario, trial_rng);
        TestReport report =
            analyze_trial(trial, replicate_aux_seed(experiment.seed, rep), options);

        for (Strategy s : experiment.strategies) {
          const std::set<int>& rejected = report.rejections.at(s);
          StrategyCounts& counts = mine.counts[s];
          if (std::any_of(true_nulls.begin(), true_nulls.end(),
                          [&](int i) { return rejected.count(i) != 0; })) {
            ++counts.error_count;
          }
          if (std::any_of(false_nulls.begin(), false_nulls.end(),
                          [&](int i) { return rejected.count(i) != 0; })) {
            ++counts.power_count;
          }
        }

        bool closed_imag = false, closed_neg = false, closed_fail = false;
        bool elem_imag = false, elem_neg = false, elem_fail = false;
        for (const IntersectionResult& inter : report.intersections) {
          const AnomalyReport anomaly = detect_weight_anomalies(inter.schedule);
          closed_imag |= anomaly.imaginary;
          closed_neg |= anomaly.negative_treatment;
          closed_fail |= anomaly.failed;
          if (inter.set.size() == 1) {
            elem_imag |= anomaly.imaginary;
            elem_neg |= anomaly.negative_treatment;
            elem_fail |= anomaly.failed;
          }
        }
        mine.closed.imaginary += closed_imag;
        mine.closed.negative_treatment += closed_neg;
        mine.closed.failed += closed_fail;
        mine.elementary.imaginary += elem_imag;
        mine.elementary.negative_treatment += elem_neg;
        mine.elementary.failed += elem_fail;
      }
    } catch (const std::exception& ex) {
      failed.store(true, std::memory_order_relaxed);
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (failure_message.empty()) failure_message = ex.what();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& thread : pool) thread.join();
  }
  if (failed.load()) throw std::runtime_error("run_experiment: " + failure_message);

  ExperimentResult result;
  result.num_sims = experiment.num_sims;
  result.seed = experiment.seed;
  result.has_true_null = !true_nulls.empty();
  result.has_false_null = !false_nulls.empty();
  for (Strategy s : experiment.strategies) result.counts[s];
  for (const WorkerTotals& part : totals) {
    for (const auto& [strategy, counts] : part.counts) {
      result.counts[strategy].error_count += counts.error_count;
      result.counts[strategy].power_count += counts.power_count;
    }
    result.closed_anomalies.imaginary += part.closed.imaginary;
    result.closed_anomalies.negative_treatment += part.closed.negative_treatment;
    result.closed_anomalies.failed += part.closed.failed;
    result.elementary_anomalies.imaginary += part.elementary.imaginary;
    result.elementary_anomalies.negative_treatment += part.elementary.negative_treatment;
    result.elementary_anomalies.failed += part.elementary.failed;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

NullCheckReport null_distribution_check(const Experiment& experiment, HypothesisSet set) {
  experiment.validate();
  auto rule = make_rule(experiment.rule_name, experiment.rule_params,
                        experiment.design.num_treatments);
  NullCheckReport report;
  std::vector<double> values;
  values.reserve(experiment.num_sims);
  double sum = 0.0, sumsq = 0.0;
  for (long rep = 0; rep < experiment.num_sims; ++rep) {
    RngStream trial_rng = RngStream::keyed(experiment.seed, rep, StreamKind::Trial);
    TrialData trial = run_trial(experiment.design, *rule, experiment.scenario, trial_rng);
    AuxiliaryDesign aux = generate_auxiliary(
        experiment.design, set, replicate_aux_seed(experiment.seed, rep),
        experiment.aux_policy);
    WeightSchedule schedule = compute_weights(trial, aux);
    if (!schedule.valid()) {
      ++report.num_invalid;
      continue;
    }
    AdaptiveStat stat = adaptive_statistic(trial, schedule);
    const double z = stat.value / (experiment.scenario.outcome_sd * stat.scale);
    values.push_back(z);
    sum += z;
    sumsq += z * z;
  }
  report.num_valid = static_cast<long>(values.size());
  if (report.num_valid > 1) {
    report.mean = sum / report.num_valid;
    report.variance =
        (sumsq - sum * sum / report.num_valid) / (report.num_valid - 1);
  }
  std::sort(values.begin(), values.end());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = normal_cdf(values[i]);
    const double hi = static_cast<double>(i + 1) / values.size();
    const double lo = static_cast<double>(i) / values.size();
    d = std::max({d, std::fabs(cdf - hi), std::fabs(cdf - lo)});
  }
  report.kolmogorov_d = d;
  return report;
}

std::vector<PowerCurvePoint> power_curve(const Experiment& base,
                                         const std::vector<double>& grid) {
  if (base.design.num_treatments != 2) {
    throw ConfigError("power_curve expects two experimental treatments");
  }
  std::vector<PowerCurvePoint> points;
  points.reserve(grid.size());
  for (double p2 : grid) {
    if (p2 < 0.0 || p2 > 1.0) throw ConfigError("power_curve: p2 must lie in [0, 1]");
    Experiment experiment = base;
    experiment.rule_name = "fixed";
    experiment.rule_params.fixed_probs = {1.0 - p2, p2};
    ExperimentResult result = run_experiment(experiment);
    PowerCurvePoint point;
    point.p2 = p2;
    for (Strategy s : experiment.strategies) {
      const double power = result.power(s);
      point.power[s] = power;
      point.se[s] = ExperimentResult::standard_error(power, result.num_sims);
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace raradapt
