#include "raradapt/rules.hpp"

#include <algorithm>
#include <cmath>

#include "raradapt/normal.hpp"

namespace raradapt {

namespace {

constexpr double kProbTol = 1e-9;
constexpr double kExpClamp = 50.0;  // exp argument bound in the control-matching term

// Per-arm sufficient statistics accumulated from a history span.
struct ArmStats {
  std::vector<long> counts;
  std::vector<double> sums;
};

ArmStats accumulate(int num_treatments, std::span<const int> arms,
                    std::span<const double> outcomes, bool with_control) {
  ArmStats stats;
  const int lanes = num_treatments + (with_control ? 1 : 0);
  stats.counts.assign(lanes, 0);
  stats.sums.assign(lanes, 0.0);
  for (std::size_t k = 0; k < arms.size(); ++k) {
    int lane = with_control ? arms[k] : arms[k] - 1;
    ++stats.counts[lane];
    stats.sums[lane] += outcomes[k];
  }
  return stats;
}

NormalArmPosterior posterior_from(const RuleParams& params, long count, double sum) {
  return NormalArmPosterior{params.prior_mean, params.prior_var, count, sum};
}

bool arm1_mean_above_half(std::span<const int> arms, std::span<const double> outcomes) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t k = 0; k < arms.size(); ++k) {
    if (arms[k] == 1) {
      sum += outcomes[k];
      ++count;
    }
  }
  return count > 0 && sum / static_cast<double>(count) > 0.5;
}

class EqualRule final : public RandomizationRule {
 public:
  explicit EqualRule(int h) : h_(h) {}
  std::string name() const override { return "equal"; }
  std::vector<double> sequential_probabilities(const ArmHistory&) const override {
    return std::vector<double>(h_, 1.0 / h_);
  }
  std::vector<double> block_probabilities(const BlockHistory&) const override {
    return std::vector<double>(h_, 1.0 / h_);
  }
  std::vector<double> adaptive_control_probabilities(const BlockHistory&) const override {
    return std::vector<double>(h_ + 1, 1.0 / (h_ + 1));
  }

 private:
  int h_;
};

class FixedRule final : public RandomizationRule {
 public:
  FixedRule(int h, std::vector<double> probs) : h_(h), probs_(std::move(probs)) {
    check_probability_vector(probs_, static_cast<std::size_t>(h_));
  }
  std::string name() const override { return "fixed"; }
  std::vector<double> sequential_probabilities(const ArmHistory&) const override {
    return probs_;
  }
  std::vector<double> block_probabilities(const BlockHistory&) const override {
    return probs_;
  }

 private:
  int h_;
  std::vector<double> probs_;
};

// Type I error inflator (a deliberately pathological rule): all mass on arm 1
// until arm 1's running mean exceeds 0.5, then all mass on the other arms.
class InflatorRule final : public RandomizationRule {
 public:
  explicit InflatorRule(int h) : h_(h) {}
  std::string name() const override { return "inflator"; }

  std::vector<double> sequential_probabilities(const ArmHistory& history) const override {
    return experimental_probs(arm1_mean_above_half(history.arms, history.outcomes));
  }
  std::vector<double> block_probabilities(const BlockHistory& history) const override {
    return experimental_probs(arm1_mean_above_half(history.arms, history.outcomes));
  }
  // With an adaptive control the control keeps its 1/h share whether or not
  // the rule has triggered. The triggered branch then matches the published
  // form (mass 1/h on each of control and arms 2..h).
  std::vector<double> adaptive_control_probabilities(const BlockHistory& history) const override {
    std::vector<double> probs(h_ + 1, 0.0);
    probs[0] = 1.0 / h_;
    if (arm1_mean_above_half(history.arms, history.outcomes)) {
      for (int arm = 2; arm <= h_; ++arm) probs[arm] = (1.0 - 1.0 / h_) / (h_ - 1);
    } else {
      probs[1] = 1.0 - 1.0 / h_;
    }
    return probs;
  }

 private:
  std::vector<double> experimental_probs(bool triggered) const {
    std::vector<double> probs(h_, 0.0);
    if (triggered) {
      for (int arm = 2; arm <= h_; ++arm) probs[arm - 1] = 1.0 / (h_ - 1);
    } else {
      probs[0] = 1.0;
    }
    return probs;
  }
  int h_;
};

class BarYinRule final : public RandomizationRule {
 public:
  BarYinRule(int h, RuleParams params) : h_(h), params_(std::move(params)) {}
  std::string name() const override { return "bar_yin"; }

  std::vector<double> sequential_probabilities(const ArmHistory& history) const override {
    ArmStats stats = accumulate(h_, history.arms, history.outcomes, false);
    std::vector<NormalArmPosterior> posteriors;
    posteriors.reserve(h_);
    for (int i = 0; i < h_; ++i) {
      posteriors.push_back(posterior_from(params_, stats.counts[i], stats.sums[i]));
    }
    return apply_clamp(bar_sequential_probs(posteriors, params_.tau), params_.clamp);
  }

 private:
  int h_;
  RuleParams params_;
};

class BarWasonRule final : public RandomizationRule {
 public:
  BarWasonRule(int h, RuleParams params) : h_(h), params_(std::move(params)) {}
  std::string name() const override { return "bar_wason"; }

  std::vector<double> block_probabilities(const BlockHistory& history) const override {
    ArmStats stats = accumulate(h_, history.arms, history.outcomes, false);
    std::vector<NormalArmPosterior> posteriors;
    posteriors.reserve(h_);
    for (int i = 0; i < h_; ++i) {
      posteriors.push_back(posterior_from(params_, stats.counts[i], stats.sums[i]));
    }
    double control_sum = 0.0;
    for (double x : history.control_outcomes) control_sum += x;
    NormalArmPosterior control = posterior_from(
        params_, static_cast<long>(history.control_outcomes.size()), control_sum);
    return apply_clamp(bar_block_probs(posteriors, control, params_.gamma), params_.clamp);
  }

 private:
  int h_;
  RuleParams params_;
};

class BarAdaptiveControlRule final : public RandomizationRule {
 public:
  BarAdaptiveControlRule(int h, RuleParams params) : h_(h), params_(std::move(params)) {}
  std::string name() const override { return "bar_adaptive_control"; }

  std::vector<double> adaptive_control_probabilities(const BlockHistory& history) const override {
    ArmStats stats = accumulate(h_, history.arms, history.outcomes, true);
    std::vector<NormalArmPosterior> posteriors;
    posteriors.reserve(h_);
    std::vector<long> sizes(stats.counts.begin() + 1, stats.counts.end());
    for (int i = 1; i <= h_; ++i) {
      posteriors.push_back(posterior_from(params_, stats.counts[i], stats.sums[i]));
    }
    NormalArmPosterior control = posterior_from(params_, stats.counts[0], stats.sums[0]);
    return bar_adaptive_control_probs(posteriors, control, sizes, stats.counts[0],
                                      params_.gamma, params_.nu);
  }

 private:
  int h_;
  RuleParams params_;
};

}  // namespace

double prob_superiority(const NormalArmPosterior& a, const NormalArmPosterior& b) {
  const double var = a.variance() + b.variance();
  if (var < 1e-300) {
    if (a.mean() > b.mean()) return 1.0;
    if (a.mean() < b.mean()) return 0.0;
    return 0.5;
  }
  return normal_cdf((a.mean() - b.mean()) / std::sqrt(var));
}

void RuleParams::validate() const {
  if (tau < 0.0 || gamma < 0.0 || nu < 0.0) {
    throw ConfigError("rule: exponents tau, gamma, nu must be nonnegative");
  }
  if (!(prior_var > 0.0)) throw ConfigError("rule: prior variance must be positive");
  if (clamp) {
    auto [lo, hi] = *clamp;
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
      throw ConfigError("rule: clamp bounds must satisfy 0 <= lo <= hi <= 1");
    }
  }
}

void check_probability_vector(std::span<const double> probs, std::size_t expected_size) {
  if (probs.size() != expected_size) {
    throw ConfigError("rule returned a probability vector of the wrong length");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ConfigError("rule returned a negative or non-finite probability");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbTol) {
    throw ConfigError("rule returned probabilities that do not sum to 1");
  }
}

std::vector<double> bar_sequential_probs(std::span<const NormalArmPosterior> posteriors,
                                         double tau) {
  const int h = static_cast<int>(posteriors.size());
  if (h == 2) {
    const double p = prob_superiority(posteriors[0], posteriors[1]);
    const double num = std::pow(p, tau);
    const double den = num + std::pow(1.0 - p, tau);
    if (den <= 0.0) return {0.5, 0.5};
    return {num / den, 1.0 - num / den};
  }
  // h > 2: compare each arm against the average of the posterior means,
  // treated as a fixed threshold at decision time.
  double mean_bar = 0.0;
  for (const auto& post : posteriors) mean_bar += post.mean();
  mean_bar /= h;
  std::vector<double> weights(h);
  double total = 0.0;
  for (int i = 0; i < h; ++i) {
    const double sd = std::sqrt(posteriors[i].variance());
    const double p = normal_cdf((posteriors[i].mean() - mean_bar) / sd);
    weights[i] = std::pow(p, tau);
    total += weights[i];
  }
  if (total <= 0.0) return std::vector<double>(h, 1.0 / h);
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<double> bar_block_probs(std::span<const NormalArmPosterior> posteriors,
                                    const NormalArmPosterior& control, double gamma) {
  const int h = static_cast<int>(posteriors.size());
  std::vector<double> weights(h);
  double total = 0.0;
  for (int i = 0; i < h; ++i) {
    weights[i] = std::pow(prob_superiority(posteriors[i], control), gamma);
    total += weights[i];
  }
  if (total <= 0.0) return std::vector<double>(h, 1.0 / h);
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<double> bar_adaptive_control_probs(
    std::span<const NormalArmPosterior> posteriors, const NormalArmPosterior& control,
    std::span<const long> arm_sizes, long control_size, double gamma, double nu) {
  const int h = static_cast<int>(posteriors.size());
  std::vector<double> experimental = bar_block_probs(posteriors, control, gamma);
  const long max_size = *std::max_element(arm_sizes.begin(), arm_sizes.end());
  const double gap = static_cast<double>(max_size - control_size);
  const double control_weight =
      (1.0 / h) * std::exp(std::min(nu * gap, kExpClamp));
  std::vector<double> probs(h + 1);
  const double total = control_weight + 1.0;  // experimental entries sum to 1
  probs[0] = control_weight / total;
  for (int i = 0; i < h; ++i) probs[i + 1] = experimental[i] / total;
  return probs;
}

std::vector<double> apply_clamp(std::vector<double> probs,
                                const std::optional<std::pair<double, double>>& clamp) {
  if (!clamp) return probs;
  auto [lo, hi] = *clamp;
  double total = 0.0;
  for (double& p : probs) {
    p = std::clamp(p, lo, hi);
    total += p;
  }
  if (total > 0.0) {
    for (double& p : probs) p /= total;
  }
  return probs;
}

std::unique_ptr<RandomizationRule> make_rule(const std::string& name,
                                             const RuleParams& params,
                                             int num_treatments) {
  params.validate();
  if (name == "equal") return std::make_unique<EqualRule>(num_treatments);
  if (name == "fixed") return std::make_unique<FixedRule>(num_treatments, params.fixed_probs);
  if (name == "inflator") {
    if (num_treatments < 2) throw ConfigError("rule: the inflator needs h >= 2");
    return std::make_unique<InflatorRule>(num_treatments);
  }
  if (name == "bar_yin") return std::make_unique<BarYinRule>(num_treatments, params);
  if (name == "bar_wason") return std::make_unique<BarWasonRule>(num_treatments, params);
  if (name == "bar_adaptive_control") {
    return std::make_unique<BarAdaptiveControlRule>(num_treatments, params);
  }
  throw ConfigError("unknown rule '" + name + "'");
}

}  // namespace raradapt
