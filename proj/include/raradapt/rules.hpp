#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raradapt/design.hpp"

namespace raradapt {

// Conjugate normal posterior for one arm's mean, unit outcome variance.
struct NormalArmPosterior {
  double prior_mean = 0.0;
  double prior_var = 1.0;
  long count = 0;
  double outcome_sum = 0.0;

  NormalArmPosterior updated(double outcome) const {
    NormalArmPosterior next = *this;
    ++next.count;
    next.outcome_sum += outcome;
    return next;
  }

  double mean() const {
    return (prior_var * outcome_sum + prior_mean) /
           (1.0 + static_cast<double>(count) * prior_var);
  }
  double variance() const {
    return prior_var / (1.0 + static_cast<double>(count) * prior_var);
  }
};

// P(mu_a > mu_b) for independent normal posteriors.
double prob_superiority(const NormalArmPosterior& a, const NormalArmPosterior& b);

struct RuleParams {
  double tau = 0.5;    // sequential BAR exponent
  double gamma = 0.5;  // block BAR exponent
  double nu = 0.1;     // adaptive-control matching exponent
  double prior_mean = 0.0;
  double prior_var = 1.0;
  std::vector<double> fixed_probs;  // "fixed" rule
  std::optional<std::pair<double, double>> clamp;  // allocation bounds, off by default

  void validate() const;
};

// What a fully sequential rule is allowed to see: experimental-arm history
// only. The control data never crosses this interface.
struct ArmHistory {
  int num_treatments = 0;
  std::span<const int> arms;        // a_1..a_k (values 1..h)
  std::span<const double> outcomes; // X_1..X_k
};

// Block rules additionally see the control outcomes available at the previous
// block boundary. In the adaptive-control regime arms may contain 0 entries
// and control_outcomes is empty (controls live in the main sequence).
struct BlockHistory {
  int num_treatments = 0;
  std::span<const int> arms;
  std::span<const double> outcomes;
  std::span<const double> control_outcomes;
};

struct IncompatibleRuleError : ConfigError {
  using ConfigError::ConfigError;
};

class RandomizationRule {
 public:
  virtual ~RandomizationRule() = default;
  virtual std::string name() const = 0;

  // Probability vector over treatments 1..h.
  virtual std::vector<double> sequential_probabilities(const ArmHistory&) const {
    throw IncompatibleRuleError("rule '" + name() + "' cannot drive a fully sequential trial");
  }
  // Probability vector over treatments 1..h, evaluated at a block boundary.
  virtual std::vector<double> block_probabilities(const BlockHistory&) const {
    throw IncompatibleRuleError("rule '" + name() + "' cannot drive a block trial");
  }
  // Probability vector over {control, 1..h} (index 0 = control).
  virtual std::vector<double> adaptive_control_probabilities(const BlockHistory&) const {
    throw IncompatibleRuleError("rule '" + name() +
                                "' cannot drive an adaptive-control trial");
  }
};

// Rule names accepted in configs: equal | fixed | inflator | bar_yin |
// bar_wason | bar_adaptive_control.
std::unique_ptr<RandomizationRule> make_rule(const std::string& name,
                                             const RuleParams& params,
                                             int num_treatments);

// Building blocks, exposed for direct use and for tests.
std::vector<double> bar_sequential_probs(std::span<const NormalArmPosterior> posteriors,
                                         double tau);
std::vector<double> bar_block_probs(std::span<const NormalArmPosterior> posteriors,
                                    const NormalArmPosterior& control, double gamma);
std::vector<double> bar_adaptive_control_probs(
    std::span<const NormalArmPosterior> posteriors, const NormalArmPosterior& control,
    std::span<const long> arm_sizes, long control_size, double gamma, double nu);
std::vector<double> apply_clamp(std::vector<double> probs,
                                const std::optional<std::pair<double, double>>& clamp);

// Throws ConfigError unless entries are nonnegative and sum to 1 within tol.
void check_probability_vector(std::span<const double> probs, std::size_t expected_size);

}  // namespace raradapt
