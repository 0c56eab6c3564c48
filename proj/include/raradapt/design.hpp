#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace raradapt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A nonempty subset of the experimental treatments {1..h}, stored as a bitmask
// (bit i-1 <=> treatment i).
class HypothesisSet {
 public:
  HypothesisSet() = default;
  explicit HypothesisSet(std::uint32_t mask) : mask_(mask) {}
  static HypothesisSet single(int treatment) { return HypothesisSet(1u << (treatment - 1)); }
  static HypothesisSet all(int num_treatments) {
    return HypothesisSet((1u << num_treatments) - 1u);
  }

  bool contains(int treatment) const {
    return treatment >= 1 && (mask_ & (1u << (treatment - 1))) != 0;
  }
  bool empty() const { return mask_ == 0; }
  int size() const { return __builtin_popcount(mask_); }
  std::uint32_t mask() const { return mask_; }
  int lowest() const;  // lowest-indexed member; throws if empty
  std::string label() const;

  friend bool operator==(HypothesisSet a, HypothesisSet b) { return a.mask_ == b.mask_; }

 private:
  std::uint32_t mask_ = 0;
};

// All nonempty subsets of {1..h}, elementary sets first, then by size.
std::vector<HypothesisSet> all_intersections(int num_treatments);

enum class Regime {
  FullySequentialFixedControl,
  BlockFixedControl,
  BlockAdaptiveControl,
};

std::string regime_name(Regime regime);
Regime regime_from_name(const std::string& name);

// Static description of the trial.
//
// num_experimental counts the patients on the experimental arms for the
// fixed-control regimes; in BlockAdaptiveControl it counts all patients and
// arm 0 is the control.
struct TrialDesign {
  Regime regime = Regime::FullySequentialFixedControl;
  int num_treatments = 2;                 // h
  int num_experimental = 0;               // n
  int num_control = 0;                    // n0; derived for adaptive control
  std::vector<int> burn_in;               // r_1..r_h
  int burn_in_control = 0;                // r_0 (block regimes)
  std::vector<int> blocks;                // d_1..d_J
  std::vector<int> control_blocks;        // d_{0,1}..d_{0,J} (BlockFixedControl)
  double alpha = 0.05;

  int burn_in_experimental() const {
    return std::accumulate(burn_in.begin(), burn_in.end(), 0);
  }
  // Total burn-in patients, control included where the control is blocked.
  int burn_in_total() const {
    return burn_in_experimental() +
           (regime == Regime::FullySequentialFixedControl ? 0 : burn_in_control);
  }
  int num_blocks() const { return static_cast<int>(blocks.size()); }

  // Throws ConfigError if any structural invariant fails.
  void validate() const;
};

// True outcome distribution: X ~ N(control_mean + effect[arm-1], outcome_sd^2),
// controls at N(control_mean, outcome_sd^2).
struct ScenarioSpec {
  double control_mean = 0.0;
  std::vector<double> effects;  // delta_1..delta_h
  double outcome_sd = 1.0;

  void validate(int num_treatments) const;
};

}  // namespace raradapt
