#pragma once

#include <iosfwd>
#include <vector>

#include "raradapt/design.hpp"
#include "raradapt/rng.hpp"
#include "raradapt/rules.hpp"

namespace raradapt {

// Realized allocations and outcomes for one trial. Immutable once built.
//
// Fixed-control regimes: arms/outcomes hold the n experimental patients in
// allocation order and control_outcomes the n0 controls. In the adaptive
// control regime everything lives in arms/outcomes (arm 0 = control) and
// control_outcomes stays empty.
struct TrialData {
  TrialDesign design;
  std::vector<int> arms;
  std::vector<double> outcomes;
  std::vector<double> control_outcomes;

  int realized_count(int arm) const;
  int realized_in_set(HypothesisSet set) const;
  int realized_control_count() const {
    return design.regime == Regime::BlockAdaptiveControl
               ? realized_count(0)
               : static_cast<int>(control_outcomes.size());
  }
  double control_outcome_sum() const;

  // Index of the first patient of adaptive block j (1-based blocks), within
  // the experimental sequence. Block 0 is the burn-in.
  int block_begin(int block) const;
  int block_end(int block) const;
  int control_block_begin(int block) const;
  int control_block_end(int block) const;

  void validate_against_design() const;

  // CSV with header index,block,arm,outcome; control rows use arm=0.
  void write_csv(std::ostream& out) const;
  static TrialData read_csv(std::istream& in, const TrialDesign& design);
};

TrialData run_sequential_trial(const TrialDesign& design, const RandomizationRule& rule,
                               const ScenarioSpec& scenario, RngStream& rng);
TrialData run_block_trial(const TrialDesign& design, const RandomizationRule& rule,
                          const ScenarioSpec& scenario, RngStream& rng);

// Dispatches on the design's regime.
TrialData run_trial(const TrialDesign& design, const RandomizationRule& rule,
                    const ScenarioSpec& scenario, RngStream& rng);

}  // namespace raradapt
