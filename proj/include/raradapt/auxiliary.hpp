#pragma once

#include <cstdint>
#include <vector>

#include "raradapt/design.hpp"

namespace raradapt {

enum class AuxPolicy {
  IndependentPerHypothesis,  // each intersection draws its own sequence (default)
  SharedPrefix,              // one prefix per trial; only the forced tail differs
};

// A pre-specified hypothetical allocation sequence for one intersection
// hypothesis. Burn-in positions always replicate the actual design, so only
// the post-burn-in tail is stored. The final allocation lies in the
// hypothesis set (lowest index, for reproducibility); with an adaptive
// control the second-to-last allocation is the control.
struct AuxiliaryDesign {
  HypothesisSet hypothesis;
  std::vector<int> post_burn_in;  // b_{r+1}..b_n

  int arm_at(const TrialDesign& design, int patient_index) const {
    return post_burn_in[patient_index - design.burn_in_total()];
  }
};

// Pure function of (design, I, base_seed, policy): regenerating yields an
// identical sequence. Draws are uniform over {1..h} (over {0..h} with an
// adaptive control) and never look at trial outcomes.
AuxiliaryDesign generate_auxiliary(const TrialDesign& design, HypothesisSet hypothesis,
                                   std::uint64_t base_seed,
                                   AuxPolicy policy = AuxPolicy::IndependentPerHypothesis);

// Count of auxiliary allocations to arms in `set` (burn-in included).
int auxiliary_count_in_set(const TrialDesign& design, const AuxiliaryDesign& aux,
                           HypothesisSet set);
// Count of auxiliary allocations to the control (adaptive-control regime).
int auxiliary_control_count(const TrialDesign& design, const AuxiliaryDesign& aux);

}  // namespace raradapt
