#include "raradapt/auxiliary.hpp"

#include "raradapt/rng.hpp"

namespace raradapt {

AuxiliaryDesign generate_auxiliary(const TrialDesign& design, HypothesisSet hypothesis,
                                   std::uint64_t base_seed, AuxPolicy policy) {
  if (hypothesis.empty()) {
    throw ConfigError("auxiliary design: the hypothesis set must be nonempty");
  }
  const std::uint64_t key =
      policy == AuxPolicy::IndependentPerHypothesis ? hypothesis.mask() : 0;
  RngStream rng(hash_combine(base_seed, key));

  const bool adaptive_control = design.regime == Regime::BlockAdaptiveControl;
  const int tail = design.num_experimental - design.burn_in_total();
  const int forced = adaptive_control ? 2 : 1;  // b_{n-1}=0 (adaptive control), b_n in I

  AuxiliaryDesign aux;
  aux.hypothesis = hypothesis;
  aux.post_burn_in.reserve(tail);
  for (int k = 0; k < tail - forced; ++k) {
    if (adaptive_control) {
      aux.post_burn_in.push_back(
          static_cast<int>(rng.uniform_int(design.num_treatments + 1)));
    } else {
      aux.post_burn_in.push_back(
          static_cast<int>(rng.uniform_int(design.num_treatments)) + 1);
    }
  }
  if (adaptive_control) aux.post_burn_in.push_back(0);
  aux.post_burn_in.push_back(hypothesis.lowest());
  return aux;
}

int auxiliary_count_in_set(const TrialDesign& design, const AuxiliaryDesign& aux,
                           HypothesisSet set) {
  int count = 0;
  for (int arm = 1; arm <= design.num_treatments; ++arm) {
    if (set.contains(arm)) count += design.burn_in[arm - 1];
  }
  for (int arm : aux.post_burn_in) {
    if (arm > 0 && set.contains(arm)) ++count;
  }
  return count;
}

int auxiliary_control_count(const TrialDesign& design, const AuxiliaryDesign& aux) {
  int count = design.burn_in_control;
  for (int arm : aux.post_burn_in) {
    if (arm == 0) ++count;
  }
  return count;
}

}  // namespace raradapt
