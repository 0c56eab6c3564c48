#pragma once

#include <optional>
#include <vector>

#include "raradapt/auxiliary.hpp"
#include "raradapt/design.hpp"
#include "raradapt/trial.hpp"

namespace raradapt {

enum class ScheduleStatus { Valid, ImaginaryWeights, Failed };

// Solution of one conditional-moment match. The two-unknown systems solved
// here are quadratics; `treatment`/`control` carry the selected root pair.
struct MomentSolution {
  ScheduleStatus status = ScheduleStatus::Valid;
  double treatment = 0.0;
  double control = 0.0;
};

// Solve  mI/wI - m0/w0 = lambda,  mI/wI^2 + m0/w0^2 = eta  for (wI, w0).
// Root selection follows the recursion's continuity branch (it reproduces the
// published worked examples); a double root within tolerance of zero
// discriminant counts as real. lambda^2 == m0*eta leaves the system without a
// usable root pair and yields Failed.
MomentSolution moment_match_solve(double lambda, double eta, double m_treat, double m_ctrl);

// Solve  -(n1/w1 + n2/w2) = lambda,  n1/w1^2 + n2/w2^2 = eta  (control split).
MomentSolution solve_control_split(double lambda, double eta, double n1, double n2);

// Solve  n1/w1 + n2/w2 = lambda,  n1/w1^2 + n2/w2^2 = eta  (treatment split).
MomentSolution solve_treatment_split(double lambda, double eta, double n1, double n2);

enum class FinalSplitKind { None, Control, Treatment };

// Weight schedule for one intersection hypothesis.
//
// Sequential regime: treatment_weights has one entry per patient (the entry
// for patient n is unused when a_n lies outside the hypothesis set);
// control weights resolve to the final two-group split over the n0 controls.
//
// Block regimes: treatment_weights/control_weights have one entry per block
// (index 0 = burn-in). When the final block engages a split branch, its
// per-block entries are absent and split_* describe the two groups.
struct WeightSchedule {
  ScheduleStatus status = ScheduleStatus::Valid;
  HypothesisSet hypothesis;
  int aux_treatment_count = 0;  // n_I'
  int aux_control_count = 0;    // n_0 (fixed control) or n_0'
  std::vector<double> treatment_weights;
  std::vector<double> control_weights;
  FinalSplitKind final_split = FinalSplitKind::None;
  int split_n1 = 0, split_n2 = 0;
  double split_w1 = 0.0, split_w2 = 0.0;
  bool negative_treatment_weight = false;
  bool negative_control_weight = false;  // informational

  bool valid() const { return status == ScheduleStatus::Valid; }
};

// Appendix-style weight recursions. The split arguments default to the
// published recommendation (all but one observation in the first group).
WeightSchedule weights_sequential(const TrialData& trial, const AuxiliaryDesign& aux,
                                  std::optional<std::pair<int, int>> control_split = {});
WeightSchedule weights_block_fixed(const TrialData& trial, const AuxiliaryDesign& aux,
                                   std::optional<std::pair<int, int>> final_split = {});
WeightSchedule weights_block_adaptive_control(const TrialData& trial,
                                              const AuxiliaryDesign& aux);

// Dispatches on the trial's regime.
WeightSchedule compute_weights(const TrialData& trial, const AuxiliaryDesign& aux,
                               std::optional<std::pair<int, int>> split = {});

struct AnomalyReport {
  bool imaginary = false;
  bool failed = false;
  bool negative_treatment = false;
  bool negative_control = false;  // informational, outside the composite-null argument

  bool any() const { return imaginary || failed || negative_treatment; }
};

AnomalyReport detect_weight_anomalies(const WeightSchedule& schedule);

}  // namespace raradapt
