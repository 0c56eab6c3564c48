#include "raradapt/weights.hpp"

#include <cmath>

namespace raradapt {

namespace {

// Rounding slack: a discriminant this far below zero still counts as a double
// root rather than an imaginary pair.
constexpr double kDiscriminantTol = 1e-9;
constexpr double kDegenerateTol = 1e-12;

// One Newton step on A w^2 + B w + C sharpens the closed-form root without
// changing the branch.
double polish_root(double w, double A, double B, double C) {
  const double slope = 2.0 * A * w + B;
  if (slope == 0.0 || !std::isfinite(slope)) return w;
  const double value = (A * w + B) * w + C;
  const double next = w - value / slope;
  return std::isfinite(next) ? next : w;
}

struct BlockCounts {
  std::vector<int> aux_in_set;    // m_{I,l}, index 1..J (+ sentinel J+1 = 0)
  std::vector<int> aux_control;   // m_{0,l}
  std::vector<int> act_in_set;    // actual in-set count in block l
  std::vector<int> act_control;   // actual control count in block l
};

}  // namespace

MomentSolution moment_match_solve(double lambda, double eta, double m_treat,
                                  double m_ctrl) {
  MomentSolution out;
  const double A = lambda * lambda - m_ctrl * eta;
  double disc = m_treat * m_ctrl * (eta * (m_ctrl + m_treat) - lambda * lambda);
  if (disc < 0.0 && disc > -kDiscriminantTol) disc = 0.0;
  if (disc < 0.0) {
    out.status = ScheduleStatus::ImaginaryWeights;
    return out;
  }
  const double scale = std::max({lambda * lambda, m_ctrl * eta, 1e-300});
  if (std::fabs(A) < kDegenerateTol * scale) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  double w_treat = (lambda * m_treat - std::sqrt(disc)) / A;
  w_treat = polish_root(w_treat, A, -2.0 * m_treat * lambda, m_treat * (m_ctrl + m_treat));
  const double denom = m_treat - lambda * w_treat;
  if (w_treat == 0.0 || denom == 0.0 || !std::isfinite(w_treat)) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  out.treatment = w_treat;
  out.control = m_ctrl * w_treat / denom;
  if (!std::isfinite(out.control)) out.status = ScheduleStatus::Failed;
  return out;
}

MomentSolution solve_control_split(double lambda, double eta, double n1, double n2) {
  MomentSolution out;
  const double A = lambda * lambda - n2 * eta;
  double disc = n1 * n2 * (eta * (n1 + n2) - lambda * lambda);
  if (disc < 0.0 && disc > -kDiscriminantTol) disc = 0.0;
  if (disc < 0.0) {
    out.status = ScheduleStatus::ImaginaryWeights;
    return out;
  }
  const double scale = std::max({lambda * lambda, n2 * eta, 1e-300});
  if (std::fabs(A) < kDegenerateTol * scale) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  double w1 = (-n1 * lambda - std::sqrt(disc)) / A;
  w1 = polish_root(w1, A, 2.0 * n1 * lambda, n1 * (n1 + n2));
  const double denom = n1 + lambda * w1;
  if (w1 == 0.0 || denom == 0.0 || !std::isfinite(w1)) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  out.treatment = w1;  // first control group
  out.control = -n2 * w1 / denom;
  if (!std::isfinite(out.control)) out.status = ScheduleStatus::Failed;
  return out;
}

MomentSolution solve_treatment_split(double lambda, double eta, double n1, double n2) {
  MomentSolution out;
  const double A = lambda * lambda - n2 * eta;
  double disc = n1 * n2 * (eta * (n1 + n2) - lambda * lambda);
  if (disc < 0.0 && disc > -kDiscriminantTol) disc = 0.0;
  if (disc < 0.0) {
    out.status = ScheduleStatus::ImaginaryWeights;
    return out;
  }
  const double scale = std::max({lambda * lambda, n2 * eta, 1e-300});
  if (std::fabs(A) < kDegenerateTol * scale) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  double w1 = (n1 * lambda - std::sqrt(disc)) / A;
  w1 = polish_root(w1, A, -2.0 * n1 * lambda, n1 * (n1 + n2));
  const double denom = lambda * w1 - n1;
  if (w1 == 0.0 || denom == 0.0 || !std::isfinite(w1)) {
    out.status = ScheduleStatus::Failed;
    return out;
  }
  out.treatment = w1;  // first treatment group
  out.control = n2 * w1 / denom;
  if (!std::isfinite(out.control)) out.status = ScheduleStatus::Failed;
  return out;
}

WeightSchedule weights_sequential(const TrialData& trial, const AuxiliaryDesign& aux,
                                  std::optional<std::pair<int, int>> control_split) {
  const TrialDesign& design = trial.design;
  if (design.regime != Regime::FullySequentialFixedControl) {
    throw ConfigError("weights_sequential needs the sequential regime");
  }
  const HypothesisSet set = aux.hypothesis;
  const int n = design.num_experimental;
  const int n0 = design.num_control;
  const int r = design.burn_in_total();
  auto [m01, m02] = control_split.value_or(std::pair<int, int>{n0 - 1, 1});
  if (m01 <= 0 || m02 <= 0 || m01 + m02 != n0) {
    throw ConfigError("weights: control split must be positive and sum to n0");
  }

  WeightSchedule sched;
  sched.hypothesis = set;
  sched.aux_treatment_count = auxiliary_count_in_set(design, aux, set);
  sched.aux_control_count = n0;

  // Remaining in-set auxiliary allocations from patient k on.
  int remaining = 0;
  for (int arm : aux.post_burn_in) {
    if (set.contains(arm)) ++remaining;
  }

  double w_treat = sched.aux_treatment_count;
  double w_ctrl = n0;
  sched.treatment_weights.assign(n, w_treat);
  sched.control_weights.assign(1, w_ctrl);

  for (int k = r; k < n; ++k) {
    const bool actual_in = set.contains(trial.arms[k]);
    const bool aux_in = set.contains(aux.arm_at(design, k));
    const double lambda = remaining / w_treat - n0 / w_ctrl;
    const double eta =
        remaining / (w_treat * w_treat) + n0 / (w_ctrl * w_ctrl);
    const int modified = remaining + (actual_in && !aux_in ? 1 : 0) -
                         (!actual_in && aux_in ? 1 : 0);
    if (k + 1 < n) {
      if (modified != remaining) {
        MomentSolution sol = moment_match_solve(lambda, eta, modified, n0);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        w_treat = sol.treatment;
        w_ctrl = sol.control;
      }
      sched.treatment_weights[k] = w_treat;
      if (w_treat < 0.0) sched.negative_treatment_weight = true;
      remaining = modified - (actual_in ? 1 : 0);
    } else {
      // Final step: b_n lies in the set by construction, so remaining == 1.
      if (actual_in) {
        sched.treatment_weights[k] = w_treat;
        if (w_treat < 0.0) sched.negative_treatment_weight = true;
        sched.final_split = FinalSplitKind::Control;
        sched.split_n1 = m01;
        sched.split_n2 = m02;
        sched.split_w1 = w_ctrl;
        sched.split_w2 = w_ctrl;
      } else {
        MomentSolution sol = solve_control_split(lambda, eta, m01, m02);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.treatment_weights[k] = w_treat;  // unused: no in-set patient at n
        sched.final_split = FinalSplitKind::Control;
        sched.split_n1 = m01;
        sched.split_n2 = m02;
        sched.split_w1 = sol.treatment;
        sched.split_w2 = sol.control;
      }
    }
  }
  sched.control_weights[0] = w_ctrl;
  if (sched.split_w1 < 0.0 || sched.split_w2 < 0.0) sched.negative_control_weight = true;
  return sched;
}

namespace {

BlockCounts block_counts(const TrialData& trial, const AuxiliaryDesign& aux,
                         HypothesisSet set, bool adaptive_control) {
  const TrialDesign& design = trial.design;
  const int J = design.num_blocks();
  BlockCounts counts;
  counts.aux_in_set.assign(J + 2, 0);
  counts.aux_control.assign(J + 2, 0);
  counts.act_in_set.assign(J + 1, 0);
  counts.act_control.assign(J + 1, 0);
  for (int block = J; block >= 1; --block) {
    int aux_in = 0, aux_ctrl = 0;
    for (int k = trial.block_begin(block); k < trial.block_end(block); ++k) {
      const int aux_arm = aux.arm_at(design, k);
      if (aux_arm > 0 && set.contains(aux_arm)) ++aux_in;
      if (aux_arm == 0) ++aux_ctrl;
      if (set.contains(trial.arms[k])) ++counts.act_in_set[block];
      if (trial.arms[k] == 0) ++counts.act_control[block];
    }
    counts.aux_in_set[block] = counts.aux_in_set[block + 1] + aux_in;
    counts.aux_control[block] = counts.aux_control[block + 1] + aux_ctrl;
    if (!adaptive_control) {
      counts.aux_control[block] =
          counts.aux_control[block + 1] + design.control_blocks[block - 1];
    }
  }
  return counts;
}

}  // namespace

WeightSchedule weights_block_fixed(const TrialData& trial, const AuxiliaryDesign& aux,
                                   std::optional<std::pair<int, int>> final_split) {
  const TrialDesign& design = trial.design;
  if (design.regime != Regime::BlockFixedControl) {
    throw ConfigError("weights_block_fixed needs the block fixed-control regime");
  }
  const HypothesisSet set = aux.hypothesis;
  const int J = design.num_blocks();
  const int n0 = design.num_control;

  WeightSchedule sched;
  sched.hypothesis = set;
  sched.aux_treatment_count = auxiliary_count_in_set(design, aux, set);
  sched.aux_control_count = n0;

  BlockCounts counts = block_counts(trial, aux, set, false);

  double w_treat = sched.aux_treatment_count;
  double w_ctrl = n0;
  sched.treatment_weights.assign(J + 1, w_treat);
  sched.control_weights.assign(J + 1, w_ctrl);

  for (int block = 1; block <= J; ++block) {
    const double m_aux = counts.aux_in_set[block];
    const double m_ctrl = counts.aux_control[block];
    const double lambda = m_aux / w_treat - m_ctrl / w_ctrl;
    const double eta = m_aux / (w_treat * w_treat) + m_ctrl / (w_ctrl * w_ctrl);
    if (block < J) {
      const int modified = counts.aux_in_set[block + 1] + counts.act_in_set[block];
      if (modified != counts.aux_in_set[block]) {
        MomentSolution sol = moment_match_solve(lambda, eta, modified, m_ctrl);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        w_treat = sol.treatment;
        w_ctrl = sol.control;
      }
      sched.treatment_weights[block] = w_treat;
      sched.control_weights[block] = w_ctrl;
      if (w_treat < 0.0) sched.negative_treatment_weight = true;
      if (w_ctrl < 0.0) sched.negative_control_weight = true;
    } else {
      const int in_final = counts.act_in_set[J];
      const int d0J = design.control_blocks[J - 1];
      if (in_final > 0) {
        MomentSolution sol = moment_match_solve(lambda, eta, in_final, d0J);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.treatment_weights[J] = sol.treatment;
        sched.control_weights[J] = sol.control;
        if (sol.treatment < 0.0) sched.negative_treatment_weight = true;
        if (sol.control < 0.0) sched.negative_control_weight = true;
      } else {
        // No final-block allocation lands in the set: split the final control
        // block in two (Theorem 2's corollary).
        auto [n1, n2] = final_split.value_or(std::pair<int, int>{d0J - 1, 1});
        if (n1 <= 0 || n2 <= 0 || n1 + n2 != d0J) {
          throw ConfigError("weights: final control split must be positive and sum to d0J");
        }
        MomentSolution sol = solve_control_split(lambda, eta, n1, n2);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.final_split = FinalSplitKind::Control;
        sched.split_n1 = n1;
        sched.split_n2 = n2;
        sched.split_w1 = sol.treatment;
        sched.split_w2 = sol.control;
        if (sol.treatment < 0.0 || sol.control < 0.0) sched.negative_control_weight = true;
      }
    }
  }
  return sched;
}

WeightSchedule weights_block_adaptive_control(const TrialData& trial,
                                              const AuxiliaryDesign& aux) {
  const TrialDesign& design = trial.design;
  if (design.regime != Regime::BlockAdaptiveControl) {
    throw ConfigError("weights_block_adaptive_control needs the adaptive-control regime");
  }
  const HypothesisSet set = aux.hypothesis;
  const int J = design.num_blocks();

  WeightSchedule sched;
  sched.hypothesis = set;
  sched.aux_treatment_count = auxiliary_count_in_set(design, aux, set);
  sched.aux_control_count = auxiliary_control_count(design, aux);

  BlockCounts counts = block_counts(trial, aux, set, true);

  double w_treat = sched.aux_treatment_count;
  double w_ctrl = sched.aux_control_count;
  sched.treatment_weights.assign(J + 1, w_treat);
  sched.control_weights.assign(J + 1, w_ctrl);

  for (int block = 1; block <= J; ++block) {
    const double m_aux = counts.aux_in_set[block];
    const double m_ctrl = counts.aux_control[block];
    const double lambda = m_aux / w_treat - m_ctrl / w_ctrl;
    const double eta = m_aux / (w_treat * w_treat) + m_ctrl / (w_ctrl * w_ctrl);
    if (block < J) {
      const int mod_treat = counts.aux_in_set[block + 1] + counts.act_in_set[block];
      const int mod_ctrl = counts.aux_control[block + 1] + counts.act_control[block];
      if (mod_treat != counts.aux_in_set[block] || mod_ctrl != counts.aux_control[block]) {
        MomentSolution sol = moment_match_solve(lambda, eta, mod_treat, mod_ctrl);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        w_treat = sol.treatment;
        w_ctrl = sol.control;
      }
      sched.treatment_weights[block] = w_treat;
      sched.control_weights[block] = w_ctrl;
      if (w_treat < 0.0) sched.negative_treatment_weight = true;
      if (w_ctrl < 0.0) sched.negative_control_weight = true;
    } else {
      const int in_final = counts.act_in_set[J];
      const int ctrl_final = counts.act_control[J];
      if (in_final > 0 && ctrl_final > 0) {
        MomentSolution sol = moment_match_solve(lambda, eta, in_final, ctrl_final);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.treatment_weights[J] = sol.treatment;
        sched.control_weights[J] = sol.control;
        if (sol.treatment < 0.0) sched.negative_treatment_weight = true;
        if (sol.control < 0.0) sched.negative_control_weight = true;
      } else if (in_final == 0 && ctrl_final > 1) {
        MomentSolution sol = solve_control_split(lambda, eta, ctrl_final - 1, 1);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.final_split = FinalSplitKind::Control;
        sched.split_n1 = ctrl_final - 1;
        sched.split_n2 = 1;
        sched.split_w1 = sol.treatment;
        sched.split_w2 = sol.control;
        if (sol.treatment < 0.0 || sol.control < 0.0) sched.negative_control_weight = true;
      } else if (ctrl_final == 0 && in_final > 1) {
        MomentSolution sol = solve_treatment_split(lambda, eta, in_final - 1, 1);
        if (sol.status != ScheduleStatus::Valid) {
          sched.status = sol.status;
          return sched;
        }
        sched.final_split = FinalSplitKind::Treatment;
        sched.split_n1 = in_final - 1;
        sched.split_n2 = 1;
        sched.split_w1 = sol.treatment;
        sched.split_w2 = sol.control;
        if (sol.treatment < 0.0 || sol.control < 0.0) sched.negative_treatment_weight = true;
      } else {
        // max <= 1 with min == 0: the conditional moments cannot be matched.
        sched.status = ScheduleStatus::Failed;
        return sched;
      }
    }
  }
  return sched;
}

WeightSchedule compute_weights(const TrialData& trial, const AuxiliaryDesign& aux,
                               std::optional<std::pair<int, int>> split) {
  switch (trial.design.regime) {
    case Regime::FullySequentialFixedControl:
      return weights_sequential(trial, aux, split);
    case Regime::BlockFixedControl:
      return weights_block_fixed(trial, aux, split);
    case Regime::BlockAdaptiveControl:
      return weights_block_adaptive_control(trial, aux);
  }
  throw ConfigError("compute_weights: unknown regime");
}

AnomalyReport detect_weight_anomalies(const WeightSchedule& schedule) {
  AnomalyReport report;
  report.imaginary = schedule.status == ScheduleStatus::ImaginaryWeights;
  report.failed = schedule.status == ScheduleStatus::Failed;
  report.negative_treatment =
      schedule.valid() && schedule.negative_treatment_weight;
  report.negative_control = schedule.valid() && schedule.negative_control_weight;
  return report;
}

}  // namespace raradapt
