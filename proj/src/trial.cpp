#include "raradapt/trial.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "raradapt/csv.hpp"

namespace raradapt {

namespace {

// Burn-in as a random permutation of the exact multiset {arm i x r_i}, so the
// prescribed counts are hit exactly.
std::vector<int> burn_in_allocation(const TrialDesign& design, RngStream& rng) {
  std::vector<int> arms;
  arms.reserve(design.burn_in_total());
  if (design.regime == Regime::BlockAdaptiveControl) {
    arms.insert(arms.end(), design.burn_in_control, 0);
  }
  for (int arm = 1; arm <= design.num_treatments; ++arm) {
    arms.insert(arms.end(), design.burn_in[arm - 1], arm);
  }
  rng.shuffle(std::span<int>(arms));
  return arms;
}

double draw_outcome(const ScenarioSpec& scenario, int arm, RngStream& rng) {
  const double effect = arm == 0 ? 0.0 : scenario.effects[arm - 1];
  return scenario.control_mean + effect + scenario.outcome_sd * rng.normal();
}

}  // namespace

int TrialData::realized_count(int arm) const {
  return static_cast<int>(std::count(arms.begin(), arms.end(), arm));
}

int TrialData::realized_in_set(HypothesisSet set) const {
  int count = 0;
  for (int arm : arms) {
    if (arm > 0 && set.contains(arm)) ++count;
  }
  return count;
}

double TrialData::control_outcome_sum() const {
  if (design.regime == Regime::BlockAdaptiveControl) {
    double sum = 0.0;
    for (std::size_t k = 0; k < arms.size(); ++k) {
      if (arms[k] == 0) sum += outcomes[k];
    }
    return sum;
  }
  double sum = 0.0;
  for (double x : control_outcomes) sum += x;
  return sum;
}

int TrialData::block_begin(int block) const {
  if (block == 0) return 0;
  int begin = design.burn_in_total();
  for (int j = 1; j < block; ++j) begin += design.blocks[j - 1];
  return begin;
}

int TrialData::block_end(int block) const {
  if (block == 0) return design.burn_in_total();
  return block_begin(block) + design.blocks[block - 1];
}

int TrialData::control_block_begin(int block) const {
  if (block == 0) return 0;
  int begin = design.burn_in_control;
  for (int j = 1; j < block; ++j) begin += design.control_blocks[j - 1];
  return begin;
}

int TrialData::control_block_end(int block) const {
  if (block == 0) return design.burn_in_control;
  return control_block_begin(block) + design.control_blocks[block - 1];
}

void TrialData::validate_against_design() const {
  if (static_cast<int>(arms.size()) != design.num_experimental ||
      arms.size() != outcomes.size()) {
    throw ConfigError("trial data: allocation count does not match the design");
  }
  if (design.regime != Regime::BlockAdaptiveControl &&
      static_cast<int>(control_outcomes.size()) != design.num_control) {
    throw ConfigError("trial data: control count does not match the design");
  }
  // Burn-in must contain exactly the prescribed per-arm counts.
  std::vector<int> counts(design.num_treatments + 1, 0);
  for (int k = 0; k < design.burn_in_total(); ++k) {
    const int arm = arms[k];
    if (arm < 0 || arm > design.num_treatments ||
        (arm == 0 && design.regime != Regime::BlockAdaptiveControl)) {
      throw ConfigError("trial data: allocation outside the design's arms");
    }
    ++counts[arm];
  }
  for (int arm = 1; arm <= design.num_treatments; ++arm) {
    if (counts[arm] != design.burn_in[arm - 1]) {
      throw ConfigError("trial data: burn-in counts do not match the design");
    }
  }
  if (design.regime == Regime::BlockAdaptiveControl &&
      counts[0] != design.burn_in_control) {
    throw ConfigError("trial data: control burn-in does not match the design");
  }
  for (int k = design.burn_in_total(); k < static_cast<int>(arms.size()); ++k) {
    const int arm = arms[k];
    const int lo = design.regime == Regime::BlockAdaptiveControl ? 0 : 1;
    if (arm < lo || arm > design.num_treatments) {
      throw ConfigError("trial data: allocation outside the design's arms");
    }
  }
}

TrialData run_sequential_trial(const TrialDesign& design, const RandomizationRule& rule,
                               const ScenarioSpec& scenario, RngStream& rng) {
  design.validate();
  scenario.validate(design.num_treatments);
  if (design.regime != Regime::FullySequentialFixedControl) {
    throw ConfigError("run_sequential_trial needs the sequential regime");
  }
  TrialData trial;
  trial.design = design;
  trial.arms = burn_in_allocation(design, rng);
  trial.outcomes.reserve(design.num_experimental);
  for (int arm : trial.arms) trial.outcomes.push_back(draw_outcome(scenario, arm, rng));

  for (int k = design.burn_in_total(); k < design.num_experimental; ++k) {
    ArmHistory history{design.num_treatments, trial.arms, trial.outcomes};
    std::vector<double> probs = rule.sequential_probabilities(history);
    check_probability_vector(probs, static_cast<std::size_t>(design.num_treatments));
    const int arm = static_cast<int>(rng.categorical(probs)) + 1;
    trial.arms.push_back(arm);
    trial.outcomes.push_back(draw_outcome(scenario, arm, rng));
  }
  trial.control_outcomes.reserve(design.num_control);
  for (int j = 0; j < design.num_control; ++j) {
    trial.control_outcomes.push_back(draw_outcome(scenario, 0, rng));
  }
  return trial;
}

TrialData run_block_trial(const TrialDesign& design, const RandomizationRule& rule,
                          const ScenarioSpec& scenario, RngStream& rng) {
  design.validate();
  scenario.validate(design.num_treatments);
  const bool adaptive_control = design.regime == Regime::BlockAdaptiveControl;
  if (design.regime == Regime::FullySequentialFixedControl) {
    throw ConfigError("run_block_trial needs a block regime");
  }
  TrialData trial;
  trial.design = design;
  trial.arms = burn_in_allocation(design, rng);
  for (int arm : trial.arms) trial.outcomes.push_back(draw_outcome(scenario, arm, rng));
  if (!adaptive_control) {
    for (int j = 0; j < design.burn_in_control; ++j) {
      trial.control_outcomes.push_back(draw_outcome(scenario, 0, rng));
    }
  }

  for (int block = 1; block <= design.num_blocks(); ++block) {
    // Probabilities are frozen at the block boundary.
    BlockHistory history{design.num_treatments, trial.arms, trial.outcomes,
                         trial.control_outcomes};
    std::vector<double> probs;
    int offset;  // categorical index -> arm
    if (adaptive_control) {
      probs = rule.adaptive_control_probabilities(history);
      check_probability_vector(probs, static_cast<std::size_t>(design.num_treatments + 1));
      offset = 0;
    } else {
      probs = rule.block_probabilities(history);
      check_probability_vector(probs, static_cast<std::size_t>(design.num_treatments));
      offset = 1;
    }
    for (int i = 0; i < design.blocks[block - 1]; ++i) {
      const int arm = static_cast<int>(rng.categorical(probs)) + offset;
      trial.arms.push_back(arm);
      trial.outcomes.push_back(draw_outcome(scenario, arm, rng));
    }
    if (!adaptive_control) {
      for (int j = 0; j < design.control_blocks[block - 1]; ++j) {
        trial.control_outcomes.push_back(draw_outcome(scenario, 0, rng));
      }
    }
  }
  trial.validate_against_design();
  return trial;
}

TrialData run_trial(const TrialDesign& design, const RandomizationRule& rule,
                    const ScenarioSpec& scenario, RngStream& rng) {
  return design.regime == Regime::FullySequentialFixedControl
             ? run_sequential_trial(design, rule, scenario, rng)
             : run_block_trial(design, rule, scenario, rng);
}

void TrialData::write_csv(std::ostream& out) const {
  out << "index,block,arm,outcome\n";
  const bool blocked = design.regime != Regime::FullySequentialFixedControl;
  auto block_of = [&](int k) {
    if (!blocked) return k < design.burn_in_total() ? 0 : 1;
    for (int block = 0; block <= design.num_blocks(); ++block) {
      if (k < block_end(block)) return block;
    }
    return design.num_blocks();
  };
  int index = 1;
  for (std::size_t k = 0; k < arms.size(); ++k, ++index) {
    out << index << ',' << block_of(static_cast<int>(k)) << ',' << arms[k] << ','
        << format_double(outcomes[k]) << '\n';
  }
  auto control_block_of = [&](int j) {
    if (design.regime != Regime::BlockFixedControl) return 0;
    for (int block = 0; block <= design.num_blocks(); ++block) {
      if (j < control_block_end(block)) return block;
    }
    return design.num_blocks();
  };
  for (std::size_t j = 0; j < control_outcomes.size(); ++j, ++index) {
    out << index << ',' << control_block_of(static_cast<int>(j)) << ",0,"
        << format_double(control_outcomes[j]) << '\n';
  }
}

TrialData read_trial_rows(std::istream& in, const TrialDesign& design) {
  CsvReader reader(in);
  reader.expect_header({"index", "block", "arm", "outcome"});
  TrialData trial;
  trial.design = design;
  std::vector<std::string> row;
  while (reader.next_row(row)) {
    const int arm = parse_int(row[2], "arm");
    const double outcome = parse_double(row[3], "outcome");
    if (arm == 0 && design.regime != Regime::BlockAdaptiveControl) {
      trial.control_outcomes.push_back(outcome);
    } else {
      if (arm < 0 || arm > design.num_treatments) {
        throw ConfigError("trial data: unknown arm index " + row[2]);
      }
      trial.arms.push_back(arm);
      trial.outcomes.push_back(outcome);
    }
  }
  trial.validate_against_design();
  return trial;
}

TrialData TrialData::read_csv(std::istream& in, const TrialDesign& design) {
  return read_trial_rows(in, design);
}

}  // namespace raradapt
