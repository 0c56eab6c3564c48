#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "raradapt/auxiliary.hpp"
#include "raradapt/presets.hpp"
#include "raradapt/trial.hpp"

using namespace raradapt;

namespace {

TrialDesign small_sequential() {
  TrialDesign design;
  design.regime = Regime::FullySequentialFixedControl;
  design.num_treatments = 2;
  design.num_experimental = 60;
  design.num_control = 60;
  design.burn_in = {5, 5};
  return design;
}

// Records every decision point the engine hands to the rule.
struct ProbeRule final : RandomizationRule {
  mutable std::vector<std::size_t> sequential_calls;
  mutable std::vector<std::size_t> block_calls;
  mutable std::vector<std::size_t> block_control_sizes;
  std::string name() const override { return "probe"; }
  std::vector<double> sequential_probabilities(const ArmHistory& history) const override {
    REQUIRE(history.arms.size() == history.outcomes.size());
    sequential_calls.push_back(history.arms.size());
    return std::vector<double>(history.num_treatments, 1.0 / history.num_treatments);
  }
  std::vector<double> block_probabilities(const BlockHistory& history) const override {
    block_calls.push_back(history.arms.size());
    block_control_sizes.push_back(history.control_outcomes.size());
    return std::vector<double>(history.num_treatments, 1.0 / history.num_treatments);
  }
};

struct BadRule final : RandomizationRule {
  std::string name() const override { return "bad"; }
  std::vector<double> sequential_probabilities(const ArmHistory&) const override {
    return {0.7, 0.7};
  }
};

}  // namespace

TEST_CASE("burn-in assigns the exact counts") {
  TrialDesign design = small_sequential();
  auto rule = make_rule("equal", {}, 2);
  ScenarioSpec scenario{0.0, {0.0, 0.0}, 1.0};
  for (int rep = 0; rep < 50; ++rep) {
    RngStream rng = RngStream::keyed(1, rep, StreamKind::Trial);
    TrialData trial = run_sequential_trial(design, *rule, scenario, rng);
    const int ones = static_cast<int>(
        std::count(trial.arms.begin(), trial.arms.begin() + 10, 1));
    CHECK(ones == 5);  // five 1s and five 2s in the first ten allocations
    CHECK(trial.realized_count(1) + trial.realized_count(2) == 60);
    CHECK(trial.control_outcomes.size() == 60);
  }
}

TEST_CASE("inflator allocates arm 2 exactly when arm 1's running mean exceeds 0.5") {
  TrialDesign design = small_sequential();
  auto rule = make_rule("inflator", {}, 2);
  ScenarioSpec scenario{0.0, {0.0, 1.0}, 1.0};
  for (int rep = 0; rep < 30; ++rep) {
    RngStream rng = RngStream::keyed(2, rep, StreamKind::Trial);
    TrialData trial = run_sequential_trial(design, *rule, scenario, rng);
    for (int k = 10; k < 60; ++k) {
      double sum = 0.0;
      int count = 0;
      for (int j = 0; j < k; ++j) {
        if (trial.arms[j] == 1) {
          sum += trial.outcomes[j];
          ++count;
        }
      }
      const bool triggered = sum / count > 0.5;
      CHECK(trial.arms[k] == (triggered ? 2 : 1));
    }
  }
}

TEST_CASE("a rule returning a non-probability vector is rejected") {
  TrialDesign design = small_sequential();
  BadRule rule;
  ScenarioSpec scenario{0.0, {0.0, 0.0}, 1.0};
  RngStream rng(3);
  CHECK_THROWS_AS(run_sequential_trial(design, rule, scenario, rng), ConfigError);
}

TEST_CASE("block trial conserves counts and freezes probabilities at boundaries") {
  TrialDesign design;
  design.regime = Regime::BlockFixedControl;
  design.num_treatments = 3;
  design.burn_in = {5, 5, 5};
  design.burn_in_control = 5;
  design.blocks = {40, 40, 40};
  design.control_blocks = {20, 20, 20};
  design.num_experimental = 135;
  design.num_control = 65;

  ProbeRule probe;
  ScenarioSpec scenario{0.0, {0.0, 0.0, 0.0}, 1.0};
  RngStream rng(11);
  TrialData trial = run_block_trial(design, probe, scenario, rng);
  CHECK(trial.arms.size() == 135);
  CHECK(trial.control_outcomes.size() == 65);
  // One decision per block, with histories frozen at the block boundaries.
  CHECK(probe.block_calls == std::vector<std::size_t>{15, 55, 95});
  CHECK(probe.block_control_sizes == std::vector<std::size_t>{5, 25, 45});
  int total = 0;
  for (int arm = 1; arm <= 3; ++arm) total += trial.realized_count(arm);
  CHECK(total == 135);
}

TEST_CASE("sequential rules see the experimental history only") {
  TrialDesign design = small_sequential();
  ProbeRule probe;
  ScenarioSpec scenario{0.0, {0.0, 0.0}, 1.0};
  RngStream rng(12);
  run_sequential_trial(design, probe, scenario, rng);
  // Called once per adaptive patient, with the history growing by one each
  // time; the ArmHistory interface carries no control outcomes at all.
  REQUIRE(probe.sequential_calls.size() == 50);
  for (std::size_t i = 0; i < probe.sequential_calls.size(); ++i) {
    CHECK(probe.sequential_calls[i] == 10 + i);
  }
}

TEST_CASE("case study design totals") {
  Experiment experiment = case_study_experiment();
  auto rule = make_rule(experiment.rule_name, experiment.rule_params, 2);
  RngStream rng(13);
  TrialData trial = run_block_trial(experiment.design, *rule, experiment.scenario, rng);
  CHECK(trial.arms.size() == 61);
  CHECK(trial.control_outcomes.size() == 31);
}

TEST_CASE("regime mismatches are config errors") {
  TrialDesign design = small_sequential();
  auto block_rule = make_rule("bar_wason", {}, 2);
  ScenarioSpec scenario{0.0, {0.0, 0.0}, 1.0};
  RngStream rng(14);
  CHECK_THROWS_AS(run_sequential_trial(design, *block_rule, scenario, rng),
                  IncompatibleRuleError);
  CHECK_THROWS_AS(run_block_trial(design, *block_rule, scenario, rng), ConfigError);
}

TEST_CASE("auxiliary designs are pure functions of (design, I, seed)") {
  TrialDesign design = small_sequential();
  const HypothesisSet set(0b11);
  AuxiliaryDesign a = generate_auxiliary(design, set, 77);
  AuxiliaryDesign b = generate_auxiliary(design, set, 77);
  AuxiliaryDesign c = generate_auxiliary(design, set, 78);
  CHECK(a.post_burn_in == b.post_burn_in);
  CHECK(a.post_burn_in != c.post_burn_in);
  CHECK(a.post_burn_in.back() == 1);  // lowest index of {1,2}
  for (int arm : a.post_burn_in) {
    CHECK(arm >= 1);
    CHECK(arm <= 2);
  }
}

TEST_CASE("auxiliary tie-break and adaptive-control constraints") {
  TrialDesign design;
  design.regime = Regime::BlockAdaptiveControl;
  design.num_treatments = 3;
  design.burn_in = {5, 5, 5};
  design.burn_in_control = 5;
  design.blocks = {50, 50, 50};
  design.num_experimental = 170;
  AuxiliaryDesign aux = generate_auxiliary(design, HypothesisSet(0b110), 5);
  const std::size_t tail = aux.post_burn_in.size();
  CHECK(tail == 150);
  CHECK(aux.post_burn_in[tail - 2] == 0);  // b_{n-1} is the control
  CHECK(aux.post_burn_in[tail - 1] == 2);  // lowest member of {2,3}
  bool saw_control = false;
  for (int arm : aux.post_burn_in) {
    CHECK(arm >= 0);
    CHECK(arm <= 3);
    saw_control |= arm == 0;
  }
  CHECK(saw_control);
}

TEST_CASE("shared-prefix policy shares draws across hypotheses") {
  TrialDesign design = small_sequential();
  AuxiliaryDesign a =
      generate_auxiliary(design, HypothesisSet::single(1), 9, AuxPolicy::SharedPrefix);
  AuxiliaryDesign b =
      generate_auxiliary(design, HypothesisSet::single(2), 9, AuxPolicy::SharedPrefix);
  for (std::size_t k = 0; k + 1 < a.post_burn_in.size(); ++k) {
    CHECK(a.post_burn_in[k] == b.post_burn_in[k]);
  }
  CHECK(a.post_burn_in.back() == 1);
  CHECK(b.post_burn_in.back() == 2);
  AuxiliaryDesign c = generate_auxiliary(design, HypothesisSet::single(1), 9,
                                         AuxPolicy::IndependentPerHypothesis);
  AuxiliaryDesign d = generate_auxiliary(design, HypothesisSet::single(2), 9,
                                         AuxPolicy::IndependentPerHypothesis);
  CHECK(c.post_burn_in != d.post_burn_in);
}

TEST_CASE("trial CSV round trip") {
  TrialDesign design = small_sequential();
  auto rule = make_rule("equal", {}, 2);
  ScenarioSpec scenario{0.0, {0.3, 0.1}, 1.0};
  RngStream rng(21);
  TrialData trial = run_sequential_trial(design, *rule, scenario, rng);
  std::stringstream buffer;
  trial.write_csv(buffer);
  TrialData back = TrialData::read_csv(buffer, design);
  CHECK(back.arms == trial.arms);
  CHECK(back.outcomes == trial.outcomes);
  CHECK(back.control_outcomes == trial.control_outcomes);
}

TEST_CASE("design validation catches structural mistakes") {
  TrialDesign design = small_sequential();
  design.burn_in = {5};
  CHECK_THROWS_AS(design.validate(), ConfigError);
  design = small_sequential();
  design.num_experimental = 8;  // below the burn-in total
  CHECK_THROWS_AS(design.validate(), ConfigError);
  design = small_sequential();
  design.regime = Regime::BlockFixedControl;
  design.blocks = {40, 40, 40};
  design.control_blocks = {20, 20, 1};  // final control block too small
  design.burn_in_control = 5;
  design.num_experimental = 130;
  design.num_control = 46;
  CHECK_THROWS_AS(design.validate(), ConfigError);
}
