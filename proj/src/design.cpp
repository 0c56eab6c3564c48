#include "raradapt/design.hpp"

#include <numeric>

namespace raradapt {

int HypothesisSet::lowest() const {
  if (mask_ == 0) throw std::logic_error("HypothesisSet::lowest on empty set");
  return __builtin_ctz(mask_) + 1;
}

std::string HypothesisSet::label() const {
  std::string out = "{";
  bool first = true;
  for (int i = 1; i <= 32; ++i) {
    if (contains(i)) {
      if (!first) out += ",";
      out += std::to_string(i);
      first = false;
    }
  }
  return out + "}";
}

std::vector<HypothesisSet> all_intersections(int num_treatments) {
  std::vector<HypothesisSet> out;
  for (int size = 1; size <= num_treatments; ++size) {
    for (std::uint32_t mask = 1; mask < (1u << num_treatments); ++mask) {
      if (__builtin_popcount(mask) == size) out.emplace_back(mask);
    }
  }
  return out;
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::FullySequentialFixedControl: return "sequential";
    case Regime::BlockFixedControl: return "block_fixed";
    case Regime::BlockAdaptiveControl: return "block_adaptive";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "sequential") return Regime::FullySequentialFixedControl;
  if (name == "block_fixed") return Regime::BlockFixedControl;
  if (name == "block_adaptive") return Regime::BlockAdaptiveControl;
  throw ConfigError("unknown regime '" + name +
                    "' (expected sequential | block_fixed | block_adaptive)");
}

void TrialDesign::validate() const {
  if (num_treatments < 1) throw ConfigError("design: h must be >= 1");
  if (num_treatments > 20) throw ConfigError("design: h too large for closed testing");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("design: alpha must lie in [0, 1)");
  if (static_cast<int>(burn_in.size()) != num_treatments) {
    throw ConfigError("design: burn_in must list one count per treatment");
  }
  for (int r : burn_in) {
    if (r <= 0) throw ConfigError("design: burn-in counts must be positive");
  }
  const int r = burn_in_experimental();
  const bool blocked = regime != Regime::FullySequentialFixedControl;
  if (blocked) {
    if (burn_in_control <= 0) throw ConfigError("design: control burn-in must be positive");
    if (blocks.empty()) throw ConfigError("design: block regimes need block sizes");
    for (int d : blocks) {
      if (d <= 0) throw ConfigError("design: block sizes must be positive");
    }
  } else if (!blocks.empty()) {
    throw ConfigError("design: the sequential regime takes no block sizes");
  }

  switch (regime) {
    case Regime::FullySequentialFixedControl: {
      if (num_experimental <= r) {
        throw ConfigError("design: n must exceed the burn-in total");
      }
      if (num_control <= 0) throw ConfigError("design: n0 must be positive");
      break;
    }
    case Regime::BlockFixedControl: {
      const int block_sum = std::accumulate(blocks.begin(), blocks.end(), 0);
      if (num_experimental != r + block_sum) {
        throw ConfigError("design: n must equal burn-in plus the block sizes");
      }
      if (control_blocks.size() != blocks.size()) {
        throw ConfigError("design: control blocks must match the experimental block count");
      }
      for (int d : control_blocks) {
        if (d <= 0) throw ConfigError("design: control block sizes must be positive");
      }
      if (control_blocks.back() <= 1) {
        throw ConfigError("design: the final control block must exceed one patient");
      }
      const int ctrl_sum =
          std::accumulate(control_blocks.begin(), control_blocks.end(), 0);
      if (num_control != burn_in_control + ctrl_sum) {
        throw ConfigError("design: n0 must equal control burn-in plus control blocks");
      }
      break;
    }
    case Regime::BlockAdaptiveControl: {
      if (!control_blocks.empty()) {
        throw ConfigError("design: adaptive control regime takes no control blocks");
      }
      const int block_sum = std::accumulate(blocks.begin(), blocks.end(), 0);
      if (num_experimental != burn_in_total() + block_sum) {
        throw ConfigError("design: n must equal burn-in (all arms) plus the block sizes");
      }
      if (blocks.back() < 2) {
        throw ConfigError("design: the final block needs at least two patients");
      }
      break;
    }
  }
}

void ScenarioSpec::validate(int num_treatments) const {
  if (static_cast<int>(effects.size()) != num_treatments) {
    throw ConfigError("scenario: deltas must list one effect per treatment");
  }
  if (!(outcome_sd > 0.0)) throw ConfigError("scenario: sigma must be positive");
}

}  // namespace raradapt
