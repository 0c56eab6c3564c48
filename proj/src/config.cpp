#include "raradapt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace raradapt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& message) {
  throw ConfigError(source + ": " + message);
}

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& source, const std::string& block) {
  for (const auto& [key, value] : object.items()) {
    if (!known.count(key)) {
      fail(source, "unknown key '" + key + "' in " + block);
    }
  }
}

template <typename T>
T require(const json& object, const std::string& key, const std::string& source,
          const std::string& block) {
  if (!object.contains(key)) fail(source, block + " is missing required key '" + key + "'");
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    fail(source, block + "." + key + " has the wrong type");
  }
}

template <typename T>
T optional_or(const json& object, const std::string& key, T fallback,
              const std::string& source, const std::string& block) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    fail(source, block + "." + key + " has the wrong type");
  }
}

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

Experiment load_experiment_config(std::istream& in, const std::string& source_name) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    fail(source_name, "parse error at line " +
                          std::to_string(line_of_offset(text, err.byte)) + ": " +
                          err.what());
  }
  if (!root.is_object()) fail(source_name, "the config must be a JSON object");
  reject_unknown_keys(root, {"design", "rule", "scenario", "testing", "run"}, source_name,
                      "the config");

  Experiment experiment;

  if (!root.contains("design")) fail(source_name, "missing 'design' block");
  const json& design = root.at("design");
  reject_unknown_keys(design,
                      {"regime", "h", "n", "n0", "burn_in", "burn_in_control", "blocks",
                       "control_blocks"},
                      source_name, "design");
  experiment.design.regime =
      regime_from_name(require<std::string>(design, "regime", source_name, "design"));
  experiment.design.num_treatments = require<int>(design, "h", source_name, "design");
  experiment.design.num_experimental = require<int>(design, "n", source_name, "design");
  experiment.design.num_control =
      optional_or<int>(design, "n0", 0, source_name, "design");
  experiment.design.burn_in =
      require<std::vector<int>>(design, "burn_in", source_name, "design");
  experiment.design.burn_in_control =
      optional_or<int>(design, "burn_in_control", 0, source_name, "design");
  experiment.design.blocks =
      optional_or<std::vector<int>>(design, "blocks", {}, source_name, "design");
  experiment.design.control_blocks =
      optional_or<std::vector<int>>(design, "control_blocks", {}, source_name, "design");

  if (!root.contains("rule")) fail(source_name, "missing 'rule' block");
  const json& rule = root.at("rule");
  reject_unknown_keys(rule,
                      {"name", "tau", "gamma", "nu", "probs", "prior_mean", "prior_var",
                       "clamp"},
                      source_name, "rule");
  experiment.rule_name = require<std::string>(rule, "name", source_name, "rule");
  experiment.rule_params.tau =
      optional_or<double>(rule, "tau", 0.5, source_name, "rule");
  experiment.rule_params.gamma =
      optional_or<double>(rule, "gamma", 0.5, source_name, "rule");
  experiment.rule_params.nu = optional_or<double>(rule, "nu", 0.1, source_name, "rule");
  experiment.rule_params.prior_mean =
      optional_or<double>(rule, "prior_mean", 0.0, source_name, "rule");
  experiment.rule_params.prior_var =
      optional_or<double>(rule, "prior_var", 1.0, source_name, "rule");
  experiment.rule_params.fixed_probs =
      optional_or<std::vector<double>>(rule, "probs", {}, source_name, "rule");
  if (rule.contains("clamp")) {
    const auto clamp =
        require<std::vector<double>>(rule, "clamp", source_name, "rule");
    if (clamp.size() != 2) fail(source_name, "rule.clamp must be [lo, hi]");
    experiment.rule_params.clamp = {clamp[0], clamp[1]};
  }

  if (!root.contains("scenario")) fail(source_name, "missing 'scenario' block");
  const json& scenario = root.at("scenario");
  reject_unknown_keys(scenario, {"mu", "deltas", "sigma"}, source_name, "scenario");
  experiment.scenario.control_mean =
      optional_or<double>(scenario, "mu", 0.0, source_name, "scenario");
  experiment.scenario.effects =
      require<std::vector<double>>(scenario, "deltas", source_name, "scenario");
  experiment.scenario.outcome_sd =
      optional_or<double>(scenario, "sigma", 1.0, source_name, "scenario");

  const json testing = root.contains("testing") ? root.at("testing") : json::object();
  reject_unknown_keys(testing, {"alpha", "strategies", "variance_mode", "split"},
                      source_name, "testing");
  experiment.design.alpha =
      optional_or<double>(testing, "alpha", 0.05, source_name, "testing");
  if (testing.contains("strategies")) {
    experiment.strategies.clear();
    for (const std::string& name :
         require<std::vector<std::string>>(testing, "strategies", source_name, "testing")) {
      experiment.strategies.push_back(strategy_from_name(name));
    }
  }
  const std::string variance =
      optional_or<std::string>(testing, "variance_mode", "known", source_name, "testing");
  if (variance == "known") {
    experiment.variance_mode = VarianceMode::Known;
  } else if (variance == "pooled") {
    experiment.variance_mode = VarianceMode::PooledEstimate;
  } else {
    fail(source_name, "testing.variance_mode must be 'known' or 'pooled'");
  }

  const json run = root.contains("run") ? root.at("run") : json::object();
  reject_unknown_keys(run, {"sims", "seed", "workers", "aux_policy"}, source_name, "run");
  experiment.num_sims = optional_or<long>(run, "sims", 10000, source_name, "run");
  experiment.seed = optional_or<std::uint64_t>(run, "seed", 1, source_name, "run");
  experiment.workers = optional_or<int>(run, "workers", 0, source_name, "run");
  const std::string policy =
      optional_or<std::string>(run, "aux_policy", "independent", source_name, "run");
  if (policy == "independent") {
    experiment.aux_policy = AuxPolicy::IndependentPerHypothesis;
  } else if (policy == "shared_prefix") {
    experiment.aux_policy = AuxPolicy::SharedPrefix;
  } else {
    fail(source_name, "run.aux_policy must be 'independent' or 'shared_prefix'");
  }

  experiment.validate();
  return experiment;
}

Experiment load_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return load_experiment_config(in, path);
}

std::string experiment_to_json(const Experiment& experiment) {
  json root;
  json& design = root["design"];
  design["regime"] = regime_name(experiment.design.regime);
  design["h"] = experiment.design.num_treatments;
  design["n"] = experiment.design.num_experimental;
  if (experiment.design.regime != Regime::BlockAdaptiveControl) {
    design["n0"] = experiment.design.num_control;
  }
  design["burn_in"] = experiment.design.burn_in;
  if (experiment.design.regime != Regime::FullySequentialFixedControl) {
    design["burn_in_control"] = experiment.design.burn_in_control;
    design["blocks"] = experiment.design.blocks;
  }
  if (experiment.design.regime == Regime::BlockFixedControl) {
    design["control_blocks"] = experiment.design.control_blocks;
  }
  json& rule = root["rule"];
  rule["name"] = experiment.rule_name;
  rule["tau"] = experiment.rule_params.tau;
  rule["gamma"] = experiment.rule_params.gamma;
  rule["nu"] = experiment.rule_params.nu;
  rule["prior_mean"] = experiment.rule_params.prior_mean;
  rule["prior_var"] = experiment.rule_params.prior_var;
  if (!experiment.rule_params.fixed_probs.empty()) {
    rule["probs"] = experiment.rule_params.fixed_probs;
  }
  if (experiment.rule_params.clamp) {
    rule["clamp"] = {experiment.rule_params.clamp->first,
                     experiment.rule_params.clamp->second};
  }
  json& scenario = root["scenario"];
  scenario["mu"] = experiment.scenario.control_mean;
  scenario["deltas"] = experiment.scenario.effects;
  scenario["sigma"] = experiment.scenario.outcome_sd;
  json& testing = root["testing"];
  testing["alpha"] = experiment.design.alpha;
  std::vector<std::string> strategies;
  for (Strategy s : experiment.strategies) strategies.push_back(strategy_name(s));
  testing["strategies"] = strategies;
  testing["variance_mode"] =
      experiment.variance_mode == VarianceMode::Known ? "known" : "pooled";
  json& run = root["run"];
  run["sims"] = experiment.num_sims;
  run["seed"] = experiment.seed;
  run["workers"] = experiment.workers;
  run["aux_policy"] = experiment.aux_policy == AuxPolicy::IndependentPerHypothesis
                          ? "independent"
                          : "shared_prefix";
  return root.dump(2) + "\n";
}

}  // namespace raradapt
