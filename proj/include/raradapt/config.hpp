#pragma once

#include <iosfwd>
#include <string>

#include "raradapt/experiment.hpp"

namespace raradapt {

// Parses and validates an experiment config (one JSON object with design /
// rule / scenario / testing / run blocks). Unknown keys are rejected.
// Parse and schema errors throw ConfigError with a line-anchored message.
Experiment load_experiment_config(std::istream& in, const std::string& source_name);
Experiment load_experiment_config_file(const std::string& path);

// The experiment rendered back as a JSON document (run manifests).
std::string experiment_to_json(const Experiment& experiment);

}  // namespace raradapt
