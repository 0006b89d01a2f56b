#pragma once

#include <string>

#include "ctnet/models/model.hpp"
#include "ctnet/training/adam.hpp"

namespace ctnet {

/// Everything that determines an experiment besides the data.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  double train_fraction = 0.8;
};

/// Overrides defaults from a flat JSON object. Recognized keys are the
/// ModelConfig and TrainConfig field names plus "train_fraction";
/// "seed" sets both the model and training seeds, "model_seed" and
/// "train_seed" set one each. Anything else is a ConfigError.
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});
RunConfig read_run_config_file(const std::string& path, RunConfig base = {});

/// Canonical JSON with keys in a fixed order; stable across runs.
std::string run_config_json(const RunConfig& config);

}  // namespace ctnet
