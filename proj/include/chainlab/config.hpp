#pragma once

#include "chainlab/harness.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace chainlab {

// bad flags, unknown keys, malformed values (CLI exit status 2)
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat dotted-key configuration. Every key has a default whose JSON type fixes how
// overrides are parsed; keys outside the default set are rejected.
using Config = nlohmann::ordered_json;

Config default_config();

// nested objects are flattened to dotted keys
Config flatten(const nlohmann::ordered_json& nested);

// merges a config file's values over cfg; returns nothing, throws UsageError on unknown keys
void merge_config(Config& cfg, const nlohmann::ordered_json& file_values);

// parses `value` according to the default type of `key`
void apply_override(Config& cfg, const std::string& key, const std::string& value);

ExperimentConfig to_experiment(const Config& cfg);
BoundsConfig to_bounds(const Config& cfg);

}  // namespace chainlab
