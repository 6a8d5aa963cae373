#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "edmol/encoding.hpp"
#include "edmol/generate.hpp"
#include "edmol/model.hpp"
#include "edmol/train.hpp"

namespace edmol {

// Flat merged configuration read from one JSON object. A "preset" key
// ("toy" or "full") is applied first; other keys override it.
struct RunConfig {
  std::string preset = "toy";
  ModelConfig model;
  TrainConfig train;
  GenerationConfig generation;
  PrepareOptions data;
  std::uint64_t seed = 0;

  static RunConfig for_preset(std::string_view name);
  void validate() const;
};

// Throws ParameterError on unknown keys, wrong types or invalid values.
RunConfig run_config_from_json(std::string_view text);
RunConfig read_run_config(const std::string& path);
// Every key with its current value.
std::string run_config_to_json(const RunConfig& config);

}  // namespace edmol
