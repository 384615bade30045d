#pragma once

#include <cstdint>
#include <string>

#include "gm/encoder.hpp"
#include "gm/json_util.hpp"
#include "gm/matcher.hpp"
#include "gm/synthetic.hpp"
#include "gm/training.hpp"

namespace gm {

// One config file drives every command. All fields are optional in the file
// (defaults below apply); unknown keys are errors so typos cannot pass
// silently. The top-level seed feeds both generation and training so a run
// is reproducible from a single number.
struct RunConfig {
  std::uint64_t seed = 7;
  // Fraction of each class's pairs held out for validation during training.
  double val_fraction = 0.2;
  SyntheticConfig synthetic;  // its seed mirrors the top-level seed
  EncoderDims encoder;
  SinkhornConfig sinkhorn;
  TrainConfig train;  // its seed mirrors the top-level seed

  // The node-feature width the generated graphs will have.
  int generated_feature_width() const;

  void validate() const;  // throws ConfigError
};

// Strict parser: unknown keys raise ConfigError naming the key and section.
// When encoder.in_dim is not given it follows the synthetic feature width.
RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);

// Full-defaults echo written next to every command's output.
void write_config_echo(const std::string& path, const RunConfig& cfg);

}  // namespace gm
