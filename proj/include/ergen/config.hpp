#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ergen/llm_client.hpp"
#include "ergen/similarity.hpp"

namespace ergen {

struct ModelParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

struct RunConfig {
  similarity::Weights weights;  // a, b
  double threshold = 0.9;       // T
  int max_trials = 5;
  // Number of most recent memory entries shown to the generator; 0 = all.
  int memory_limit = 0;
  std::string constraint = "non-code";

  ModelParams generator{0.7, 1024};
  ModelParams reconstructor{0.0, 1024};
  ModelParams judge{0.0, 64};

  llm::HttpSettings provider;
  llm::Mode mode = llm::Mode::Replay;
  std::filesystem::path cassette;
  int max_in_flight = 4;
  int max_attempts = 3;
  int backoff_ms = 500;
  int min_interval_ms = 0;

  int parallel = 4;
  std::filesystem::path out_dir = "out";
  bool classify = false;
  bool fail_fast = false;

  // Throws ConfigError on the first violated invariant.
  void validate() const;
};

// Overlays the keys present in `j` onto `config`. Relative paths resolve
// against `base_dir`. Unknown keys are a ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& j, const std::filesystem::path& base_dir);

RunConfig load_config_file(const std::filesystem::path& path, RunConfig defaults = {});

// "a,b" -> weights; throws ConfigError on malformed text or a+b != 1.
similarity::Weights parse_weights(std::string_view text);

}  // namespace ergen
