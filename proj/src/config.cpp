#include "ergen/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ergen/error.hpp"

namespace ergen {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_model(const json& j, const char* key, ModelParams& out) {
  if (!j.contains(key)) return;
  const json& m = j.at(key);
  if (!m.is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  reject_unknown(m, {"temperature", "max_output_tokens"}, std::string(key) + ".");
  read(m, "temperature", out.temperature);
  read(m, "max_output_tokens", out.max_output_tokens);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void RunConfig::validate() const {
  weights.validate();
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
  if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
  if (memory_limit < 0) throw ConfigError("memory_limit must be non-negative");
  if (parallel < 1) throw ConfigError("parallel must be at least 1");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (backoff_ms < 0 || min_interval_ms < 0) throw ConfigError("backoff and interval must be non-negative");
  for (const ModelParams* m : {&generator, &reconstructor, &judge}) {
    if (!(m->temperature >= 0.0)) throw ConfigError("temperatures must be non-negative");
    if (m->max_output_tokens < 1) throw ConfigError("max_output_tokens must be positive");
  }
}

void apply_config_json(RunConfig& config, const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"weights", "threshold", "max_trials", "memory_limit", "constraint", "generator", "reconstructor",
                  "judge", "provider", "mode", "cassette", "max_in_flight", "max_attempts", "backoff_ms",
                  "min_interval_ms", "parallel", "out", "classify", "fail_fast"},
                 "");
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
      throw ConfigError("config key 'weights' must be [a, b]");
    }
    config.weights = {w[0].get<double>(), w[1].get<double>()};
  }
  read(j, "threshold", config.threshold);
  read(j, "max_trials", config.max_trials);
  read(j, "memory_limit", config.memory_limit);
  if (j.contains("constraint")) {
    std::string c;
    read(j, "constraint", c);
    constexpr std::string_view kCustom = "custom:";
    if (c.rfind(kCustom, 0) == 0) c = std::string(kCustom) + resolve(base_dir, c.substr(kCustom.size())).string();
    config.constraint = c;
  }
  read_model(j, "generator", config.generator);
  read_model(j, "reconstructor", config.reconstructor);
  read_model(j, "judge", config.judge);
  if (j.contains("provider")) {
    const json& p = j.at("provider");
    if (!p.is_object()) throw ConfigError("config key 'provider' must be an object");
    reject_unknown(p, {"endpoint", "model", "api_key_env", "timeout_seconds"}, "provider.");
    read(p, "endpoint", config.provider.endpoint);
    read(p, "model", config.provider.model);
    read(p, "api_key_env", config.provider.api_key_env);
    read(p, "timeout_seconds", config.provider.timeout_seconds);
  }
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m);
    auto mode = llm::parse_mode(m);
    if (!mode) throw ConfigError("mode must be live, record or replay");
    config.mode = *mode;
  }
  if (j.contains("cassette")) {
    std::string c;
    read(j, "cassette", c);
    config.cassette = resolve(base_dir, c);
  }
  read(j, "max_in_flight", config.max_in_flight);
  read(j, "max_attempts", config.max_attempts);
  read(j, "backoff_ms", config.backoff_ms);
  read(j, "min_interval_ms", config.min_interval_ms);
  read(j, "parallel", config.parallel);
  if (j.contains("out")) {
    std::string o;
    read(j, "out", o);
    config.out_dir = resolve(base_dir, o);
  }
  read(j, "classify", config.classify);
  read(j, "fail_fast", config.fail_fast);
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig defaults) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  apply_config_json(defaults, j, path.parent_path());
  return defaults;
}

similarity::Weights parse_weights(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ConfigError("--weights expects a,b");
  similarity::Weights w{parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
  w.validate();
  return w;
}

}  // namespace ergen
