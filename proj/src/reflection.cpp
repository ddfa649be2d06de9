#include "ergen/reflection.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

namespace ergen::reflection {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

std::string dedent(std::string_view text) {
  auto lines = split_lines(text);
  while (!lines.empty() && blank(lines.front())) lines.erase(lines.begin());
  while (!lines.empty() && blank(lines.back())) lines.pop_back();
  std::size_t common = std::numeric_limits<std::size_t>::max();
  for (auto line : lines) {
    if (blank(line)) continue;
    common = std::min(common, line.find_first_not_of(" \t"));
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (blank(line)) {
      line = {};
    } else {
      line.remove_prefix(std::min(common, line.size()));
    }
    if (i) out += '\n';
    out += line;
  }
  return out;
}

llm::ChatRequest request_for(std::string text, const ModelParams& params) {
  llm::ChatRequest r;
  r.user_text = std::move(text);
  r.temperature = params.temperature;
  r.max_output_tokens = params.max_output_tokens;
  return r;
}

}  // namespace

std::string_view termination_name(Termination t) {
  return t == Termination::Threshold ? "threshold" : "max_trials";
}

std::string build_generation_context(std::string_view code, const Memory& memory,
                                     const prompts::ConstraintSpec& constraint, int limit) {
  std::string context = prompts::render_generation_instruction(code, constraint);
  std::size_t first = 0;
  if (limit > 0 && memory.size() > static_cast<std::size_t>(limit)) first = memory.size() - limit;
  for (std::size_t k = first; k < memory.size(); ++k) {
    context += fmt::format("\n\nPrevious representation (trial {}): {}\nFeedback: {}", k + 1,
                           memory[k].representation, memory[k].feedback);
  }
  return context;
}

std::string extract_code(std::string_view reply) {
  const auto open = reply.find("```");
  if (open == std::string_view::npos) return dedent(reply);
  auto body_start = reply.find('\n', open);
  if (body_start == std::string_view::npos) return {};
  ++body_start;
  const auto close = reply.find("```", body_start);
  return dedent(reply.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start));
}

ReflectionResult run_reflection(const CodeSnippet& snippet, const prompts::ConstraintSpec& constraint,
                                const RunConfig& config, llm::Client& client) {
  config.validate();
  try {
    cst::python().parse(snippet.code);
  } catch (const ParseFailure& e) {
    throw InputError("snippet '" + snippet.id + "' does not parse: " + e.what());
  }

  const scoring::JudgeOptions judge{config.judge.temperature, config.judge.max_output_tokens};
  ReflectionResult result;
  Memory& memory = result.memory;
  double semantic = -std::numeric_limits<double>::infinity();
  double constraint_score = -std::numeric_limits<double>::infinity();
  double best_sum = -std::numeric_limits<double>::infinity();
  int t = 0;

  while (semantic < config.threshold || constraint_score < config.threshold) {
    TrialRecord trial;
    trial.index = t;
    try {
      const std::string context = build_generation_context(snippet.code, memory, constraint, config.memory_limit);
      trial.representation = std::string(trim(client.complete(request_for(context, config.generator))));
      const std::string reply = client.complete(
          request_for(prompts::render_reconstruction_instruction(trial.representation), config.reconstructor));
      trial.reconstructed_code = extract_code(reply);
      trial.similarity = similarity::semantic_score(snippet.code, trial.reconstructed_code, config.weights);
      // Whitespace-only representations cannot satisfy any form constraint.
      trial.scores.constraint = trial.representation.empty()
                                    ? 0.0
                                    : scoring::judge_constraint_score(trial.representation, constraint, client, judge);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw RunAborted(fmt::format("snippet '{}' aborted at trial {}: {}", snippet.id, t, e.what()),
                       std::move(result.transcript), std::current_exception());
    }
    trial.scores.semantic = trial.similarity.combined;
    semantic = trial.scores.semantic;
    constraint_score = trial.scores.constraint;
    trial.feedback = prompts::render_feedback(semantic, constraint, constraint_score);

    memory.push_back({trial.representation, trial.feedback});
    if (trial.scores.sum() > best_sum) {
      best_sum = trial.scores.sum();
      result.best_representation = trial.representation;
      result.best_scores = trial.scores;
      result.best_trial_index = t;
    }
    result.best_sum_trace.push_back(best_sum);
    result.transcript.push_back(std::move(trial));
    ++t;
    if (t >= config.max_trials) break;
  }

  result.terminated_by = semantic >= config.threshold && constraint_score >= config.threshold
                             ? Termination::Threshold
                             : Termination::MaxTrials;
  return result;
}

json trial_to_json(const TrialRecord& trial) {
  json orders = json::array();
  for (const auto& c : trial.similarity.per_order) orders.push_back({c.overlap, c.total});
  return json{{"trial", trial.index},
              {"representation", trial.representation},
              {"reconstructed_code", trial.reconstructed_code},
              {"semantic_score", trial.scores.semantic},
              {"constraint_score", trial.scores.constraint},
              {"sim_text", trial.similarity.sim_text},
              {"sim_syntax", trial.similarity.sim_syntax},
              {"ngram_counts", orders},
              {"subtree_overlap", trial.similarity.subtree_overlap},
              {"subtree_total", trial.similarity.subtree_total},
              {"parse_failure", trial.similarity.parse_failure},
              {"feedback", trial.feedback}};
}

TrialRecord trial_from_json(const json& j) {
  TrialRecord t;
  t.index = j.at("trial").get<int>();
  t.representation = j.at("representation").get<std::string>();
  t.reconstructed_code = j.at("reconstructed_code").get<std::string>();
  t.scores.semantic = j.at("semantic_score").get<double>();
  t.scores.constraint = j.at("constraint_score").get<double>();
  t.similarity.sim_text = j.at("sim_text").get<double>();
  t.similarity.sim_syntax = j.at("sim_syntax").get<double>();
  t.similarity.combined = t.scores.semantic;
  const json& orders = j.at("ngram_counts");
  for (std::size_t n = 0; n < t.similarity.per_order.size() && n < orders.size(); ++n) {
    t.similarity.per_order[n] = {orders[n].at(0).get<std::size_t>(), orders[n].at(1).get<std::size_t>()};
  }
  t.similarity.subtree_overlap = j.at("subtree_overlap").get<std::size_t>();
  t.similarity.subtree_total = j.at("subtree_total").get<std::size_t>();
  t.similarity.parse_failure = j.at("parse_failure").get<bool>();
  t.feedback = j.at("feedback").get<std::string>();
  return t;
}

std::string serialize_transcript(const std::vector<TrialRecord>& transcript) {
  std::string out;
  for (const auto& trial : transcript) {
    out += trial_to_json(trial).dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_transcript(std::string_view text) {
  std::vector<TrialRecord> out;
  for (auto line : split_lines(text)) {
    if (blank(line)) continue;
    try {
      out.push_back(trial_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw LoadError(std::string("malformed transcript record: ") + e.what());
    }
  }
  return out;
}

void write_transcript(const std::filesystem::path& path, const std::vector<TrialRecord>& transcript) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write transcript " + path.string());
  out << serialize_transcript(transcript);
}

}  // namespace ergen::reflection
