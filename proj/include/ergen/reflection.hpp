#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ergen/config.hpp"
#include "ergen/error.hpp"
#include "ergen/llm_client.hpp"
#include "ergen/prompts.hpp"
#include "ergen/scoring.hpp"
#include "ergen/similarity.hpp"

namespace ergen::reflection {

struct CodeSnippet {
  std::string id;
  std::string code;
};

struct TrialRecord {
  int index = 0;
  std::string representation;
  std::string reconstructed_code;
  scoring::ScorePair scores;
  std::string feedback;
  similarity::SimilarityBreakdown similarity;
};

struct MemoryEntry {
  std::string representation;
  std::string feedback;
};
using Memory = std::vector<MemoryEntry>;

enum class Termination { Threshold, MaxTrials };
std::string_view termination_name(Termination t);

struct ReflectionResult {
  std::string best_representation;
  scoring::ScorePair best_scores;
  int best_trial_index = 0;
  std::vector<TrialRecord> transcript;
  Termination terminated_by = Termination::MaxTrials;
  // Memory as it stood when the loop ended; one entry per trial.
  Memory memory;
  // Best score sum after each trial.
  std::vector<double> best_sum_trace;
};

// A client or judge failure stopped the run; carries the trials completed
// before it and the original exception.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& message, std::vector<TrialRecord> partial, std::exception_ptr cause)
      : Error(message), partial_(std::move(partial)), cause_(std::move(cause)) {}

  const std::vector<TrialRecord>& partial_transcript() const noexcept { return partial_; }
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

 private:
  std::vector<TrialRecord> partial_;
  std::exception_ptr cause_;
};

// The generation instruction followed by one block per remembered trial:
// "\n\nPrevious representation (trial k): <r>\nFeedback: <f>", k from 1.
// A positive `limit` keeps only the most recent entries.
std::string build_generation_context(std::string_view code, const Memory& memory,
                                     const prompts::ConstraintSpec& constraint, int limit = 0);

// Takes the body of the first fenced block when the reply has one, drops
// surrounding blank lines and removes common indentation.
std::string extract_code(std::string_view reply);

// The self-reflection loop. Throws InputError for unparseable input code,
// ConfigError for an invalid configuration, RunAborted when a model call
// fails mid-run.
ReflectionResult run_reflection(const CodeSnippet& snippet, const prompts::ConstraintSpec& constraint,
                                const RunConfig& config, llm::Client& client);

// Transcript files hold one JSON object per line, one line per trial.
nlohmann::json trial_to_json(const TrialRecord& trial);
TrialRecord trial_from_json(const nlohmann::json& j);
std::string serialize_transcript(const std::vector<TrialRecord>& transcript);
std::vector<TrialRecord> parse_transcript(std::string_view text);
void write_transcript(const std::filesystem::path& path, const std::vector<TrialRecord>& transcript);

}  // namespace ergen::reflection
