#pragma once

#include <string_view>

#include "ergen/llm_client.hpp"
#include "ergen/prompts.hpp"

namespace ergen::scoring {

struct ScorePair {
  double semantic = 0.0;
  double constraint = 0.0;

  double sum() const noexcept { return semantic + constraint; }
  friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

// Appended to the judge prompt for the single corrective retry.
inline constexpr std::string_view kScoreOnlyReminder = "Only provide the score.";

// First decimal literal in the text ("0.85", ".9", "1"), clamped to
// [0, 1]; a leading minus sign clamps to 0. Throws ScoreParseError when there is none.
double parse_score(std::string_view text);

struct JudgeOptions {
  double temperature = 0.0;
  int max_output_tokens = 64;
};

// Renders the constraint's judge prompt, asks the model and parses the
// reply. One retry with kScoreOnlyReminder appended; a second unparseable
// reply throws JudgeParseError. Client errors propagate.
double judge_constraint_score(std::string_view representation, const prompts::ConstraintSpec& constraint,
                              llm::Client& client, const JudgeOptions& options = {});

}  // namespace ergen::scoring
