#include "ergen/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "ergen/error.hpp"

namespace ergen::scoring {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

double parse_score(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool starts_number =
        is_digit(text[i]) || (text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1]));
    if (!starts_number) continue;
    std::size_t end = i;
    while (end < text.size() && is_digit(text[end])) ++end;
    if (end < text.size() && text[end] == '.') {
      ++end;
      while (end < text.size() && is_digit(text[end])) ++end;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + end, value);
    if (ec != std::errc() && ec != std::errc::result_out_of_range) continue;
    if (ec == std::errc::result_out_of_range) value = 1.0;
    // "-0.2" is negative; the hyphen in "0-1" or "score-0.5" is not a sign.
    const bool negative = i > 0 && text[i - 1] == '-' && (i < 2 || !std::isalnum(static_cast<unsigned char>(text[i - 2])));
    return negative ? 0.0 : std::clamp(value, 0.0, 1.0);
  }
  throw ScoreParseError("no numeric score in: " + std::string(text.substr(0, 200)));
}

double judge_constraint_score(std::string_view representation, const prompts::ConstraintSpec& constraint,
                              llm::Client& client, const JudgeOptions& options) {
  if (representation.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw InputError("cannot judge an empty representation");
  }
  llm::ChatRequest request;
  request.user_text = prompts::render_judge_instruction(constraint, representation);
  request.temperature = options.temperature;
  request.max_output_tokens = options.max_output_tokens;

  const std::string first = client.complete(request);
  try {
    return parse_score(first);
  } catch (const ScoreParseError&) {
  }
  request.user_text += "\n\n";
  request.user_text += kScoreOnlyReminder;
  const std::string second = client.complete(request);
  try {
    return parse_score(second);
  } catch (const ScoreParseError&) {
    throw JudgeParseError("judge reply has no score after retry: " + second.substr(0, 200));
  }
}

}  // namespace ergen::scoring
