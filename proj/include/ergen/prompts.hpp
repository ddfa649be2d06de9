#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace ergen::prompts {

enum class TemplateId {
  Generation,
  Reconstruction,
  Feedback,
  JudgeNonCode,
  JudgeComment,
  JudgePseudocode,
  JudgeFlowchart,
};

inline constexpr std::array<TemplateId, 7> kAllTemplates = {
    TemplateId::Generation,   TemplateId::Reconstruction,  TemplateId::Feedback,       TemplateId::JudgeNonCode,
    TemplateId::JudgeComment, TemplateId::JudgePseudocode, TemplateId::JudgeFlowchart,
};

// Names match the template data files (src/templates/<name>.txt).
std::string_view template_name(TemplateId id);
std::string_view template_body(TemplateId id);

// Any template data file by name, including ones outside kAllTemplates.
// Empty when there is no such file.
std::string_view named_template(std::string_view name);

// Placeholder names recognized inside {...}. Braces around anything else
// are literal text.
inline constexpr std::array<std::string_view, 7> kPlaceholders = {
    "code",
    "representation",
    "Constraint",
    "The definition of constraints on representations",
    "semantic_score",
    "constraint_score_name",
    "constraint_score",
};

using Bindings = std::map<std::string, std::string, std::less<>>;

// Single-pass substitution; substituted values are never rescanned. Throws
// TemplateError when the body names a placeholder that is not bound.
std::string render(std::string_view body, const Bindings& bindings);

// A form constraint on representations: the text spliced into the generator
// and feedback prompts plus the judge prompt that scores it.
struct ConstraintSpec {
  std::string key;
  std::string name;
  std::string definition;
  std::string score_name;
  std::string judge_template;
};

inline constexpr std::array<std::string_view, 4> kPresetKeys = {"non-code", "comment", "pseudocode", "flowchart"};

// Throws ConfigError for an unknown key.
ConstraintSpec preset(std::string_view key);

// JSON object with name, definition, score_name and either judge_template or
// judge_template_file (relative to the JSON file). Throws ConfigError.
ConstraintSpec load_custom_constraint(const std::filesystem::path& path);

// Accepts a preset key or "custom:<path>".
ConstraintSpec constraint_from_flag(std::string_view value);

// Fixed two decimals; throws TemplateError outside [0, 1].
std::string format_score(double score);

std::string render_generation_instruction(std::string_view code, const ConstraintSpec& constraint);
std::string render_reconstruction_instruction(std::string_view representation);
std::string render_feedback(double semantic_score, const ConstraintSpec& constraint, double constraint_score);
std::string render_judge_instruction(const ConstraintSpec& constraint, std::string_view representation);

}  // namespace ergen::prompts
