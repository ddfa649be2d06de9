#include "ergen/prompts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "ergen/error.hpp"

namespace ergen::prompts {

namespace detail {
// Defined in the build-generated templates_data.cpp.
std::string_view embedded_template(std::string_view name);
}  // namespace detail

namespace {

constexpr std::string_view kConstraintPlaceholder = "Constraint";
constexpr std::string_view kDefinitionPlaceholder = "The definition of constraints on representations";

bool is_placeholder(std::string_view name) {
  return std::find(kPlaceholders.begin(), kPlaceholders.end(), name) != kPlaceholders.end();
}

void bind_constraint(Bindings& b, const ConstraintSpec& c) {
  // Empty fields stay unbound so rendering reports them.
  if (!c.name.empty()) b.emplace(kConstraintPlaceholder, c.name);
  if (!c.definition.empty()) b.emplace(kDefinitionPlaceholder, c.definition);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view template_name(TemplateId id) {
  switch (id) {
    case TemplateId::Generation: return "generation";
    case TemplateId::Reconstruction: return "reconstruction";
    case TemplateId::Feedback: return "feedback";
    case TemplateId::JudgeNonCode: return "judge_non_code";
    case TemplateId::JudgeComment: return "judge_comment";
    case TemplateId::JudgePseudocode: return "judge_pseudocode";
    case TemplateId::JudgeFlowchart: return "judge_flowchart";
  }
  return "";
}

std::string_view template_body(TemplateId id) { return detail::embedded_template(template_name(id)); }

std::string_view named_template(std::string_view name) { return detail::embedded_template(name); }

std::string render(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const std::size_t close = body.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string_view name = body.substr(i + 1, close - i - 1);
        if (is_placeholder(name)) {
          auto it = bindings.find(name);
          if (it == bindings.end()) throw TemplateError("unbound placeholder {" + std::string(name) + "}");
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(body[i]);
    ++i;
  }
  return out;
}

ConstraintSpec preset(std::string_view key) {
  if (key == "non-code") {
    return {"non-code", "Non-Code",
            "The representation should be non-code. It should not be written in Python or any other "
            "programming language.",
            "non-code score", std::string(template_body(TemplateId::JudgeNonCode))};
  }
  if (key == "comment") {
    return {"comment", "Natural Language Comment",
            "The representation should be a fluent and concise natural language comment.", "comment score",
            std::string(template_body(TemplateId::JudgeComment))};
  }
  if (key == "pseudocode") {
    return {"pseudocode", "Pseudocode", "The representation should be a well-formed and standardized pseudocode.",
            "pseudocode score", std::string(template_body(TemplateId::JudgePseudocode))};
  }
  if (key == "flowchart") {
    return {"flowchart", "Flowchart", "The representation should be a clear and concise flowchart.",
            "flowchart score", std::string(template_body(TemplateId::JudgeFlowchart))};
  }
  throw ConfigError("unknown constraint preset '" + std::string(key) +
                    "' (expected non-code, comment, pseudocode, flowchart or custom:<path>)");
}

ConstraintSpec load_custom_constraint(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("custom constraint " + path.string() + ": " + e.what());
  }
  auto field = [&](const char* name) -> std::string {
    if (!j.contains(name) || !j[name].is_string() || j[name].get<std::string>().empty()) {
      throw ConfigError("custom constraint " + path.string() + ": missing string field '" + name + "'");
    }
    return j[name].get<std::string>();
  };
  ConstraintSpec c;
  c.key = "custom";
  c.name = field("name");
  c.definition = field("definition");
  c.score_name = field("score_name");
  if (j.contains("judge_template_file")) {
    c.judge_template = read_file(path.parent_path() / field("judge_template_file"));
    if (!c.judge_template.empty() && c.judge_template.back() == '\n') c.judge_template.pop_back();
  } else {
    c.judge_template = field("judge_template");
  }
  if (c.judge_template.find("{representation}") == std::string::npos) {
    throw ConfigError("custom constraint " + path.string() + ": judge template lacks {representation}");
  }
  return c;
}

ConstraintSpec constraint_from_flag(std::string_view value) {
  constexpr std::string_view kCustom = "custom:";
  if (value.substr(0, kCustom.size()) == kCustom) return load_custom_constraint(std::string(value.substr(kCustom.size())));
  return preset(value);
}

std::string format_score(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw TemplateError(fmt::format("score {} outside [0, 1]", score));
  return fmt::format("{:.2f}", score);
}

std::string render_generation_instruction(std::string_view code, const ConstraintSpec& constraint) {
  Bindings b{{"code", std::string(code)}};
  bind_constraint(b, constraint);
  return render(template_body(TemplateId::Generation), b);
}

std::string render_reconstruction_instruction(std::string_view representation) {
  return render(template_body(TemplateId::Reconstruction), {{"representation", std::string(representation)}});
}

std::string render_feedback(double semantic_score, const ConstraintSpec& constraint, double constraint_score) {
  Bindings b{{"semantic_score", format_score(semantic_score)}, {"constraint_score", format_score(constraint_score)}};
  if (!constraint.score_name.empty()) b.emplace("constraint_score_name", constraint.score_name);
  bind_constraint(b, constraint);
  return render(template_body(TemplateId::Feedback), b);
}

std::string render_judge_instruction(const ConstraintSpec& constraint, std::string_view representation) {
  return render(constraint.judge_template, {{"representation", std::string(representation)}});
}

}  // namespace ergen::prompts
