#include "corpus_script.hpp"

#include <regex>

#include <fmt/core.h>

#include "ergen/python.hpp"

namespace testing_support {

namespace {

enum class Recon { Exact, Renamed, Fragment, Garbage };

struct Step {
  Recon recon;
  std::vector<std::string> judge;
};

std::string first_line(const std::string& code) { return code.substr(0, code.find('\n')) + "\n    pass"; }

// Renames the first non-keyword identifier everywhere it occurs.
std::string renamed(const std::string& code) {
  for (const auto& t : ergen::python::lex(code)) {
    if (t.kind == ergen::cst::TokenKind::Name && !ergen::python::is_keyword(t.text)) {
      return std::regex_replace(code, std::regex("\\b" + t.text + "\\b"), "renamed");
    }
  }
  return code;
}

std::string reconstruction(Recon kind, const std::string& code, std::size_t entry) {
  switch (kind) {
    case Recon::Exact:
      return entry % 2 ? "```python\n" + code + "```" : code;
    case Recon::Renamed:
      return "```\n" + renamed(code) + "```\nThis keeps the original behaviour.";
    case Recon::Fragment:
      return first_line(code);
    case Recon::Garbage:
      return "I cannot produce code for this (";
  }
  return code;
}

const std::vector<std::vector<Step>>& plans() {
  using R = Recon;
  static const std::vector<std::vector<Step>> p = {
      {{R::Exact, {"0.95"}}},
      {{R::Renamed, {"0.3"}}, {R::Exact, {"0.92"}}},
      {{R::Exact, {"0.1"}}, {R::Renamed, {"0.6"}}, {R::Exact, {"0.85"}}, {R::Exact, {"0.93"}}},
      {{R::Fragment, {"0.7"}}, {R::Renamed, {"0.8"}}, {R::Exact, {"0.88"}}, {R::Renamed, {"0.9"}}},
      {{R::Garbage, {"0.9"}}, {R::Exact, {"Score: 0.91"}}},
      {{R::Renamed, {"0.5"}}, {R::Renamed, {"0.6"}}, {R::Renamed, {"0.7"}}, {R::Renamed, {"0.75"}}},
      {{R::Exact, {"The score is 0.97 because it reads as prose."}}},
      {{R::Exact, {"It looks fine to me.", "0.95"}}},
      {{R::Renamed, {"0.4"}}, {R::Exact, {"0.99"}}},
      {{R::Fragment, {"0.2"}}, {R::Exact, {"0.5"}}, {R::Renamed, {"0.95"}}, {R::Exact, {"0.96"}}},
  };
  return p;
}

}  // namespace

void script_fixture_corpus(ScriptedTransport& transport, const std::vector<ergen::corpus::CorpusEntry>& corpus) {
  static const char* kLabels[] = {"pseudocode", "NL comment", "Table.", "flowchart", "\"dictionary\"", "sql",
                                  "paraphrased apis", "xml", "arithmetic-expression", "something else"};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& plan = plans()[i % plans().size()];
    std::vector<ScriptedTrial> trials;
    for (std::size_t k = 0; k < plan.size(); ++k) {
      ScriptedTrial t;
      t.representation = fmt::format("Representation {} of {}:\nStep 1: describe the \"{}\" snippet.\nStep 2: keep "
                                     "its behaviour → unchanged.",
                                     k + 1, corpus[i].id, corpus[i].id);
      t.reconstruction = reconstruction(plan[k].recon, corpus[i].code, i);
      t.judge_replies = plan[k].judge;
      transport.set_classification(t.representation, kLabels[(i + k) % 10]);
      trials.push_back(std::move(t));
    }
    transport.script(corpus[i].code, std::move(trials));
  }
}

ergen::RunConfig fixture_config() {
  ergen::RunConfig c;
  c.threshold = 0.9;
  c.max_trials = 4;
  c.classify = true;
  c.mode = ergen::llm::Mode::Replay;
  c.backoff_ms = 0;
  return c;
}

std::filesystem::path fixture_dir() { return ERGEN_FIXTURE_DIR; }

}  // namespace testing_support
