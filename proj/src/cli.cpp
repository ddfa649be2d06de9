#include "ergen/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "ergen/corpus.hpp"
#include "ergen/error.hpp"
#include "ergen/prompts.hpp"
#include "ergen/reflection.hpp"
#include "ergen/similarity.hpp"

namespace ergen::cli {

namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flags that override the config file; unset ones leave it alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> constraint;
  std::optional<double> threshold;
  std::optional<int> max_trials;
  std::optional<std::string> weights;
  std::optional<int> memory_limit;
  std::optional<std::string> mode;
  std::optional<std::string> cassette;
  std::optional<std::string> out;
  std::optional<int> parallel;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> api_key_env;
  std::optional<int> timeout_seconds;
  std::optional<int> max_in_flight;
  std::optional<int> max_attempts;
  bool classify = false;
  bool fail_fast = false;
};

void add_run_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
  cmd.add_option("--constraint", o.constraint, "non-code, comment, pseudocode, flowchart or custom:<file.json>");
  cmd.add_option("--threshold", o.threshold, "Stop once both scores reach this value");
  cmd.add_option("--max-trials", o.max_trials, "Upper bound on reflection trials");
  cmd.add_option("--weights", o.weights, "Text and syntax weights as a,b");
  cmd.add_option("--memory-limit", o.memory_limit, "Previous trials shown to the generator; 0 = all");
  cmd.add_option("--mode", o.mode, "live, record or replay");
  cmd.add_option("--cassette", o.cassette, "Recorded responses (JSON Lines)");
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_option("--endpoint", o.endpoint, "Chat-completions URL");
  cmd.add_option("--model", o.model, "Model name sent to the provider");
  cmd.add_option("--api-key-env", o.api_key_env, "Environment variable holding the credential");
  cmd.add_option("--timeout", o.timeout_seconds, "Per-request timeout in seconds");
  cmd.add_option("--max-in-flight", o.max_in_flight, "Concurrent model requests");
  cmd.add_option("--max-attempts", o.max_attempts, "Attempts per request for transient failures");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) c = load_config_file(o.config_path, c);
  if (o.constraint) c.constraint = *o.constraint;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.max_trials) c.max_trials = *o.max_trials;
  if (o.weights) c.weights = parse_weights(*o.weights);
  if (o.memory_limit) c.memory_limit = *o.memory_limit;
  if (o.mode) {
    auto m = llm::parse_mode(*o.mode);
    if (!m) throw ConfigError("--mode must be live, record or replay");
    c.mode = *m;
  }
  if (o.cassette) c.cassette = *o.cassette;
  if (o.out) c.out_dir = *o.out;
  if (o.parallel) c.parallel = *o.parallel;
  if (o.endpoint) c.provider.endpoint = *o.endpoint;
  if (o.model) c.provider.model = *o.model;
  if (o.api_key_env) c.provider.api_key_env = *o.api_key_env;
  if (o.timeout_seconds) c.provider.timeout_seconds = *o.timeout_seconds;
  if (o.max_in_flight) c.max_in_flight = *o.max_in_flight;
  if (o.max_attempts) c.max_attempts = *o.max_attempts;
  if (o.classify) c.classify = true;
  if (o.fail_fast) c.fail_fast = true;
  c.validate();
  return c;
}

json scores_json(const scoring::ScorePair& s) { return json{{"semantic", s.semantic}, {"constraint", s.constraint}}; }

json breakdown_json(const similarity::SimilarityBreakdown& b) {
  json orders = json::array();
  for (const auto& c : b.per_order) orders.push_back({c.overlap, c.total});
  return json{{"sim_text", b.sim_text},
              {"sim_syntax", b.sim_syntax},
              {"combined", b.combined},
              {"ngram_counts", orders},
              {"subtree_overlap", b.subtree_overlap},
              {"subtree_total", b.subtree_total},
              {"parse_failure", b.parse_failure}};
}

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

// Transcript files are named NNNNN_<id>.jsonl; the id is what follows the
// first underscore.
std::vector<corpus::NamedTranscript> read_transcripts(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<corpus::NamedTranscript> out;
  for (const auto& f : files) {
    std::string id = f.stem().string();
    if (auto u = id.find('_'); u != std::string::npos) id = id.substr(u + 1);
    out.push_back({id, reflection::parse_transcript(read_text(f))});
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const reflection::RunAborted& e) {
    try {
      e.rethrow_cause();
    } catch (...) {
      return exit_code_for(std::current_exception());
    }
  } catch (const ConfigError&) {
    return kUsage;
  } catch (const TemplateError&) {
    return kUsage;
  } catch (const LoadError&) {
    return kInput;
  } catch (const InputError&) {
    return kInput;
  } catch (const ParseFailure&) {
    return kInput;
  } catch (const SummaryError&) {
    return kInput;
  } catch (const ClientError&) {
    return kClient;
  } catch (const JudgeParseError&) {
    return kJudgeParse;
  } catch (const ScoreParseError&) {
    return kJudgeParse;
  } catch (...) {
    return kFailure;
  }
}

std::unique_ptr<llm::Client> make_client(const RunConfig& config) {
  std::shared_ptr<llm::Cassette> cassette;
  std::shared_ptr<llm::Transport> transport;
  if (config.mode != llm::Mode::Live) {
    if (config.cassette.empty()) {
      throw ConfigError(fmt::format("--cassette is required in {} mode", llm::mode_name(config.mode)));
    }
    if (config.mode == llm::Mode::Replay && !std::filesystem::exists(config.cassette)) {
      throw LoadError("cassette not found: " + config.cassette.string());
    }
    cassette = llm::Cassette::open(config.cassette);
  }
  if (config.mode != llm::Mode::Replay) transport = std::make_shared<llm::HttpTransport>(config.provider);
  llm::ClientOptions options;
  options.mode = config.mode;
  options.max_attempts = config.max_attempts;
  options.backoff = std::chrono::milliseconds(config.backoff_ms);
  options.max_in_flight = config.max_in_flight;
  options.min_interval = std::chrono::milliseconds(config.min_interval_ms);
  return std::make_unique<llm::Client>(options, std::move(transport), std::move(cassette));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generate equivalent representations of code by self-reflection"};
  app.require_subcommand(1);

  Overrides gen_flags;
  std::string code_text;
  std::string code_file;
  std::string snippet_id = "snippet";
  auto* gen = app.add_subcommand("generate", "Run the reflection loop on one snippet");
  add_run_options(*gen, gen_flags);
  auto* code_group = gen->add_option_group("source");
  code_group->add_option("--code", code_text, "Python code inline");
  code_group->add_option("--file", code_file, "Python file")->check(CLI::ExistingFile);
  code_group->require_option(1);
  gen->add_option("--id", snippet_id, "Identifier used in output names");

  Overrides corpus_flags;
  std::string corpus_file;
  auto* run_corpus = app.add_subcommand("corpus", "Run the reflection loop over a JSONL corpus");
  add_run_options(*run_corpus, corpus_flags);
  run_corpus->add_option("corpus", corpus_file, "JSONL with id and code per line")->required();
  run_corpus->add_option("--parallel", corpus_flags.parallel, "Snippets processed concurrently");
  run_corpus->add_flag("--classify", corpus_flags.classify, "Label each best representation");
  run_corpus->add_flag("--fail-fast", corpus_flags.fail_fast, "Stop at the first failed entry");

  std::string sim_a, sim_b, sim_weights = "0.5,0.5";
  auto* sim = app.add_subcommand("sim", "Score a reconstruction against an original");
  sim->add_option("original", sim_a, "Original Python file")->required()->check(CLI::ExistingFile);
  sim->add_option("reconstructed", sim_b, "Reconstructed Python file")->required()->check(CLI::ExistingFile);
  sim->add_option("--weights", sim_weights, "Text and syntax weights as a,b");

  std::string summary_dir, summary_out;
  auto* summarize = app.add_subcommand("summarize", "Rebuild summary files from saved transcripts");
  summarize->add_option("transcripts", summary_dir, "Directory of transcript files")->required();
  summarize->add_option("--out", summary_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) {
      const auto w = parse_weights(sim_weights);
      const auto b = similarity::semantic_score(read_text(sim_a), read_text(sim_b), w);
      out << dump(breakdown_json(b)) << '\n';
      return kOk;
    }

    if (*summarize) {
      const auto summary = corpus::summarize(read_transcripts(summary_dir));
      corpus::write_summary(summary_out, summary);
      out << corpus::summary_table(summary);
      return kOk;
    }

    if (*gen) {
      const RunConfig config = resolve_config(gen_flags);
      const auto constraint = prompts::constraint_from_flag(config.constraint);
      const reflection::CodeSnippet snippet{snippet_id, code_file.empty() ? code_text : read_text(code_file)};
      auto client = make_client(config);
      reflection::ReflectionResult result;
      try {
        result = reflection::run_reflection(snippet, constraint, config, *client);
      } catch (const reflection::RunAborted& e) {
        reflection::write_transcript(corpus::transcript_path(config.out_dir, 0, snippet.id), e.partial_transcript());
        throw;
      }
      const auto path = corpus::transcript_path(config.out_dir, 0, snippet.id);
      reflection::write_transcript(path, result.transcript);
      out << dump(json{{"id", snippet.id},
                       {"best_representation", result.best_representation},
                       {"best_trial", result.best_trial_index},
                       {"scores", scores_json(result.best_scores)},
                       {"trials", result.transcript.size()},
                       {"terminated_by", reflection::termination_name(result.terminated_by)},
                       {"transcript", path.string()}})
          << '\n';
      return kOk;
    }

    const RunConfig config = resolve_config(corpus_flags);
    const auto constraint = prompts::constraint_from_flag(config.constraint);
    const auto entries = corpus::load_corpus(corpus_file);
    auto client = make_client(config);
    const auto summary = corpus::run_corpus(entries, constraint, config, *client);
    out << corpus::summary_table(summary);
    return summary.aggregates.failed ? kPartial : kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }
}

}  // namespace ergen::cli
