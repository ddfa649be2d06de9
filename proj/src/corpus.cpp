#include "ergen/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "ergen/error.hpp"

namespace ergen::corpus {

namespace {

using nlohmann::json;

struct ErrorInfo {
  std::string kind;
  std::string message;
};

ErrorInfo describe_error(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ReplayMiss& e) {
    return {"replay_miss", e.what()};
  } catch (const TimeoutError& e) {
    return {"timeout", e.what()};
  } catch (const AuthError& e) {
    return {"auth", e.what()};
  } catch (const ClientError& e) {
    return {"client", e.what()};
  } catch (const JudgeParseError& e) {
    return {"judge_parse", e.what()};
  } catch (const InputError& e) {
    return {"input", e.what()};
  } catch (const std::exception& e) {
    return {"error", e.what()};
  }
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (unsigned char c : id.substr(0, 80)) {
    out.push_back(std::isalnum(c) || c == '-' || c == '_' || c == '.' ? static_cast<char>(c) : '_');
  }
  return out.empty() ? "entry" : out;
}

json pair_json(const scoring::ScorePair& p) { return json{{"semantic", p.semantic}, {"constraint", p.constraint}}; }

json distribution_json(const Distribution& d) {
  return json{{"mean", d.mean}, {"median", d.median}, {"histogram", d.histogram}};
}

std::string dump(const json& j, int indent) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

}  // namespace

// ---- loading ----------------------------------------------------------------

std::vector<CorpusEntry> parse_corpus(std::string_view text, std::string_view source_name) {
  std::vector<CorpusEntry> entries;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CorpusEntry e;
    try {
      const json j = json::parse(line);
      e.id = j.at("id").get<std::string>();
      e.code = j.at("code").get<std::string>();
    } catch (const json::exception& ex) {
      throw LoadError(fmt::format("{}:{}: malformed record: {}", source_name, line_no, ex.what()));
    }
    if (e.id.empty()) throw LoadError(fmt::format("{}:{}: empty id", source_name, line_no));
    if (!seen.insert(e.id).second) throw LoadError(fmt::format("{}:{}: duplicate id '{}'", source_name, line_no, e.id));
    entries.push_back(std::move(e));
  }
  std::vector<std::string> bad;
  for (const auto& e : entries) {
    try {
      cst::python().parse(e.code);
    } catch (const ParseFailure&) {
      bad.push_back(e.id);
    }
  }
  if (!bad.empty()) {
    std::string ids;
    for (const auto& id : bad) ids += (ids.empty() ? "" : ", ") + id;
    throw LoadError(fmt::format("{}: code does not parse for ids: {}", source_name, ids));
  }
  return entries;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read corpus " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), path.string());
}

// ---- classification ---------------------------------------------------------

std::string_view category_label(ErCategory c) {
  switch (c) {
    case ErCategory::Dictionary: return "dictionary";
    case ErCategory::Table: return "table";
    case ErCategory::Xml: return "xml";
    case ErCategory::Flowchart: return "flowchart";
    case ErCategory::ParaphrasedApis: return "paraphrased-apis";
    case ErCategory::Pseudocode: return "pseudocode";
    case ErCategory::Sql: return "sql";
    case ErCategory::NlComment: return "nl-comment";
    case ErCategory::ArithmeticExpression: return "arithmetic-expression";
    case ErCategory::Other: return "other";
  }
  return "other";
}

std::optional<ErCategory> parse_category(std::string_view reply) {
  std::string norm;
  for (unsigned char c : reply) {
    if (c == ' ' || c == '_') {
      norm.push_back('-');
    } else {
      norm.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  const auto strip = " \t\r\n-'\"`.*:";
  const auto first = norm.find_first_not_of(strip);
  if (first == std::string::npos) return std::nullopt;
  norm = norm.substr(first, norm.find_last_not_of(strip) - first + 1);
  if (norm == "natural-language-comment") return ErCategory::NlComment;
  for (auto c : kAllCategories) {
    if (norm == category_label(c)) return c;
  }
  return std::nullopt;
}

std::string render_classification_instruction(std::string_view representation) {
  return prompts::render(prompts::named_template("classification"), {{"representation", std::string(representation)}});
}

ErCategory classify_er(std::string_view representation, llm::Client& client, const ModelParams& params) {
  llm::ChatRequest request;
  request.user_text = render_classification_instruction(representation);
  request.temperature = params.temperature;
  request.max_output_tokens = params.max_output_tokens;
  return parse_category(client.complete(request)).value_or(ErCategory::Other);
}

// ---- summaries --------------------------------------------------------------

int histogram_bin(double score) {
  int bin = 0;
  for (int k = 1; k < kHistogramBins; ++k) {
    if (score >= k / 10.0) bin = k;
  }
  return bin;
}

Distribution describe(const std::vector<double>& scores) {
  Distribution d;
  if (scores.empty()) return d;
  d.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  d.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  for (double s : scores) ++d.histogram[histogram_bin(s)];
  return d;
}

Aggregates aggregate(const std::vector<EntryRow>& rows) {
  Aggregates a;
  a.entries = rows.size();
  std::vector<double> fs, fc, ls, lc;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++a.failed;
      continue;
    }
    ++a.completed;
    fs.push_back(r.first_trial.semantic);
    fc.push_back(r.first_trial.constraint);
    ls.push_back(r.final_scores.semantic);
    lc.push_back(r.final_scores.constraint);
    if (r.final_scores.semantic > kHighQualityBar && r.final_scores.constraint > kHighQualityBar) ++a.high_quality;
    if (r.category) ++a.categories[std::string(category_label(*r.category))];
  }
  a.first_semantic = describe(fs);
  a.first_constraint = describe(fc);
  a.final_semantic = describe(ls);
  a.final_constraint = describe(lc);
  a.high_quality_fraction = a.completed ? static_cast<double>(a.high_quality) / static_cast<double>(a.completed) : 0.0;
  return a;
}

EntryRow row_from_transcript(const std::string& id, const std::vector<reflection::TrialRecord>& transcript) {
  if (transcript.empty()) throw SummaryError("transcript for '" + id + "' is empty");
  EntryRow row;
  row.id = id;
  row.ok = true;
  row.first_trial = transcript.front().scores;
  std::size_t best = 0;
  for (std::size_t i = 1; i < transcript.size(); ++i) {
    if (transcript[i].scores.sum() > transcript[best].scores.sum()) best = i;
  }
  row.final_scores = transcript[best].scores;
  row.best_trial = transcript[best].index;
  row.best_representation = transcript[best].representation;
  row.trials_used = static_cast<int>(transcript.size());
  return row;
}

RunSummary summarize(const std::vector<NamedTranscript>& transcripts) {
  RunSummary s;
  for (const auto& t : transcripts) s.rows.push_back(row_from_transcript(t.id, t.trials));
  s.aggregates = aggregate(s.rows);
  return s;
}

// ---- running ----------------------------------------------------------------

std::filesystem::path transcript_path(const std::filesystem::path& out_dir, std::size_t index, std::string_view id) {
  return out_dir / "transcripts" / fmt::format("{:05d}_{}.jsonl", index, sanitize(id));
}

RunSummary run_corpus(const std::vector<CorpusEntry>& corpus, const prompts::ConstraintSpec& constraint,
                      const RunConfig& config, llm::Client& client) {
  config.validate();
  std::vector<EntryRow> rows(corpus.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex failure_mutex;
  std::exception_ptr first_failure;

  auto run_entry = [&](std::size_t i) {
    const CorpusEntry& entry = corpus[i];
    std::vector<reflection::TrialRecord> transcript;
    EntryRow row;
    try {
      auto result = reflection::run_reflection(entry, constraint, config, client);
      transcript = std::move(result.transcript);
      row = row_from_transcript(entry.id, transcript);
      row.terminated_by = std::string(reflection::termination_name(result.terminated_by));
      if (config.classify) row.category = classify_er(row.best_representation, client);
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      auto ep = std::current_exception();
      try {
        std::rethrow_exception(ep);
      } catch (const reflection::RunAborted& aborted) {
        if (transcript.empty()) transcript = aborted.partial_transcript();
        try {
          aborted.rethrow_cause();
        } catch (...) {
          ep = std::current_exception();
        }
      } catch (...) {
      }
      const ErrorInfo info = describe_error(ep);
      row = EntryRow{};
      row.id = entry.id;
      row.error_kind = info.kind;
      row.error = info.message;
      row.trials_used = static_cast<int>(transcript.size());
      if (config.fail_fast) {
        std::lock_guard lock(failure_mutex);
        if (!first_failure) first_failure = ep;
        stop = true;
      }
    }
    reflection::write_transcript(transcript_path(config.out_dir, i, entry.id), transcript);
    rows[i] = std::move(row);
  };

  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= corpus.size()) break;
      try {
        run_entry(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!first_failure) first_failure = std::current_exception();
        stop = true;
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallel), corpus.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_failure) std::rethrow_exception(first_failure);

  RunSummary summary;
  summary.rows = std::move(rows);
  summary.aggregates = aggregate(summary.rows);
  write_summary(config.out_dir, summary);
  return summary;
}

// ---- output -----------------------------------------------------------------

json summary_to_json(const RunSummary& summary) {
  json entries = json::array();
  for (const auto& r : summary.rows) {
    json e{{"id", r.id}, {"status", r.ok ? "ok" : "failed"}, {"trials_used", r.trials_used}};
    if (r.ok) {
      e["first_trial"] = pair_json(r.first_trial);
      e["final"] = pair_json(r.final_scores);
      e["best_trial"] = r.best_trial;
      e["terminated_by"] = r.terminated_by;
      e["best_representation"] = r.best_representation;
      e["category"] = r.category ? json(category_label(*r.category)) : json(nullptr);
    } else {
      e["error_kind"] = r.error_kind;
      e["error"] = r.error;
    }
    entries.push_back(std::move(e));
  }
  const Aggregates& a = summary.aggregates;
  json edges = json::array();
  for (int k = 0; k <= kHistogramBins; ++k) edges.push_back(k / 10.0);
  return json{
      {"entries", entries},
      {"aggregates",
       {{"entries", a.entries},
        {"completed", a.completed},
        {"failed", a.failed},
        {"first_trial",
         {{"semantic", distribution_json(a.first_semantic)}, {"constraint", distribution_json(a.first_constraint)}}},
        {"final",
         {{"semantic", distribution_json(a.final_semantic)}, {"constraint", distribution_json(a.final_constraint)}}},
        {"high_quality", {{"bar", kHighQualityBar}, {"count", a.high_quality}, {"fraction", a.high_quality_fraction}}},
        {"categories", a.categories}}},
      {"histogram_bin_edges", edges}};
}

std::string summary_table(const RunSummary& summary) {
  std::string out = fmt::format("{:<24} {:<7} {:>6} {:>4} {:>9} {:>9} {:>9} {:>9}  {}\n", "id", "status", "trials",
                                "best", "first_sem", "first_con", "final_sem", "final_con", "category");
  for (const auto& r : summary.rows) {
    if (r.ok) {
      out += fmt::format("{:<24} {:<7} {:>6} {:>4} {:>9.4f} {:>9.4f} {:>9.4f} {:>9.4f}  {}\n", r.id, "ok",
                         r.trials_used, r.best_trial, r.first_trial.semantic, r.first_trial.constraint,
                         r.final_scores.semantic, r.final_scores.constraint,
                         r.category ? category_label(*r.category) : "-");
    } else {
      out += fmt::format("{:<24} {:<7} {:>6} {:>4} {}: {}\n", r.id, "failed", r.trials_used, "-", r.error_kind,
                         r.error);
    }
  }
  const Aggregates& a = summary.aggregates;
  out += fmt::format("\ncompleted {} of {} ({} failed)\n", a.completed, a.entries, a.failed);
  out += fmt::format("both final scores > {:.2f}: {} ({:.4f})\n", kHighQualityBar, a.high_quality,
                     a.high_quality_fraction);
  auto line = [&](const char* name, const Distribution& d) {
    out += fmt::format("{:<18} mean {:.4f}  median {:.4f}\n", name, d.mean, d.median);
  };
  line("first semantic", a.first_semantic);
  line("first constraint", a.first_constraint);
  line("final semantic", a.final_semantic);
  line("final constraint", a.final_constraint);
  for (const auto& [label, n] : a.categories) out += fmt::format("category {:<22} {}\n", label, n);
  return out;
}

std::string histogram_csv(const RunSummary& summary) {
  const Aggregates& a = summary.aggregates;
  std::string out = "bin_lower,bin_upper,first_semantic,first_constraint,final_semantic,final_constraint\n";
  for (int k = 0; k < kHistogramBins; ++k) {
    out += fmt::format("{:.1f},{:.1f},{},{},{},{}\n", k / 10.0, (k + 1) / 10.0, a.first_semantic.histogram[k],
                       a.first_constraint.histogram[k], a.final_semantic.histogram[k], a.final_constraint.histogram[k]);
  }
  return out;
}

void write_summary(const std::filesystem::path& out_dir, const RunSummary& summary) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (out_dir / name).string());
    out << text;
  };
  write("summary.json", dump(summary_to_json(summary), 2) + "\n");
  write("summary.txt", summary_table(summary));
  write("histograms.csv", histogram_csv(summary));
}

}  // namespace ergen::corpus
