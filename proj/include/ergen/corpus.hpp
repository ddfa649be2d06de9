#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ergen/config.hpp"
#include "ergen/llm_client.hpp"
#include "ergen/prompts.hpp"
#include "ergen/reflection.hpp"
#include "ergen/scoring.hpp"

namespace ergen::corpus {

using CorpusEntry = reflection::CodeSnippet;

// One JSON object per line with string fields "id" and "code"; blank lines
// are skipped. Throws LoadError naming the line, the duplicate id, or every
// id whose code does not parse.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);
std::vector<CorpusEntry> parse_corpus(std::string_view text, std::string_view source_name = "<corpus>");

enum class ErCategory {
  Dictionary,
  Table,
  Xml,
  Flowchart,
  ParaphrasedApis,
  Pseudocode,
  Sql,
  NlComment,
  ArithmeticExpression,
  Other,
};

inline constexpr std::array<ErCategory, 10> kAllCategories = {
    ErCategory::Dictionary, ErCategory::Table,      ErCategory::Xml, ErCategory::Flowchart,
    ErCategory::ParaphrasedApis, ErCategory::Pseudocode, ErCategory::Sql, ErCategory::NlComment,
    ErCategory::ArithmeticExpression, ErCategory::Other};

std::string_view category_label(ErCategory c);
// Case, surrounding quotes/punctuation and space-vs-hyphen are ignored.
std::optional<ErCategory> parse_category(std::string_view reply);

std::string render_classification_instruction(std::string_view representation);

// Asks the judge model for one label; anything unrecognized is Other.
ErCategory classify_er(std::string_view representation, llm::Client& client, const ModelParams& params = {0.0, 16});

inline constexpr int kHistogramBins = 10;
inline constexpr double kHighQualityBar = 0.9;

struct Distribution {
  double mean = 0.0;
  double median = 0.0;
  // Bin k counts scores in [k/10, (k+1)/10); the last bin also holds 1.0.
  std::array<std::size_t, kHistogramBins> histogram{};
  friend bool operator==(const Distribution&, const Distribution&) = default;
};

Distribution describe(const std::vector<double>& scores);
int histogram_bin(double score);

struct EntryRow {
  std::string id;
  bool ok = false;
  std::string error_kind;
  std::string error;
  scoring::ScorePair first_trial;
  scoring::ScorePair final_scores;
  int trials_used = 0;
  int best_trial = 0;
  std::string terminated_by;
  std::string best_representation;
  std::optional<ErCategory> category;
  friend bool operator==(const EntryRow&, const EntryRow&) = default;
};

struct Aggregates {
  std::size_t entries = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  Distribution first_semantic;
  Distribution first_constraint;
  Distribution final_semantic;
  Distribution final_constraint;
  // Completed entries whose final semantic and constraint scores both
  // exceed kHighQualityBar.
  std::size_t high_quality = 0;
  double high_quality_fraction = 0.0;
  std::map<std::string, std::size_t> categories;
  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct RunSummary {
  std::vector<EntryRow> rows;
  Aggregates aggregates;
};

Aggregates aggregate(const std::vector<EntryRow>& rows);

// Row for a completed transcript: first = trial 0, final = the first trial
// with the highest score sum. Throws SummaryError on an empty transcript.
EntryRow row_from_transcript(const std::string& id, const std::vector<reflection::TrialRecord>& transcript);

struct NamedTranscript {
  std::string id;
  std::vector<reflection::TrialRecord> trials;
};

RunSummary summarize(const std::vector<NamedTranscript>& transcripts);

// Runs the reflection loop over every entry with `config.parallel` workers,
// writes one transcript per entry under out_dir/transcripts and returns the
// summary in corpus order. Failed entries are recorded, not thrown, unless
// config.fail_fast is set.
RunSummary run_corpus(const std::vector<CorpusEntry>& corpus, const prompts::ConstraintSpec& constraint,
                      const RunConfig& config, llm::Client& client);

std::filesystem::path transcript_path(const std::filesystem::path& out_dir, std::size_t index, std::string_view id);

nlohmann::json summary_to_json(const RunSummary& summary);
std::string summary_table(const RunSummary& summary);
std::string histogram_csv(const RunSummary& summary);

// summary.json, summary.txt and histograms.csv under out_dir.
void write_summary(const std::filesystem::path& out_dir, const RunSummary& summary);

}  // namespace ergen::corpus
