#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ergen/corpus.hpp"
#include "ergen/error.hpp"
#include "ergen/similarity.hpp"
#include "corpus_script.hpp"
#include "mutate.hpp"
#include "oracles.hpp"

namespace {

namespace sim = ergen::similarity;

std::vector<std::string> toks(std::string_view code) { return sim::tokenize(code).tokens; }

std::vector<ergen::corpus::CorpusEntry> seeds() {
  return ergen::corpus::load_corpus(testing_support::fixture_dir() / "corpus10" / "corpus.jsonl");
}

TEST(Tokenize, DropsCommentsAndLayout) {
  EXPECT_EQ(toks("a = b + c  # add"), (std::vector<std::string>{"a", "=", "b", "+", "c"}));
  EXPECT_EQ(toks("if x:\n    pass\n"), (std::vector<std::string>{"if", "x", ":", "pass"}));
}

TEST(SimText, HandDerivedCase) {
  const double expected = std::pow(5.0 / 7 * 4.0 / 6 * 3.0 / 5 * 2.0 / 4, 0.25);
  const auto ref = toks("a = b + c");
  const auto cand = toks("a = b + c + d");
  EXPECT_NEAR(oracle::sim_text(ref, cand), expected, 1e-12);
  EXPECT_NEAR(sim::sim_text(sim::tokenize("a = b + c"), sim::tokenize("a = b + c + d")), expected, 1e-9);
}

TEST(SimText, PerOrderCountsMatchOracle) {
  const auto counts = sim::ngram_counts(sim::tokenize("a = b + c"), sim::tokenize("a = b + c + d"));
  const auto expected = oracle::ngram_stats(toks("a = b + c"), toks("a = b + c + d"));
  for (int n = 0; n < 4; ++n) {
    EXPECT_EQ(static_cast<long>(counts[n].overlap), expected[n].overlap);
    EXPECT_EQ(static_cast<long>(counts[n].total), expected[n].total);
  }
}

TEST(SimText, ClipsRepeatedTokens) {
  // Candidate repeats "x" four times; the reference has it twice.
  const auto counts = sim::ngram_counts(sim::tokenize("x + x"), sim::tokenize("x x x x"));
  EXPECT_EQ(counts[0].overlap, 2u);
  EXPECT_EQ(counts[0].total, 4u);
}

TEST(SimText, EdgeCases) {
  EXPECT_EQ(sim::sim_text(sim::tokenize(""), sim::tokenize("")), 1.0);
  EXPECT_EQ(sim::sim_text(sim::tokenize("a"), sim::tokenize("")), 0.0);
  EXPECT_EQ(sim::sim_text(sim::tokenize("a b"), sim::tokenize("c d")), 0.0);
  // Shorter than four tokens: only the orders present count.
  EXPECT_NEAR(sim::sim_text(sim::tokenize("a b c"), sim::tokenize("a b")), 1.0, 1e-15);
  EXPECT_NEAR(sim::sim_text(sim::tokenize("a"), sim::tokenize("a b")), 0.0, 1e-15);
}

TEST(SimText, CandidateIsTheDenominator) {
  const auto a = sim::tokenize("x = 1");
  const auto b = sim::tokenize("x = 1 + 2 + 3");
  EXPECT_EQ(sim::sim_text(b, a), 1.0);
  EXPECT_LT(sim::sim_text(a, b), 1.0);
}

TEST(SimSyntax, RenamedAssignmentSharesNoSubtree) {
  const auto x = sim::extract_subtrees("x = 1");
  const auto y = sim::extract_subtrees("y = 1");
  EXPECT_FALSE(x == y);
  EXPECT_EQ(x.size(), y.size());
  EXPECT_EQ(x.clipped_overlap(y), 0u);
  EXPECT_EQ(sim::sim_syntax("x = 1", "y = 1"), oracle::sim_syntax("x = 1", "y = 1"));
}

TEST(SimSyntax, SharedSubtreesCount) {
  const char* a = "def f(a):\n    return a + 1\n";
  const char* b = "def g(a):\n    return a + 1\n";
  const double s = sim::sim_syntax(a, b);
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 1.0);
  EXPECT_NEAR(s, oracle::sim_syntax(a, b), 1e-12);
}

TEST(SimSyntax, UnparseableReconstructionScoresZero) {
  const auto b = sim::semantic_score("x = 1 + 2\n", "x = 1 + 2 +\n");
  EXPECT_TRUE(b.parse_failure);
  EXPECT_EQ(b.sim_syntax, 0.0);
  EXPECT_GT(b.sim_text, 0.0);
  EXPECT_NEAR(b.combined, 0.5 * b.sim_text, 1e-15);
}

TEST(SimSyntax, UnparseableOriginalIsAnInputError) {
  EXPECT_THROW(sim::sim_syntax("def (:", "x = 1"), ergen::InputError);
  EXPECT_THROW(sim::semantic_score("def (:", "x = 1"), ergen::InputError);
}

TEST(SemanticScore, ReflexiveOnCorpus) {
  for (const auto& e : seeds()) {
    const auto b = sim::semantic_score(e.code, e.code);
    EXPECT_EQ(b.combined, 1.0) << e.id;
    EXPECT_EQ(b.sim_text, 1.0) << e.id;
    EXPECT_EQ(b.sim_syntax, 1.0) << e.id;
  }
}

TEST(SemanticScore, WeightsAreValidated) {
  EXPECT_THROW((sim::Weights{0.7, 0.7}.validate()), ergen::ConfigError);
  EXPECT_THROW((sim::Weights{-0.5, 1.5}.validate()), ergen::ConfigError);
  EXPECT_NO_THROW((sim::Weights{1.0, 0.0}.validate()));
  const auto text_only = sim::semantic_score("x = 1", "y = 1", {1.0, 0.0});
  EXPECT_EQ(text_only.combined, text_only.sim_text);
}

TEST(SemanticScore, MatchesOraclesOnMutations) {
  std::mt19937 rng(7);
  const auto corpus = seeds();
  for (int i = 0; i < 200; ++i) {
    const auto& seed = corpus[static_cast<std::size_t>(i) % corpus.size()].code;
    const std::string cand = testing_support::mutate(seed, rng);
    const auto b = sim::semantic_score(seed, cand);
    EXPECT_NEAR(b.sim_text, oracle::sim_text(toks(seed), toks(cand)), 1e-9) << cand;
    EXPECT_NEAR(b.sim_syntax, oracle::sim_syntax(seed, cand), 1e-9) << cand;
    EXPECT_GE(b.combined, 0.0);
    EXPECT_LE(b.combined, 1.0);
  }
}

TEST(SemanticScore, Deterministic) {
  std::mt19937 rng(11);
  const auto corpus = seeds();
  for (const auto& e : corpus) {
    const std::string cand = testing_support::mutate(e.code, rng);
    EXPECT_EQ(sim::semantic_score(e.code, cand), sim::semantic_score(e.code, cand));
  }
}

TEST(SubtreeBag, FingerprintIgnoresNothingStructural) {
  // Same tokens, different grouping.
  EXPECT_FALSE(sim::extract_subtrees("a - b - c") == sim::extract_subtrees("a - (b - c)"));
  EXPECT_TRUE(sim::extract_subtrees("a-b") == sim::extract_subtrees("a - b  # spaced"));
}

TEST(SubtreeBag, OverlapIsMonotoneInAddedSubtrees) {
  // Growing the reconstruction's bag never lowers its clipped overlap with
  // the original's bag.
  std::mt19937 rng(3);
  const auto corpus = seeds();
  for (const auto& e : corpus) {
    const auto orig = sim::extract_subtrees(e.code);
    std::vector<sim::Fingerprint> pool;
    for (const auto& [fp, n] : orig.counts()) pool.insert(pool.end(), n + 1, fp);
    pool.push_back(sim::Fingerprint{});
    sim::SubtreeFingerprintBag recon;
    std::size_t previous = 0;
    for (int k = 0; k < 40; ++k) {
      recon.add(pool[rng() % pool.size()]);
      const std::size_t overlap = orig.clipped_overlap(recon);
      EXPECT_GE(overlap, previous);
      EXPECT_LE(overlap, std::min(orig.size(), recon.size()));
      previous = overlap;
    }
  }
}

}  // namespace
