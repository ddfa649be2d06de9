#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ergen/cst.hpp"

namespace ergen::similarity {

inline constexpr int kMaxOrder = 4;

// Lexical tokens of a program, comments and layout removed, in source order.
struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

using Fingerprint = std::array<std::uint8_t, 16>;

// Multiset of fingerprints of every subtree rooted at an internal CST node.
class SubtreeFingerprintBag {
 public:
  void add(const Fingerprint& fp, std::size_t times = 1);
  std::size_t count(const Fingerprint& fp) const;
  std::size_t size() const noexcept { return size_; }
  const std::map<Fingerprint, std::size_t>& counts() const noexcept { return counts_; }

  // Sum over fingerprints of min(multiplicity here, multiplicity in other).
  std::size_t clipped_overlap(const SubtreeFingerprintBag& other) const;

  friend bool operator==(const SubtreeFingerprintBag&, const SubtreeFingerprintBag&) = default;

 private:
  std::map<Fingerprint, std::size_t> counts_;
  std::size_t size_ = 0;
};

// s^n_ij (clipped overlap) and s^n_j (n-grams on the candidate side).
struct OrderCounts {
  std::size_t overlap = 0;
  std::size_t total = 0;
  friend bool operator==(const OrderCounts&, const OrderCounts&) = default;
};

struct Weights {
  double text = 0.5;
  double syntax = 0.5;

  // Throws ConfigError unless both are non-negative and sum to one.
  void validate() const;
};

struct SimilarityBreakdown {
  double sim_text = 0.0;
  double sim_syntax = 0.0;
  double combined = 0.0;
  std::array<OrderCounts, kMaxOrder> per_order{};
  std::size_t subtree_overlap = 0;
  std::size_t subtree_total = 0;
  // Set when the reconstructed code did not parse; sim_syntax is then 0.
  bool parse_failure = false;

  friend bool operator==(const SimilarityBreakdown&, const SimilarityBreakdown&) = default;
};

TokenSequence tokenize(std::string_view code, const cst::Frontend& frontend = cst::python());

// Per-order clipped n-gram counts, n = 1..4. The second argument is the
// candidate whose n-grams form the denominator.
std::array<OrderCounts, kMaxOrder> ngram_counts(const TokenSequence& reference, const TokenSequence& candidate);

// Geometric mean of the per-order precisions. Orders the candidate is too
// short to contain are dropped and the remaining orders reweighted; any
// order with zero overlap makes the score 0. Two empty sequences score 1.
double sim_text(const TokenSequence& reference, const TokenSequence& candidate);
double sim_text(const std::array<OrderCounts, kMaxOrder>& counts, bool reference_empty, bool candidate_empty);

Fingerprint fingerprint(const cst::Node& node);
SubtreeFingerprintBag subtree_bag(const cst::Node& root);

// Throws ParseFailure if the code does not parse.
SubtreeFingerprintBag extract_subtrees(std::string_view code, const cst::Frontend& frontend = cst::python());

// |bag(original) ∩ bag(reconstructed)| / |bag(reconstructed)|. Throws
// InputError when the original does not parse; an unparseable
// reconstruction scores 0.
double sim_syntax(std::string_view original, std::string_view reconstructed,
                  const cst::Frontend& frontend = cst::python());

SimilarityBreakdown semantic_score(std::string_view original, std::string_view reconstructed,
                                   const Weights& weights = {}, const cst::Frontend& frontend = cst::python());

}  // namespace ergen::similarity
