#include "ergen/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>

#include "ergen/digest.hpp"
#include "ergen/error.hpp"

namespace ergen::similarity {

namespace {

using cst::TokenKind;

bool is_lexical(const cst::Token& t) {
  switch (t.kind) {
    case TokenKind::Name:
    case TokenKind::Number:
    case TokenKind::String:
    case TokenKind::Op:
    case TokenKind::Error:
      return !t.text.empty();
    default:
      return false;
  }
}

// Length-prefixed join so distinct n-grams never share a key.
std::unordered_map<std::string, std::size_t> ngram_multiset(const TokenSequence& seq, std::size_t n) {
  std::unordered_map<std::string, std::size_t> grams;
  if (seq.size() < n) return grams;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::string key;
    for (std::size_t k = i; k < i + n; ++k) {
      key += std::to_string(seq.tokens[k].size());
      key += ':';
      key += seq.tokens[k];
    }
    ++grams[key];
  }
  return grams;
}

void accumulate_bag(const cst::Node& node, SubtreeFingerprintBag& bag, Fingerprint& out) {
  std::string buffer;
  if (node.is_leaf()) {
    buffer.reserve(node.type.size() + node.text.size() + 2);
    buffer += 'L';
    buffer += node.type;
    buffer += '\0';
    buffer += node.text;
  } else {
    buffer += 'N';
    buffer += node.type;
    buffer += '\0';
    buffer += std::to_string(node.children.size());
    buffer += '\0';
    for (const auto& child : node.children) {
      Fingerprint child_fp{};
      accumulate_bag(child, bag, child_fp);
      buffer.append(reinterpret_cast<const char*>(child_fp.data()), child_fp.size());
    }
  }
  const Sha256 digest = sha256(buffer);
  std::copy_n(digest.begin(), out.size(), out.begin());
  if (!node.is_leaf()) bag.add(out);
}

std::optional<SubtreeFingerprintBag> try_extract(std::string_view code, const cst::Frontend& frontend) {
  try {
    return extract_subtrees(code, frontend);
  } catch (const ParseFailure&) {
    return std::nullopt;
  }
}

struct SyntaxCounts {
  std::size_t overlap = 0;
  std::size_t total = 0;
  bool parse_failure = false;
};

SyntaxCounts syntax_counts(std::string_view original, std::string_view reconstructed,
                           const cst::Frontend& frontend) {
  SubtreeFingerprintBag reference;
  try {
    reference = extract_subtrees(original, frontend);
  } catch (const ParseFailure& e) {
    throw InputError(std::string("original code does not parse: ") + e.what());
  }
  auto candidate = try_extract(reconstructed, frontend);
  if (!candidate) return {0, 0, true};
  return {reference.clipped_overlap(*candidate), candidate->size(), false};
}

double ratio(const SyntaxCounts& c) {
  if (c.parse_failure || c.total == 0) return 0.0;
  return static_cast<double>(c.overlap) / static_cast<double>(c.total);
}

}  // namespace

void SubtreeFingerprintBag::add(const Fingerprint& fp, std::size_t times) {
  if (times == 0) return;
  counts_[fp] += times;
  size_ += times;
}

std::size_t SubtreeFingerprintBag::count(const Fingerprint& fp) const {
  auto it = counts_.find(fp);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t SubtreeFingerprintBag::clipped_overlap(const SubtreeFingerprintBag& other) const {
  std::size_t overlap = 0;
  for (const auto& [fp, n] : counts_) overlap += std::min(n, other.count(fp));
  return overlap;
}

void Weights::validate() const {
  if (!(text >= 0.0) || !(syntax >= 0.0)) throw ConfigError("similarity weights must be non-negative");
  if (std::fabs(text + syntax - 1.0) > 1e-9) throw ConfigError("similarity weights must sum to 1");
}

TokenSequence tokenize(std::string_view code, const cst::Frontend& frontend) {
  TokenSequence seq;
  for (auto& t : frontend.lex(code)) {
    if (is_lexical(t)) seq.tokens.push_back(std::move(t.text));
  }
  return seq;
}

std::array<OrderCounts, kMaxOrder> ngram_counts(const TokenSequence& reference, const TokenSequence& candidate) {
  std::array<OrderCounts, kMaxOrder> counts{};
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    auto& c = counts[n - 1];
    c.total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
    if (c.total == 0) continue;
    const auto ref = ngram_multiset(reference, n);
    for (const auto& [gram, k] : ngram_multiset(candidate, n)) {
      auto it = ref.find(gram);
      if (it != ref.end()) c.overlap += std::min(k, it->second);
    }
  }
  return counts;
}

double sim_text(const std::array<OrderCounts, kMaxOrder>& counts, bool reference_empty, bool candidate_empty) {
  if (candidate_empty) return reference_empty ? 1.0 : 0.0;
  double log_sum = 0.0;
  int active = 0;
  for (const auto& c : counts) {
    if (c.total == 0) continue;
    if (c.overlap == 0) return 0.0;
    log_sum += std::log(static_cast<double>(c.overlap) / static_cast<double>(c.total));
    ++active;
  }
  return std::exp(log_sum / active);
}

double sim_text(const TokenSequence& reference, const TokenSequence& candidate) {
  return sim_text(ngram_counts(reference, candidate), reference.empty(), candidate.empty());
}

Fingerprint fingerprint(const cst::Node& node) {
  SubtreeFingerprintBag scratch;
  Fingerprint fp{};
  accumulate_bag(node, scratch, fp);
  return fp;
}

SubtreeFingerprintBag subtree_bag(const cst::Node& root) {
  SubtreeFingerprintBag bag;
  Fingerprint fp{};
  accumulate_bag(root, bag, fp);
  return bag;
}

SubtreeFingerprintBag extract_subtrees(std::string_view code, const cst::Frontend& frontend) {
  return subtree_bag(frontend.parse(code));
}

double sim_syntax(std::string_view original, std::string_view reconstructed, const cst::Frontend& frontend) {
  return ratio(syntax_counts(original, reconstructed, frontend));
}

SimilarityBreakdown semantic_score(std::string_view original, std::string_view reconstructed,
                                   const Weights& weights, const cst::Frontend& frontend) {
  weights.validate();
  SimilarityBreakdown out;
  const SyntaxCounts syntax = syntax_counts(original, reconstructed, frontend);
  const TokenSequence ref = tokenize(original, frontend);
  const TokenSequence cand = tokenize(reconstructed, frontend);
  out.per_order = ngram_counts(ref, cand);
  out.sim_text = sim_text(out.per_order, ref.empty(), cand.empty());
  out.sim_syntax = ratio(syntax);
  out.subtree_overlap = syntax.overlap;
  out.subtree_total = syntax.total;
  out.parse_failure = syntax.parse_failure;
  out.combined = std::clamp(weights.text * out.sim_text + weights.syntax * out.sim_syntax, 0.0, 1.0);
  return out;
}

}  // namespace ergen::similarity
