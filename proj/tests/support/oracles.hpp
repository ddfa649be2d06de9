#pragma once

// Brute-force reference implementations. They share only the front end
// (lexer and parser) with the library and count matches by explicit
// pairing instead of hashing.

#include <string>
#include <string_view>
#include <vector>

namespace oracle {

struct NgramStats {
  long overlap = 0;
  long total = 0;
};

// For each candidate n-gram, claim the first unclaimed equal n-gram of the
// reference. Returns stats for n = 1..4.
std::vector<NgramStats> ngram_stats(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);

// Product of precisions over the orders the candidate can hold, raised to
// one over their number.
double sim_text(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);

// Every internal node's full subtree printed as an s-expression.
std::vector<std::string> subtree_strings(std::string_view code);

// Greedy pairing of subtree strings; 0 when the reconstruction does not parse.
double sim_syntax(std::string_view original, std::string_view reconstructed);

}  // namespace oracle
