#pragma once

#include <filesystem>
#include <vector>

#include "ergen/config.hpp"
#include "ergen/corpus.hpp"
#include "scripted.hpp"

namespace testing_support {

// Scripts every entry of the ten-snippet fixture corpus: a mix of threshold
// passes at various trials, runs that exhaust max_trials, a judge reply that
// needs the retry, and unparseable reconstructions.
void script_fixture_corpus(ScriptedTransport& transport, const std::vector<ergen::corpus::CorpusEntry>& corpus);

// Threshold 0.9, four trials, classification on.
ergen::RunConfig fixture_config();

std::filesystem::path fixture_dir();

}  // namespace testing_support
