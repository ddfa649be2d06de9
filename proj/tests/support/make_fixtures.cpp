// Re-records tests/fixtures/corpus10: cassette.jsonl from the scripted
// model, then the expected outputs by replaying that cassette.
//
//   make_fixtures [fixture_dir]

#include <filesystem>
#include <iostream>
#include <memory>

#include "corpus_script.hpp"
#include "ergen/corpus.hpp"
#include "ergen/prompts.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : testing_support::fixture_dir() / "corpus10";
  try {
    const auto corpus = ergen::corpus::load_corpus(dir / "corpus.jsonl");
    const auto constraint = ergen::prompts::preset("non-code");

    fs::remove(dir / "cassette.jsonl");
    auto transport = std::make_shared<testing_support::ScriptedTransport>();
    testing_support::script_fixture_corpus(*transport, corpus);
    auto cassette = ergen::llm::Cassette::open(dir / "cassette.jsonl");
    ergen::RunConfig config = testing_support::fixture_config();
    config.mode = ergen::llm::Mode::Record;
    config.parallel = 1;
    config.out_dir = dir / "record_scratch";
    {
      ergen::llm::Client client({ergen::llm::Mode::Record}, transport, cassette);
      ergen::corpus::run_corpus(corpus, constraint, config, client);
    }
    fs::remove_all(config.out_dir);

    fs::remove_all(dir / "expected");
    config.mode = ergen::llm::Mode::Replay;
    config.out_dir = dir / "expected";
    ergen::llm::Client replay({ergen::llm::Mode::Replay}, nullptr, ergen::llm::Cassette::open(dir / "cassette.jsonl"));
    const auto summary = ergen::corpus::run_corpus(corpus, constraint, config, replay);
    std::cout << ergen::corpus::summary_table(summary) << cassette->size() << " cassette entries\n";
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
