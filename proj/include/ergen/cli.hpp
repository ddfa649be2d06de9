#pragma once

#include <exception>
#include <memory>
#include <ostream>

#include "ergen/config.hpp"
#include "ergen/llm_client.hpp"

namespace ergen::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,       // bad flags, config or template
  kInput = 3,       // unreadable or unparseable input, corpus or transcript
  kClient = 4,      // network, credentials, timeout, replay miss
  kJudgeParse = 5,  // judge never produced a score
  kPartial = 6,     // corpus finished but some entries failed
};

int exit_code_for(const std::exception_ptr& error);

// Replay and record need a cassette path; live and record need credentials.
std::unique_ptr<llm::Client> make_client(const RunConfig& config);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ergen::cli
