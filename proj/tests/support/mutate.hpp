#pragma once

#include <random>
#include <string>
#include <string_view>

namespace testing_support {

// Applies 1 to 3 random token or line edits: rename, renumber, swap an
// operator, drop a token, or duplicate, delete or swap lines. The result may
// not parse.
std::string mutate(std::string_view code, std::mt19937& rng);

}  // namespace testing_support
