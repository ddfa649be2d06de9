#pragma once

#include <string_view>
#include <vector>

#include "ergen/cst.hpp"

namespace ergen::python {

// Tokenizes Python 3 source following the reference tokenizer: comments and
// blank lines are dropped, NEWLINE/INDENT/DEDENT are synthesized, and the
// stream always ends with ENDMARKER. Stray characters, unterminated strings
// and inconsistent dedents produce Error tokens instead of throwing.
std::vector<cst::Token> lex(std::string_view source);

// Parses a token stream into a lib2to3-style CST: nonterminals with a single
// child are collapsed into that child, the file_input root never is.
cst::Node parse(const std::vector<cst::Token>& tokens);

bool is_keyword(std::string_view word);

}  // namespace ergen::python
