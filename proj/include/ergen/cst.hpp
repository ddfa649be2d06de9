#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ergen::cst {

enum class TokenKind { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker, Error };

std::string_view kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;
  int column = 0;
};

// A concrete syntax tree. Leaves carry a token; internal nodes carry the
// grammar symbol that produced them and always have at least one child.
struct Node {
  std::string type;
  std::string text;
  std::vector<Node> children;

  bool is_leaf() const noexcept { return children.empty(); }
};

// A language front end: a lexer plus a grammar-based parser producing a CST.
class Frontend {
 public:
  virtual ~Frontend() = default;

  virtual std::string_view language() const = 0;

  // Total. Lexically invalid regions become Error tokens.
  virtual std::vector<Token> lex(std::string_view source) const = 0;

  // Throws ParseFailure when the source is not in the language.
  virtual Node parse(std::string_view source) const = 0;
};

const Frontend& python();

}  // namespace ergen::cst
