#include "ergen/cst.hpp"

#include "ergen/python.hpp"

namespace ergen::cst {

std::string_view kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Name: return "NAME";
    case TokenKind::Number: return "NUMBER";
    case TokenKind::String: return "STRING";
    case TokenKind::Op: return "OP";
    case TokenKind::Newline: return "NEWLINE";
    case TokenKind::Indent: return "INDENT";
    case TokenKind::Dedent: return "DEDENT";
    case TokenKind::EndMarker: return "ENDMARKER";
    case TokenKind::Error: return "ERRORTOKEN";
  }
  return "ERRORTOKEN";
}

namespace {

class PythonFrontend final : public Frontend {
 public:
  std::string_view language() const override { return "python"; }
  std::vector<Token> lex(std::string_view source) const override { return python::lex(source); }
  Node parse(std::string_view source) const override { return python::parse(python::lex(source)); }
};

}  // namespace

const Frontend& python() {
  static const PythonFrontend frontend;
  return frontend;
}

}  // namespace ergen::cst
