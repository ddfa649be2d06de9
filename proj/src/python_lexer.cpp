#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <string>
#include <vector>

#include "ergen/python.hpp"

namespace ergen::python {

namespace {

using cst::Token;
using cst::TokenKind;

// Longest first so the first prefix match is the longest operator.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...",
    "!=", "%=", "&=", "**", "*=", "+=", "-=", "->", "//", "/=", ":=", "<<", "<=", "==", ">=",
    ">>", "@=", "^=", "|=",
    "%", "&", "(", ")", "*", "+", ",", "-", ".", "/", ":", ";", "<", "=", ">", "@", "[", "]",
    "^", "{", "|", "}", "~"};

constexpr std::array<std::string_view, 8> kStringPrefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return ident_start(c) || std::isdigit(c); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else if (c == '\n') {
        if (depth_ == 0 && line_has_tokens_) {
          emit(TokenKind::Newline, "", pos_);
          line_has_tokens_ = false;
        }
        if (depth_ == 0) at_line_start_ = true;
        newline_at(pos_ + 1);
        ++pos_;
      } else if (c == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
          newline_at(pos_ + 2);
          pos_ += 2;
        } else {
          significant(TokenKind::Error, pos_, pos_ + 1);
          ++pos_;
        }
      } else if (starts_string()) {
        lex_string();
      } else if (ident_start(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        significant(TokenKind::Name, start, pos_);
      } else if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
        lex_number();
      } else {
        lex_operator();
      }
    }
    if (line_has_tokens_) emit(TokenKind::Newline, "", pos_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", pos_);
    }
    emit(TokenKind::EndMarker, "", pos_);
    return std::move(tokens_);
  }

 private:
  // Returns false when the physical line was blank or comment-only and has
  // been consumed entirely.
  bool handle_indentation() {
    int col = 0;
    std::size_t p = pos_;
    for (; p < src_.size(); ++p) {
      char c = src_[p];
      if (c == ' ') {
        ++col;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
      } else if (c == '\f') {
        col = 0;
      } else {
        break;
      }
    }
    pos_ = p;
    if (p >= src_.size()) return false;
    if (src_[p] == '\n') {
      newline_at(p + 1);
      ++pos_;
      return false;
    }
    if (src_[p] == '#') {
      skip_comment();
      return false;
    }
    at_line_start_ = false;
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, "", pos_);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", pos_);
      }
      if (col != indents_.back()) emit(TokenKind::Error, "", pos_);  // inconsistent dedent
    }
    return true;
  }

  void skip_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }

  bool starts_string() const {
    std::size_t p = pos_;
    while (p < src_.size() && p - pos_ < 2 && std::isalpha(static_cast<unsigned char>(src_[p]))) ++p;
    if (p >= src_.size() || (src_[p] != '\'' && src_[p] != '"')) return false;
    if (p == pos_) return true;
    std::string prefix(src_.substr(pos_, p - pos_));
    std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return std::find(kStringPrefixes.begin(), kStringPrefixes.end(), prefix) != kStringPrefixes.end();
  }

  void lex_string() {
    std::size_t start = pos_;
    while (src_[pos_] != '\'' && src_[pos_] != '"') ++pos_;
    const char quote = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    std::size_t p = pos_ + (triple ? 3 : 1);
    while (p < src_.size()) {
      char c = src_[p];
      if (c == '\\') {
        p += 2;
        continue;
      }
      if (triple) {
        if (c == quote && p + 2 < src_.size() && src_[p + 1] == quote && src_[p + 2] == quote) {
          finish_string(start, p + 3);
          return;
        }
      } else {
        if (c == quote) {
          finish_string(start, p + 1);
          return;
        }
        if (c == '\n') break;
      }
      ++p;
    }
    if (triple) {
      // Unterminated triple-quoted string swallows the rest of the input.
      finish_string(start, src_.size(), TokenKind::Error);
    } else {
      significant(TokenKind::Error, start, pos_ + 1);
      pos_ = pos_ + 1;
    }
  }

  void finish_string(std::size_t start, std::size_t end, TokenKind kind = TokenKind::String) {
    end = std::min(end, src_.size());
    significant(kind, start, end);
    for (std::size_t i = start; i < end; ++i) {
      if (src_[i] == '\n') newline_at(i + 1);
    }
    pos_ = end;
  }

  void lex_number() {
    std::size_t start = pos_;
    auto is_digit_or_sep = [this](std::size_t i) { return i < src_.size() && (digit(src_[i]) || src_[i] == '_'); };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) != nullptr) {
      pos_ += 2;
      while (pos_ < src_.size() && (std::isxdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    } else {
      while (is_digit_or_sep(pos_)) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        while (is_digit_or_sep(pos_)) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && digit(src_[p])) {
          pos_ = p;
          while (is_digit_or_sep(pos_)) ++pos_;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    significant(TokenKind::Number, start, pos_);
  }

  void lex_operator() {
    std::string_view rest = src_.substr(pos_);
    for (auto op : kOperators) {
      if (rest.substr(0, op.size()) == op) {
        if (op == "(" || op == "[" || op == "{") ++depth_;
        if ((op == ")" || op == "]" || op == "}") && depth_ > 0) --depth_;
        significant(TokenKind::Op, pos_, pos_ + op.size());
        pos_ += op.size();
        return;
      }
    }
    significant(TokenKind::Error, pos_, pos_ + 1);
    ++pos_;
  }

  void significant(TokenKind kind, std::size_t start, std::size_t end) {
    emit(kind, std::string(src_.substr(start, end - start)), start);
    line_has_tokens_ = true;
  }

  void emit(TokenKind kind, std::string text, std::size_t at) {
    tokens_.push_back(Token{kind, std::move(text), line_, static_cast<int>(at - std::min(at, line_start_))});
  }

  // Records that a new physical line begins at `next`.
  void newline_at(std::size_t next) {
    ++line_;
    line_start_ = next;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_{0};
  std::vector<Token> tokens_;
};

std::string normalize_newlines(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < source.size() && source[i + 1] == '\n') ++i;
    } else {
      out.push_back(source[i]);
    }
  }
  return out;
}

}  // namespace

std::vector<cst::Token> lex(std::string_view source) {
  const std::string text = normalize_newlines(source);
  return Lexer(text).run();
}

}  // namespace ergen::python
