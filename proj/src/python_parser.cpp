#include <algorithm>
#include <array>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ergen/error.hpp"
#include "ergen/python.hpp"

namespace ergen::python {

namespace {

using cst::Node;
using cst::Token;
using cst::TokenKind;

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};

constexpr int kMaxNesting = 200;

constexpr std::array<std::string_view, 13> kAugAssign = {"+=", "-=", "*=", "@=", "/=", "%=", "&=",
                                                         "|=", "^=", "<<=", ">>=", "**=", "//="};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::EndMarker) {
      throw ParseFailure("token stream must end with ENDMARKER", 0, 0);
    }
  }

  Node file_input() {
    std::vector<Node> kids;
    while (!at(TokenKind::EndMarker)) {
      if (at(TokenKind::Newline)) {
        kids.push_back(take());
      } else {
        kids.push_back(stmt());
      }
    }
    kids.push_back(take());
    return Node{"file_input", "", std::move(kids)};
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool at_op(std::string_view op, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Op && peek(k).text == op;
  }
  bool at_kw(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Name && peek(k).text == kw;
  }
  bool at_any_op(std::initializer_list<std::string_view> ops) const {
    return std::any_of(ops.begin(), ops.end(), [&](std::string_view op) { return at_op(op); });
  }

  Node take() {
    const Token& t = peek();
    if (t.kind == TokenKind::Error) fail("invalid token");
    if (pos_ < toks_.size() - 1) ++pos_;
    return Node{std::string(cst::kind_name(t.kind)), t.text, {}};
  }

  Node expect(TokenKind kind, std::string_view what) {
    if (!at(kind)) fail("expected " + std::string(what));
    return take();
  }
  Node expect_op(std::string_view op) {
    if (!at_op(op)) fail("expected '" + std::string(op) + "'");
    return take();
  }
  Node expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'");
    return take();
  }
  Node expect_name() {
    if (!at(TokenKind::Name) || is_keyword(peek().text)) fail("expected identifier");
    return take();
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string near = t.text.empty() ? std::string(cst::kind_name(t.kind)) : "'" + t.text + "'";
    throw ParseFailure(message + " near " + near, t.line, t.column + 1);
  }

  static Node finish(std::string_view type, std::vector<Node> kids) {
    if (kids.size() == 1) return std::move(kids.front());
    return Node{std::string(type), "", std::move(kids)};
  }

  // Whether the current token can begin an expression.
  bool starts_expr(bool allow_star = true) const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::String:
        return true;
      case TokenKind::Name:
        return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
               t.text == "not" || t.text == "lambda" || t.text == "await";
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "..." || (allow_star && t.text == "*");
      default:
        return false;
    }
  }

  bool at_comp_for() const { return at_kw("for") || (at_kw("async") && at_kw("for", 1)); }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("expression nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  // ---- statements ----------------------------------------------------------

  Node stmt() {
    if (at_kw("if")) return if_stmt();
    if (at_kw("while")) return while_stmt();
    if (at_kw("for")) return for_stmt();
    if (at_kw("try")) return try_stmt();
    if (at_kw("with")) return with_stmt();
    if (at_kw("def")) return funcdef();
    if (at_kw("class")) return classdef();
    if (at_op("@")) return decorated();
    if (at_kw("async")) return async_stmt();
    return simple_stmt();
  }

  Node simple_stmt() {
    std::vector<Node> kids;
    kids.push_back(small_stmt());
    while (at_op(";")) {
      kids.push_back(take());
      if (at(TokenKind::Newline)) break;
      kids.push_back(small_stmt());
    }
    kids.push_back(expect(TokenKind::Newline, "end of statement"));
    return finish("simple_stmt", std::move(kids));
  }

  Node small_stmt() {
    if (at_kw("pass") || at_kw("break") || at_kw("continue")) return take();
    if (at_kw("del")) return keyword_then("del_stmt", [this] { return exprlist(); });
    if (at_kw("return")) {
      std::vector<Node> kids;
      kids.push_back(take());
      if (starts_expr()) kids.push_back(testlist_star_expr());
      return finish("return_stmt", std::move(kids));
    }
    if (at_kw("raise")) return raise_stmt();
    if (at_kw("yield")) return yield_expr();
    if (at_kw("import")) return keyword_then("import_name", [this] { return dotted_as_names(); });
    if (at_kw("from")) return import_from();
    if (at_kw("global")) return name_list_stmt("global_stmt");
    if (at_kw("nonlocal")) return name_list_stmt("nonlocal_stmt");
    if (at_kw("assert")) {
      std::vector<Node> kids;
      kids.push_back(take());
      kids.push_back(test());
      if (at_op(",")) {
        kids.push_back(take());
        kids.push_back(test());
      }
      return finish("assert_stmt", std::move(kids));
    }
    return expr_stmt();
  }

  template <typename F>
  Node keyword_then(std::string_view type, F rest) {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(rest());
    return finish(type, std::move(kids));
  }

  Node expr_stmt() {
    std::vector<Node> kids;
    kids.push_back(testlist_star_expr());
    if (at_op(":")) {
      std::vector<Node> ann;
      ann.push_back(take());
      ann.push_back(test());
      if (at_op("=")) {
        ann.push_back(take());
        ann.push_back(at_kw("yield") ? yield_expr() : testlist_star_expr());
      }
      kids.push_back(finish("annassign", std::move(ann)));
      return finish("expr_stmt", std::move(kids));
    }
    if (peek().kind == TokenKind::Op &&
        std::find(kAugAssign.begin(), kAugAssign.end(), peek().text) != kAugAssign.end()) {
      kids.push_back(take());
      kids.push_back(at_kw("yield") ? yield_expr() : testlist());
      return finish("expr_stmt", std::move(kids));
    }
    while (at_op("=")) {
      kids.push_back(take());
      kids.push_back(at_kw("yield") ? yield_expr() : testlist_star_expr());
    }
    return finish("expr_stmt", std::move(kids));
  }

  Node raise_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    if (starts_expr(false)) {
      kids.push_back(test());
      if (at_kw("from")) {
        kids.push_back(take());
        kids.push_back(test());
      }
    }
    return finish("raise_stmt", std::move(kids));
  }

  Node name_list_stmt(std::string_view type) {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(expect_name());
    while (at_op(",")) {
      kids.push_back(take());
      kids.push_back(expect_name());
    }
    return finish(type, std::move(kids));
  }

  Node dotted_name() {
    std::vector<Node> kids;
    kids.push_back(expect_name());
    while (at_op(".")) {
      kids.push_back(take());
      kids.push_back(expect_name());
    }
    return finish("dotted_name", std::move(kids));
  }

  Node dotted_as_names() {
    std::vector<Node> kids;
    auto item = [this] {
      std::vector<Node> k;
      k.push_back(dotted_name());
      if (at_kw("as")) {
        k.push_back(take());
        k.push_back(expect_name());
      }
      return finish("dotted_as_name", std::move(k));
    };
    kids.push_back(item());
    while (at_op(",")) {
      kids.push_back(take());
      kids.push_back(item());
    }
    return finish("dotted_as_names", std::move(kids));
  }

  Node import_from() {
    std::vector<Node> kids;
    kids.push_back(take());
    bool has_source = false;
    while (at_op(".") || at_op("...")) {
      kids.push_back(take());
      has_source = true;
    }
    if (!at_kw("import")) {
      kids.push_back(dotted_name());
      has_source = true;
    }
    if (!has_source) fail("expected module name");
    kids.push_back(expect_kw("import"));
    if (at_op("*")) {
      kids.push_back(take());
    } else if (at_op("(")) {
      kids.push_back(take());
      kids.push_back(import_as_names());
      kids.push_back(expect_op(")"));
    } else {
      kids.push_back(import_as_names());
    }
    return finish("import_from", std::move(kids));
  }

  Node import_as_names() {
    std::vector<Node> kids;
    auto item = [this] {
      std::vector<Node> k;
      k.push_back(expect_name());
      if (at_kw("as")) {
        k.push_back(take());
        k.push_back(expect_name());
      }
      return finish("import_as_name", std::move(k));
    };
    kids.push_back(item());
    while (at_op(",")) {
      kids.push_back(take());
      if (!at(TokenKind::Name)) break;
      kids.push_back(item());
    }
    return finish("import_as_names", std::move(kids));
  }

  // ---- compound statements -------------------------------------------------

  void clause(std::vector<Node>& kids) {
    kids.push_back(expect_op(":"));
    kids.push_back(suite());
  }

  Node suite() {
    if (!at(TokenKind::Newline)) return simple_stmt();
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(expect(TokenKind::Indent, "an indented block"));
    do {
      kids.push_back(stmt());
    } while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker));
    kids.push_back(expect(TokenKind::Dedent, "dedent"));
    return finish("suite", std::move(kids));
  }

  void else_clause(std::vector<Node>& kids) {
    if (at_kw("else")) {
      kids.push_back(take());
      clause(kids);
    }
  }

  Node if_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(namedexpr_test());
    clause(kids);
    while (at_kw("elif")) {
      kids.push_back(take());
      kids.push_back(namedexpr_test());
      clause(kids);
    }
    else_clause(kids);
    return finish("if_stmt", std::move(kids));
  }

  Node while_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(namedexpr_test());
    clause(kids);
    else_clause(kids);
    return finish("while_stmt", std::move(kids));
  }

  Node for_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(exprlist());
    kids.push_back(expect_kw("in"));
    kids.push_back(testlist_star_expr());
    clause(kids);
    else_clause(kids);
    return finish("for_stmt", std::move(kids));
  }

  Node try_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    clause(kids);
    bool handled = false;
    while (at_kw("except")) {
      std::vector<Node> ex;
      ex.push_back(take());
      if (at_op("*")) ex.push_back(take());
      if (starts_expr(false)) {
        ex.push_back(test());
        if (at_kw("as")) {
          ex.push_back(take());
          ex.push_back(expect_name());
        }
      }
      kids.push_back(finish("except_clause", std::move(ex)));
      clause(kids);
      handled = true;
    }
    if (handled) else_clause(kids);
    if (at_kw("finally")) {
      kids.push_back(take());
      clause(kids);
      handled = true;
    }
    if (!handled) fail("expected 'except' or 'finally'");
    return finish("try_stmt", std::move(kids));
  }

  Node with_item() {
    std::vector<Node> kids;
    kids.push_back(test());
    if (at_kw("as")) {
      kids.push_back(take());
      kids.push_back(expr());
    }
    return finish("with_item", std::move(kids));
  }

  Node with_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    if (at_op("(")) {
      // Parenthesized with-items; fall back to an ordinary expression when
      // the parentheses turn out to belong to the first item.
      const std::size_t saved = pos_;
      try {
        std::vector<Node> items;
        items.push_back(take());
        items.push_back(with_item());
        while (at_op(",")) {
          items.push_back(take());
          if (at_op(")")) break;
          items.push_back(with_item());
        }
        items.push_back(expect_op(")"));
        if (!at_op(":")) fail("expected ':'");
        for (auto& n : items) kids.push_back(std::move(n));
        clause(kids);
        return finish("with_stmt", std::move(kids));
      } catch (const ParseFailure&) {
        pos_ = saved;
      }
    }
    kids.push_back(with_item());
    while (at_op(",")) {
      kids.push_back(take());
      kids.push_back(with_item());
    }
    clause(kids);
    return finish("with_stmt", std::move(kids));
  }

  Node funcdef() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(expect_name());
    std::vector<Node> params;
    params.push_back(expect_op("("));
    if (!at_op(")")) params.push_back(arguments_list("typedargslist", true, ")"));
    params.push_back(expect_op(")"));
    kids.push_back(finish("parameters", std::move(params)));
    if (at_op("->")) {
      kids.push_back(take());
      kids.push_back(test());
    }
    clause(kids);
    return finish("funcdef", std::move(kids));
  }

  // Parameter lists for def (annotated) and lambda (bare names).
  Node arguments_list(std::string_view type, bool annotated, std::string_view closer) {
    std::vector<Node> kids;
    auto param_name = [&] {
      std::vector<Node> k;
      k.push_back(expect_name());
      if (annotated && at_op(":")) {
        k.push_back(take());
        k.push_back(test());
      }
      return finish("tname", std::move(k));
    };
    while (true) {
      if (at_op("**")) {
        kids.push_back(take());
        kids.push_back(param_name());
      } else if (at_op("*")) {
        kids.push_back(take());
        if (at(TokenKind::Name)) kids.push_back(param_name());
      } else if (at_op("/")) {
        kids.push_back(take());
      } else {
        kids.push_back(param_name());
        if (at_op("=")) {
          kids.push_back(take());
          kids.push_back(test());
        }
      }
      if (!at_op(",")) break;
      kids.push_back(take());
      if (at_op(closer)) break;
    }
    return finish(type, std::move(kids));
  }

  Node classdef() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(expect_name());
    if (at_op("(")) {
      kids.push_back(take());
      if (!at_op(")")) kids.push_back(arglist());
      kids.push_back(expect_op(")"));
    }
    clause(kids);
    return finish("classdef", std::move(kids));
  }

  Node decorated() {
    std::vector<Node> decorators;
    while (at_op("@")) {
      std::vector<Node> d;
      d.push_back(take());
      d.push_back(namedexpr_test());
      d.push_back(expect(TokenKind::Newline, "newline after decorator"));
      decorators.push_back(finish("decorator", std::move(d)));
    }
    std::vector<Node> kids;
    kids.push_back(finish("decorators", std::move(decorators)));
    if (at_kw("def")) {
      kids.push_back(funcdef());
    } else if (at_kw("class")) {
      kids.push_back(classdef());
    } else if (at_kw("async") && at_kw("def", 1)) {
      kids.push_back(async_stmt());
    } else {
      fail("expected function or class definition after decorator");
    }
    return finish("decorated", std::move(kids));
  }

  Node async_stmt() {
    std::vector<Node> kids;
    kids.push_back(take());
    if (at_kw("def")) {
      kids.push_back(funcdef());
    } else if (at_kw("with")) {
      kids.push_back(with_stmt());
    } else if (at_kw("for")) {
      kids.push_back(for_stmt());
    } else {
      fail("expected 'def', 'with' or 'for' after 'async'");
    }
    return finish("async_stmt", std::move(kids));
  }

  // ---- expressions ---------------------------------------------------------

  Node test_or_star() { return at_op("*") ? star_expr() : test(); }
  Node namedexpr_or_star() { return at_op("*") ? star_expr() : namedexpr_test(); }

  Node testlist_star_expr() {
    Node first = test_or_star();
    if (!at_op(",")) return first;
    std::vector<Node> kids;
    kids.push_back(std::move(first));
    while (at_op(",")) {
      kids.push_back(take());
      if (!starts_expr()) break;
      kids.push_back(test_or_star());
    }
    return finish("testlist_star_expr", std::move(kids));
  }

  Node testlist() {
    Node first = test();
    if (!at_op(",")) return first;
    std::vector<Node> kids;
    kids.push_back(std::move(first));
    while (at_op(",")) {
      kids.push_back(take());
      if (!starts_expr(false)) break;
      kids.push_back(test());
    }
    return finish("testlist", std::move(kids));
  }

  Node exprlist() {
    auto item = [this] { return at_op("*") ? star_expr() : expr(); };
    Node first = item();
    if (!at_op(",")) return first;
    std::vector<Node> kids;
    kids.push_back(std::move(first));
    while (at_op(",")) {
      kids.push_back(take());
      if (!starts_expr()) break;
      kids.push_back(item());
    }
    return finish("exprlist", std::move(kids));
  }

  Node star_expr() {
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(expr());
    return finish("star_expr", std::move(kids));
  }

  Node namedexpr_test() {
    Node t = test();
    if (!at_op(":=")) return t;
    std::vector<Node> kids;
    kids.push_back(std::move(t));
    kids.push_back(take());
    kids.push_back(test());
    return finish("namedexpr_test", std::move(kids));
  }

  Node test() {
    DepthGuard guard(*this);
    if (at_kw("lambda")) return lambdef(false);
    Node cond = or_test();
    if (!at_kw("if")) return cond;
    std::vector<Node> kids;
    kids.push_back(std::move(cond));
    kids.push_back(take());
    kids.push_back(or_test());
    kids.push_back(expect_kw("else"));
    kids.push_back(test());
    return finish("test", std::move(kids));
  }

  Node test_nocond() { return at_kw("lambda") ? lambdef(true) : or_test(); }

  Node lambdef(bool nocond) {
    std::vector<Node> kids;
    kids.push_back(take());
    if (!at_op(":")) kids.push_back(arguments_list("varargslist", false, ":"));
    kids.push_back(expect_op(":"));
    kids.push_back(nocond ? test_nocond() : test());
    return finish(nocond ? "lambdef_nocond" : "lambdef", std::move(kids));
  }

  template <typename Sub>
  Node keyword_chain(std::string_view type, std::string_view kw, Sub sub) {
    std::vector<Node> kids;
    kids.push_back((this->*sub)());
    while (at_kw(kw)) {
      kids.push_back(take());
      kids.push_back((this->*sub)());
    }
    return finish(type, std::move(kids));
  }

  template <typename Sub>
  Node operator_chain(std::string_view type, std::initializer_list<std::string_view> ops, Sub sub) {
    std::vector<Node> kids;
    kids.push_back((this->*sub)());
    while (at_any_op(ops)) {
      kids.push_back(take());
      kids.push_back((this->*sub)());
    }
    return finish(type, std::move(kids));
  }

  Node or_test() { return keyword_chain("or_test", "or", &Parser::and_test); }
  Node and_test() { return keyword_chain("and_test", "and", &Parser::not_test); }

  Node not_test() {
    if (!at_kw("not")) return comparison();
    DepthGuard guard(*this);
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(not_test());
    return finish("not_test", std::move(kids));
  }

  bool at_comp_op() const {
    return at_any_op({"<", ">", "==", ">=", "<=", "!="}) || at_kw("in") || at_kw("is") ||
           (at_kw("not") && at_kw("in", 1));
  }

  Node comparison() {
    std::vector<Node> kids;
    kids.push_back(expr());
    while (at_comp_op()) {
      std::vector<Node> op;
      if (at_kw("not")) {
        op.push_back(take());
        op.push_back(take());
      } else if (at_kw("is")) {
        op.push_back(take());
        if (at_kw("not")) op.push_back(take());
      } else {
        op.push_back(take());
      }
      kids.push_back(finish("comp_op", std::move(op)));
      kids.push_back(expr());
    }
    return finish("comparison", std::move(kids));
  }

  Node expr() { return operator_chain("expr", {"|"}, &Parser::xor_expr); }
  Node xor_expr() { return operator_chain("xor_expr", {"^"}, &Parser::and_expr); }
  Node and_expr() { return operator_chain("and_expr", {"&"}, &Parser::shift_expr); }
  Node shift_expr() { return operator_chain("shift_expr", {"<<", ">>"}, &Parser::arith_expr); }
  Node arith_expr() { return operator_chain("arith_expr", {"+", "-"}, &Parser::term); }
  Node term() { return operator_chain("term", {"*", "@", "/", "%", "//"}, &Parser::factor); }

  Node factor() {
    if (!at_any_op({"+", "-", "~"})) return power();
    DepthGuard guard(*this);
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(factor());
    return finish("factor", std::move(kids));
  }

  Node power() {
    std::vector<Node> kids;
    kids.push_back(atom_expr());
    if (at_op("**")) {
      kids.push_back(take());
      kids.push_back(factor());
    }
    return finish("power", std::move(kids));
  }

  Node atom_expr() {
    std::vector<Node> kids;
    if (at_kw("await")) kids.push_back(take());
    kids.push_back(atom());
    while (at_op("(") || at_op("[") || at_op(".")) kids.push_back(trailer());
    return finish("atom_expr", std::move(kids));
  }

  Node trailer() {
    std::vector<Node> kids;
    if (at_op("(")) {
      kids.push_back(take());
      if (!at_op(")")) kids.push_back(arglist());
      kids.push_back(expect_op(")"));
    } else if (at_op("[")) {
      kids.push_back(take());
      kids.push_back(subscriptlist());
      kids.push_back(expect_op("]"));
    } else {
      kids.push_back(take());
      kids.push_back(expect_name());
    }
    return finish("trailer", std::move(kids));
  }

  Node atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
        return take();
      case TokenKind::String: {
        std::vector<Node> kids;
        while (at(TokenKind::String)) kids.push_back(take());
        return finish("atom", std::move(kids));
      }
      case TokenKind::Name:
        if (is_keyword(t.text) && t.text != "None" && t.text != "True" && t.text != "False") {
          fail("unexpected keyword");
        }
        return take();
      case TokenKind::Op:
        if (t.text == "...") return take();
        if (t.text == "(" || t.text == "[" || t.text == "{") return bracketed();
        break;
      case TokenKind::Indent:
        fail("unexpected indent");
      default:
        break;
    }
    fail("invalid syntax");
  }

  Node bracketed() {
    DepthGuard guard(*this);
    std::vector<Node> kids;
    const std::string open = peek().text;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : "}";
    kids.push_back(take());
    if (!at_op(close)) {
      if (open == "{") {
        kids.push_back(dictorsetmaker());
      } else if (open == "(" && at_kw("yield")) {
        kids.push_back(yield_expr());
      } else {
        kids.push_back(testlist_comp());
      }
    }
    kids.push_back(expect_op(close));
    return Node{"atom", "", std::move(kids)};
  }

  Node testlist_comp() {
    std::vector<Node> kids;
    kids.push_back(namedexpr_or_star());
    if (at_comp_for()) {
      kids.push_back(comp_for());
    } else {
      while (at_op(",")) {
        kids.push_back(take());
        if (!starts_expr()) break;
        kids.push_back(namedexpr_or_star());
      }
    }
    return finish("testlist_comp", std::move(kids));
  }

  Node dictorsetmaker() {
    std::vector<Node> kids;
    bool is_dict = false;
    auto dict_item = [&] {
      if (at_op("**")) {
        kids.push_back(take());
        kids.push_back(expr());
      } else {
        kids.push_back(test());
        kids.push_back(expect_op(":"));
        kids.push_back(test());
      }
    };
    if (at_op("**")) {
      is_dict = true;
      dict_item();
    } else {
      kids.push_back(test_or_star());
      if (at_op(":")) {
        is_dict = true;
        kids.push_back(take());
        kids.push_back(test());
      }
    }
    if (at_comp_for()) {
      kids.push_back(comp_for());
      return finish("dictorsetmaker", std::move(kids));
    }
    while (at_op(",")) {
      kids.push_back(take());
      if (at_op("}")) break;
      if (is_dict) {
        dict_item();
      } else {
        kids.push_back(test_or_star());
      }
    }
    return finish("dictorsetmaker", std::move(kids));
  }

  Node comp_for() {
    std::vector<Node> kids;
    if (at_kw("async")) kids.push_back(take());
    kids.push_back(expect_kw("for"));
    kids.push_back(exprlist());
    kids.push_back(expect_kw("in"));
    kids.push_back(or_test());
    if (at_comp_for() || at_kw("if")) kids.push_back(comp_iter());
    return finish("comp_for", std::move(kids));
  }

  Node comp_iter() {
    if (at_comp_for()) return comp_for();
    std::vector<Node> kids;
    kids.push_back(take());
    kids.push_back(test_nocond());
    if (at_comp_for() || at_kw("if")) kids.push_back(comp_iter());
    return finish("comp_if", std::move(kids));
  }

  Node subscriptlist() {
    std::vector<Node> kids;
    kids.push_back(subscript());
    while (at_op(",")) {
      kids.push_back(take());
      if (at_op("]")) break;
      kids.push_back(subscript());
    }
    return finish("subscriptlist", std::move(kids));
  }

  Node subscript() {
    std::vector<Node> kids;
    if (!at_op(":")) {
      Node lower = at_op("*") ? star_expr() : namedexpr_test();
      if (!at_op(":")) return lower;
      kids.push_back(std::move(lower));
    }
    kids.push_back(take());
    if (starts_expr(false)) kids.push_back(test());
    if (at_op(":")) {
      std::vector<Node> step;
      step.push_back(take());
      if (starts_expr(false)) step.push_back(test());
      kids.push_back(finish("sliceop", std::move(step)));
    }
    return finish("subscript", std::move(kids));
  }

  Node arglist() {
    std::vector<Node> kids;
    kids.push_back(argument());
    while (at_op(",")) {
      kids.push_back(take());
      if (at_op(")")) break;
      kids.push_back(argument());
    }
    return finish("arglist", std::move(kids));
  }

  Node argument() {
    std::vector<Node> kids;
    if (at_op("*") || at_op("**")) {
      kids.push_back(take());
      kids.push_back(test());
      return finish("argument", std::move(kids));
    }
    kids.push_back(test());
    if (at_op(":=") || at_op("=")) {
      kids.push_back(take());
      kids.push_back(test());
    } else if (at_comp_for()) {
      kids.push_back(comp_for());
    }
    return finish("argument", std::move(kids));
  }

  Node yield_expr() {
    std::vector<Node> kids;
    kids.push_back(take());
    if (at_kw("from")) {
      std::vector<Node> arg;
      arg.push_back(take());
      arg.push_back(test());
      kids.push_back(finish("yield_arg", std::move(arg)));
    } else if (starts_expr()) {
      kids.push_back(testlist_star_expr());
    }
    return finish("yield_expr", std::move(kids));
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

cst::Node parse(const std::vector<cst::Token>& tokens) { return Parser(tokens).file_input(); }

}  // namespace ergen::python
