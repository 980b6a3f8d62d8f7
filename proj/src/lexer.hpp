// Token stream shared by the expression parser and the file parsers.
// Keywords are contextual: the lexer only knows identifiers.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hengine/error.hpp"

namespace hengine::lex {

enum class Tok {
  Ident,
  IntLit,
  FloatLit,
  StringLit,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Colon,
  ColonEq,
  Eq,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Arrow,
  Star,
  Slash,
  Percent,
  Not,
  AndAnd,
  Amp,
  OrOr,
  Pipe,
  Dot,
  Hash,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;  // identifier spelling or unescaped string contents
  std::int64_t int_val = 0;
  double float_val = 0.0;
  int line = 1;
  int col = 1;
};

const char* token_name(Tok t);

/// Tokenizes the whole input. Throws Error(SyntaxError) with a position on
/// any character that starts no token.
std::vector<Token> tokenize(std::string_view src);

/// Cursor over a token vector with single-token lookahead helpers.
class Stream {
 public:
  explicit Stream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(std::string_view word) const {
    return peek().kind == Tok::Ident && peek().text == word;
  }
  bool eat(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool eat_ident(std::string_view word) {
    if (!at_ident(word)) return false;
    next();
    return true;
  }
  Token expect(Tok k, std::string_view what);
  Token expect_ident(std::string_view what);
  [[noreturn]] void fail(std::string message) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace hengine::lex
