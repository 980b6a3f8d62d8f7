#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace hengine::lex {

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer";
    case Tok::FloatLit: return "float";
    case Tok::StringLit: return "string";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::ColonEq: return "':='";
    case Tok::Eq: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Not: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::Amp: return "'&'";
    case Tok::OrOr: return "'||'";
    case Tok::Pipe: return "'|'";
    case Tok::Dot: return "'.'";
    case Tok::Hash: return "'#'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

struct Cursor {
  std::string_view src;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  bool done() const { return i >= src.size(); }
  char cur() const { return src[i]; }
  char ahead() const { return i + 1 < src.size() ? src[i + 1] : '\0'; }
  void advance() {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }
};

[[noreturn]] void lex_fail(const Cursor& c, std::string msg) {
  throw Error(ErrorCode::SyntaxError, std::move(msg), c.line, c.col);
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  Cursor c{src};
  while (true) {
    // Skip whitespace and comments.
    while (!c.done()) {
      char ch = c.cur();
      if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        c.advance();
      } else if (ch == '/' && c.ahead() == '/') {
        while (!c.done() && c.cur() != '\n') c.advance();
      } else {
        break;
      }
    }
    Token t;
    t.line = c.line;
    t.col = c.col;
    if (c.done()) {
      t.kind = Tok::Eof;
      out.push_back(t);
      return out;
    }

    char ch = c.cur();
    auto single = [&](Tok k) {
      t.kind = k;
      c.advance();
    };
    auto pair_or = [&](char second, Tok two, Tok one) {
      c.advance();
      if (!c.done() && c.cur() == second) {
        t.kind = two;
        c.advance();
      } else {
        t.kind = one;
      }
    };

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = c.i;
      while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.cur())) || c.cur() == '_')) {
        c.advance();
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(start, c.i - start));
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = c.i;
      while (!c.done() && std::isdigit(static_cast<unsigned char>(c.cur()))) c.advance();
      bool is_float = false;
      if (!c.done() && c.cur() == '.' && std::isdigit(static_cast<unsigned char>(c.ahead()))) {
        is_float = true;
        c.advance();
        while (!c.done() && std::isdigit(static_cast<unsigned char>(c.cur()))) c.advance();
      }
      if (!c.done() && (c.cur() == 'e' || c.cur() == 'E')) {
        std::size_t mark = c.i;
        c.advance();
        if (!c.done() && (c.cur() == '+' || c.cur() == '-')) c.advance();
        if (!c.done() && std::isdigit(static_cast<unsigned char>(c.cur()))) {
          is_float = true;
          while (!c.done() && std::isdigit(static_cast<unsigned char>(c.cur()))) c.advance();
        } else {
          // Not an exponent after all; 'e' starts the next token.
          c.i = mark;
        }
      }
      std::string_view num = src.substr(start, c.i - start);
      if (is_float) {
        t.kind = Tok::FloatLit;
        auto res = std::from_chars(num.data(), num.data() + num.size(), t.float_val);
        if (res.ec != std::errc{}) lex_fail(c, "bad float literal");
      } else {
        t.kind = Tok::IntLit;
        auto res = std::from_chars(num.data(), num.data() + num.size(), t.int_val);
        if (res.ec != std::errc{}) lex_fail(c, "integer literal out of range");
      }
    } else if (ch == '"') {
      c.advance();
      std::string s;
      while (true) {
        if (c.done() || c.cur() == '\n') lex_fail(c, "unterminated string literal");
        char d = c.cur();
        if (d == '"') {
          c.advance();
          break;
        }
        if (d == '\\') {
          c.advance();
          if (c.done()) lex_fail(c, "unterminated string literal");
          switch (c.cur()) {
            case '"': s.push_back('"'); break;
            case '\\': s.push_back('\\'); break;
            case 'n': s.push_back('\n'); break;
            case 't': s.push_back('\t'); break;
            case 'r': s.push_back('\r'); break;
            default: lex_fail(c, std::string("unknown escape '\\") + c.cur() + "'");
          }
          c.advance();
        } else {
          s.push_back(d);
          c.advance();
        }
      }
      t.kind = Tok::StringLit;
      t.text = std::move(s);
    } else {
      switch (ch) {
        case '{': single(Tok::LBrace); break;
        case '}': single(Tok::RBrace); break;
        case '[': single(Tok::LBracket); break;
        case ']': single(Tok::RBracket); break;
        case '(': single(Tok::LParen); break;
        case ')': single(Tok::RParen); break;
        case ',': single(Tok::Comma); break;
        case '.': single(Tok::Dot); break;
        case '#': single(Tok::Hash); break;
        case '+': single(Tok::Plus); break;
        case '*': single(Tok::Star); break;
        case '/': single(Tok::Slash); break;
        case '%': single(Tok::Percent); break;
        case ':': pair_or('=', Tok::ColonEq, Tok::Colon); break;
        case '=': pair_or('=', Tok::EqEq, Tok::Eq); break;
        case '!': pair_or('=', Tok::NotEq, Tok::Not); break;
        case '<': pair_or('=', Tok::Le, Tok::Lt); break;
        case '>': pair_or('=', Tok::Ge, Tok::Gt); break;
        case '-': pair_or('>', Tok::Arrow, Tok::Minus); break;
        case '&': pair_or('&', Tok::AndAnd, Tok::Amp); break;
        case '|': pair_or('|', Tok::OrOr, Tok::Pipe); break;
        default:
          lex_fail(c, std::string("unexpected character '") + ch + "'");
      }
    }
    out.push_back(std::move(t));
  }
}

Token Stream::expect(Tok k, std::string_view what) {
  if (!at(k)) {
    fail("expected " + std::string(what.empty() ? token_name(k) : what) + ", got " +
         token_name(peek().kind));
  }
  return next();
}

Token Stream::expect_ident(std::string_view what) {
  if (!at(Tok::Ident)) {
    fail("expected " + std::string(what) + ", got " + token_name(peek().kind));
  }
  return next();
}

void Stream::fail(std::string message) const {
  const Token& t = peek();
  throw Error(ErrorCode::SyntaxError, std::move(message), t.line, t.col);
}

}  // namespace hengine::lex
