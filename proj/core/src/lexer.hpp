#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "omqrw/syntax.hpp"

namespace omqrw::detail {

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Dot, Minus, Slash, Turnstile, Arrow, Plus, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

// Tokenizes one line of DSL text. Comments ('#' to end of line) are skipped.
std::vector<Token> tokenize(std::string_view line, int line_no, bool allow_reserved);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(int ahead = 0) const;
  Token next();
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(std::string_view word) const;
  bool accept(Tok k);
  bool accept_ident(std::string_view word);
  Token expect(Tok k, const char* what);
  void expect_ident(std::string_view word);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;
  bool done() const { return at(Tok::End); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view s);

// Reads a name that is not a keyword.
std::string expect_name(TokenStream& ts, const char* what);

// Parses a concept starting at the current token.
Concept parse_concept_tokens(TokenStream& ts);

// Splits text into lines with 1-based numbers, keeping empty lines.
std::vector<std::pair<int, std::string>> split_lines(std::string_view text);

}  // namespace omqrw::detail
