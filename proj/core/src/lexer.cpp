#include "lexer.hpp"

#include <cctype>

namespace omqrw::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view line, int line_no, bool allow_reserved) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t p) { return static_cast<int>(p) + 1; };
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < line.size() && ident_char(line[i])) ++i;
      out.push_back({Tok::Ident, std::string(line.substr(start, i - start)), line_no, col(start)});
      continue;
    }
    if (c == '@') {
      ++i;
      while (i < line.size() && ident_char(line[i])) ++i;
      if (i == start + 1) throw Error(ErrorKind::Parse, "empty name after '@'", line_no, col(start));
      if (!allow_reserved)
        throw Error(ErrorKind::ReservedName,
                    "name '" + std::string(line.substr(start, i - start)) +
                        "' uses the reserved '@' namespace",
                    line_no, col(start));
      out.push_back({Tok::Ident, std::string(line.substr(start, i - start)), line_no, col(start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      out.push_back({Tok::Number, std::string(line.substr(start, i - start)), line_no, col(start)});
      continue;
    }
    Tok k;
    std::size_t len = 1;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case '/': k = Tok::Slash; break;
      case '+': k = Tok::Plus; break;
      case '-':
        if (i + 1 < line.size() && line[i + 1] == '>') {
          k = Tok::Arrow;
          len = 2;
        } else {
          k = Tok::Minus;
        }
        break;
      case ':':
        if (i + 1 < line.size() && line[i + 1] == '-') {
          k = Tok::Turnstile;
          len = 2;
          break;
        }
        [[fallthrough]];
      default:
        throw Error(ErrorKind::Parse, std::string("unexpected character '") + c + "'", line_no,
                    col(start));
    }
    out.push_back({k, std::string(line.substr(start, len)), line_no, col(start)});
    i += len;
  }
  out.push_back({Tok::End, "", line_no, col(line.size())});
  return out;
}

const Token& TokenStream::peek(int ahead) const {
  std::size_t p = pos_ + static_cast<std::size_t>(ahead);
  if (p >= toks_.size()) return toks_.back();
  return toks_[p];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::at_ident(std::string_view word) const {
  return peek().kind == Tok::Ident && peek().text == word;
}

bool TokenStream::accept(Tok k) {
  if (!at(k)) return false;
  next();
  return true;
}

bool TokenStream::accept_ident(std::string_view word) {
  if (!at_ident(word)) return false;
  next();
  return true;
}

Token TokenStream::expect(Tok k, const char* what) {
  if (!at(k)) fail(std::string("expected ") + what);
  return next();
}

void TokenStream::expect_ident(std::string_view word) {
  if (!at_ident(word)) fail("expected '" + std::string(word) + "'");
  next();
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), msg); }

void TokenStream::fail_at(const Token& t, const std::string& msg) const {
  std::string found = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
  throw Error(ErrorKind::Parse, msg + ", found " + found, t.line, t.column);
}

bool is_keyword(std::string_view s) {
  static const char* kws[] = {"top", "bot", "not", "and", "or", "implies", "exists", "forall", "sub", "func"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

std::string expect_name(TokenStream& ts, const char* what) {
  if (!ts.at(Tok::Ident) || is_keyword(ts.peek().text)) ts.fail(std::string("expected ") + what);
  return ts.next().text;
}

namespace {

Role parse_role_tokens(TokenStream& ts) {
  if (ts.at_ident("u")) {
    ts.next();
    if (ts.at(Tok::Minus)) ts.fail("the universal role cannot be inverted");
    return Role::top();
  }
  std::string n = expect_name(ts, "role name");
  bool inv = ts.accept(Tok::Minus);
  return Role::named(n, inv);
}

}  // namespace

Concept parse_concept_tokens(TokenStream& ts) {
  if (ts.accept_ident("top")) return Concept::top();
  if (ts.accept_ident("bot")) return Concept::bottom();
  if (ts.accept_ident("not")) return Concept::negation(parse_concept_tokens(ts));
  if (ts.at_ident("exists") || ts.at_ident("forall")) {
    bool ex = ts.next().text == "exists";
    Role r = parse_role_tokens(ts);
    ts.expect(Tok::Dot, "'.' after role");
    Concept c = parse_concept_tokens(ts);
    return ex ? Concept::exists(r, c) : Concept::forall(r, c);
  }
  if (ts.accept(Tok::LParen)) {
    Concept first = parse_concept_tokens(ts);
    if (ts.accept(Tok::RParen)) return first;
    if (ts.at_ident("implies")) {
      ts.next();
      Concept second = parse_concept_tokens(ts);
      ts.expect(Tok::RParen, "')'");
      return Concept::implies(first, second);
    }
    std::string op;
    if (ts.at_ident("and") || ts.at_ident("or")) {
      op = ts.peek().text;
    } else {
      ts.fail("expected 'and', 'or', 'implies' or ')'");
    }
    std::vector<Concept> ops{first};
    while (ts.accept_ident(op)) ops.push_back(parse_concept_tokens(ts));
    if (ts.at_ident("and") || ts.at_ident("or") || ts.at_ident("implies"))
      ts.fail("mixed operators need parentheses");
    ts.expect(Tok::RParen, "')'");
    Concept acc = ops.back();
    for (std::size_t i = ops.size() - 1; i-- > 0;)
      acc = op == "and" ? Concept::conj(ops[i], acc) : Concept::disj(ops[i], acc);
    return acc;
  }
  return Concept::atom(expect_name(ts, "concept"));
}

std::vector<std::pair<int, std::string>> split_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.emplace_back(no++, std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace omqrw::detail
