#include "msortkit/sexpr.hpp"

#include <cctype>

namespace msk {
namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  SourcePos where() const { return {line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  SExpr parse() {
    skip_trivia();
    if (at_end()) throw ParseError("unexpected end of input", where());
    SExpr e;
    e.pos = where();
    char c = peek();
    if (c == ')') throw ParseError("unexpected ')'", where());
    if (c == '(') {
      e.kind = SExpr::Kind::List;
      advance();
      for (;;) {
        skip_trivia();
        if (at_end()) throw ParseError("unclosed '(' opened here", e.pos);
        if (peek() == ')') {
          advance();
          break;
        }
        e.items.push_back(parse());
      }
      return e;
    }
    e.kind = SExpr::Kind::Atom;
    while (!at_end()) {
      c = peek();
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      e.atom.push_back(c);
      advance();
    }
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

void append(const SExpr& e, std::string& out) {
  if (e.is_atom()) {
    out += e.atom;
    return;
  }
  out.push_back('(');
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out.push_back(' ');
    append(e.items[i], out);
  }
  out.push_back(')');
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Lexer lex(text);
  std::vector<SExpr> out;
  for (;;) {
    lex.skip_trivia();
    if (lex.at_end()) break;
    out.push_back(lex.parse());
  }
  return out;
}

SExpr parse_single_sexpr(std::string_view text) {
  Lexer lex(text);
  SExpr e = lex.parse();
  lex.skip_trivia();
  if (!lex.at_end()) throw ParseError("trailing input after expression", lex.where());
  return e;
}

std::string to_string(const SExpr& e) {
  std::string out;
  append(e, out);
  return out;
}

}  // namespace msk
