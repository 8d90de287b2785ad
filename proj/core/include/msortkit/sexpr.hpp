#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "msortkit/error.hpp"

namespace msk {

/// A parsed s-expression: either an atom or a parenthesised list.
struct SExpr {
  enum class Kind { Atom, List };

  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_atom(std::string_view text) const { return is_atom() && atom == text; }

  /// True if this is a list whose first item is the atom `head`.
  bool has_head(std::string_view head) const {
    return is_list() && !items.empty() && items.front().is_atom(head);
  }
};

/// Parses every top-level s-expression in `text`. Line comments start with ';'.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Parses exactly one s-expression (trailing whitespace and comments allowed).
SExpr parse_single_sexpr(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace msk
