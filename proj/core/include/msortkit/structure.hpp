#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msortkit/syntax.hpp"

namespace msk {

/// Domain elements are labeled 0..n-1 within each sort and printed as e<i>.
using Element = std::uint32_t;

/// A finite structure over a signature. Every sort has a nonempty domain
/// {0, ..., n-1}; function tables are total, predicate tables are
/// characteristic vectors. Tables are stored flat with the first argument
/// most significant.
class Structure {
 public:
  /// All function values start at element 0 and all predicates false.
  Structure(SignaturePtr sig, std::vector<std::size_t> sizes);

  const Signature& signature() const { return *sig_; }
  const SignaturePtr& signature_ptr() const { return sig_; }

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t size(std::size_t sort) const { return sizes_[sort]; }
  std::size_t size(const Sort& s) const { return sizes_[sig_->sort_index(s)]; }

  /// Sort indices of the arguments of function `f` / predicate `p`.
  const std::vector<std::size_t>& function_args(std::size_t f) const { return fn_args_[f]; }
  std::size_t function_result(std::size_t f) const { return fn_result_[f]; }
  const std::vector<std::size_t>& predicate_args(std::size_t p) const { return pred_args_[p]; }

  std::size_t function_cell(std::size_t f, std::span<const Element> args) const;
  std::size_t predicate_cell(std::size_t p, std::span<const Element> args) const;

  Element apply(std::size_t f, std::span<const Element> args) const {
    return fn_tables_[f][function_cell(f, args)];
  }
  bool holds(std::size_t p, std::span<const Element> args) const {
    return pred_tables_[p][predicate_cell(p, args)] != 0;
  }
  void set_value(std::size_t f, std::span<const Element> args, Element value);
  void set_holds(std::size_t p, std::span<const Element> args, bool value);

  std::vector<Element>& function_table(std::size_t f) { return fn_tables_[f]; }
  const std::vector<Element>& function_table(std::size_t f) const { return fn_tables_[f]; }
  std::vector<std::uint8_t>& predicate_table(std::size_t p) { return pred_tables_[p]; }
  const std::vector<std::uint8_t>& predicate_table(std::size_t p) const { return pred_tables_[p]; }

  /// Decodes a flat cell index of a table with the given argument sorts.
  std::vector<Element> decode_cell(const std::vector<std::size_t>& arg_sorts, std::size_t cell) const;

  /// Throws EvalError if a function value lies outside its result domain.
  void validate() const;

  bool operator==(const Structure& other) const;

 private:
  std::size_t cell(const std::vector<std::size_t>& arg_sorts, std::span<const Element> args) const;

  SignaturePtr sig_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<std::size_t>> fn_args_;
  std::vector<std::size_t> fn_result_;
  std::vector<std::vector<std::size_t>> pred_args_;
  std::vector<std::vector<Element>> fn_tables_;
  std::vector<std::vector<std::uint8_t>> pred_tables_;
};

/// Number of cells in a table over the given argument sorts.
std::size_t table_size(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& arg_sorts);

using Assignment = std::map<Variable, Element>;

std::string element_name(Element e);

/// "(structure (domain S (e0 e1)) (fun f ((e0) e1) ...) (pred P (e0) ...))",
/// one clause per line.
std::string print_structure(const Structure& A);
Structure parse_structure(std::string_view text, SignaturePtr sig);

/// "(assignment (x e0) (y e1))" in variable order.
std::string print_assignment(const Assignment& nu);

}  // namespace msk
