#include "msortkit/structure.hpp"

#include <utility>

#include "msortkit/sexpr.hpp"

namespace msk {

std::size_t table_size(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& arg_sorts) {
  std::size_t n = 1;
  for (std::size_t s : arg_sorts) n *= sizes[s];
  return n;
}

Structure::Structure(SignaturePtr sig, std::vector<std::size_t> sizes)
    : sig_(std::move(sig)), sizes_(std::move(sizes)) {
  if (sizes_.size() != sig_->sort_count())
    throw EvalError("structure needs one domain size per sort");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] == 0) throw EvalError("empty domain for sort '" + sig_->sorts()[i].name + "'");
  }
  for (const auto& f : sig_->functions()) {
    std::vector<std::size_t> args;
    for (const Sort& s : f.args) args.push_back(sig_->sort_index(s));
    fn_tables_.emplace_back(table_size(sizes_, args), 0);
    fn_args_.push_back(std::move(args));
    fn_result_.push_back(sig_->sort_index(f.result));
  }
  for (const auto& p : sig_->predicates()) {
    std::vector<std::size_t> args;
    for (const Sort& s : p.args) args.push_back(sig_->sort_index(s));
    pred_tables_.emplace_back(table_size(sizes_, args), 0);
    pred_args_.push_back(std::move(args));
  }
}

std::size_t Structure::cell(const std::vector<std::size_t>& arg_sorts, std::span<const Element> args) const {
  if (args.size() != arg_sorts.size()) throw EvalError("wrong number of table arguments");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::size_t n = sizes_[arg_sorts[i]];
    if (args[i] >= n) throw EvalError("element " + element_name(args[i]) + " outside its domain");
    idx = idx * n + args[i];
  }
  return idx;
}

std::size_t Structure::function_cell(std::size_t f, std::span<const Element> args) const {
  return cell(fn_args_[f], args);
}

std::size_t Structure::predicate_cell(std::size_t p, std::span<const Element> args) const {
  return cell(pred_args_[p], args);
}

void Structure::set_value(std::size_t f, std::span<const Element> args, Element value) {
  if (value >= sizes_[fn_result_[f]])
    throw EvalError("value " + element_name(value) + " outside the result domain");
  fn_tables_[f][function_cell(f, args)] = value;
}

void Structure::set_holds(std::size_t p, std::span<const Element> args, bool value) {
  pred_tables_[p][predicate_cell(p, args)] = value ? 1 : 0;
}

std::vector<Element> Structure::decode_cell(const std::vector<std::size_t>& arg_sorts, std::size_t cell) const {
  std::vector<Element> out(arg_sorts.size());
  for (std::size_t i = arg_sorts.size(); i-- > 0;) {
    std::size_t n = sizes_[arg_sorts[i]];
    out[i] = static_cast<Element>(cell % n);
    cell /= n;
  }
  return out;
}

void Structure::validate() const {
  for (std::size_t f = 0; f < fn_tables_.size(); ++f) {
    for (Element v : fn_tables_[f]) {
      if (v >= sizes_[fn_result_[f]])
        throw EvalError("function '" + sig_->functions()[f].name + "' has a value outside its domain");
    }
  }
}

bool Structure::operator==(const Structure& other) const {
  return (sig_ == other.sig_ || *sig_ == *other.sig_) && sizes_ == other.sizes_ &&
         fn_tables_ == other.fn_tables_ && pred_tables_ == other.pred_tables_;
}

std::string element_name(Element e) { return "e" + std::to_string(e); }

namespace {

std::string tuple_text(const std::vector<Element>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ' ';
    out += element_name(args[i]);
  }
  return out + ")";
}

}  // namespace

std::string print_structure(const Structure& A) {
  const Signature& sig = A.signature();
  std::string out = "(structure\n";
  for (std::size_t s = 0; s < sig.sort_count(); ++s) {
    std::vector<Element> dom(A.size(s));
    for (std::size_t i = 0; i < dom.size(); ++i) dom[i] = static_cast<Element>(i);
    out += "  (domain " + sig.sorts()[s].name + " " + tuple_text(dom) + ")\n";
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    out += "  (fun " + sig.functions()[f].name;
    const auto& table = A.function_table(f);
    for (std::size_t c = 0; c < table.size(); ++c)
      out += " (" + tuple_text(A.decode_cell(A.function_args(f), c)) + " " + element_name(table[c]) + ")";
    out += ")\n";
  }
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    out += "  (pred " + sig.predicates()[p].name;
    const auto& table = A.predicate_table(p);
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (table[c]) out += " " + tuple_text(A.decode_cell(A.predicate_args(p), c));
    }
    out += ")\n";
  }
  return out + ")";
}

std::string print_assignment(const Assignment& nu) {
  std::string out = "(assignment";
  for (const auto& [v, e] : nu) out += " (" + v.name + " " + element_name(e) + ")";
  return out + ")";
}

Structure parse_structure(std::string_view text, SignaturePtr sig) {
  SExpr root = parse_single_sexpr(text);
  if (!root.has_head("structure")) throw ParseError("expected (structure ...)", root.pos);

  // Element names are resolved per sort by their position in the domain list.
  std::vector<std::map<std::string, Element>> names(sig->sort_count());
  std::vector<std::size_t> sizes(sig->sort_count(), 0);
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const SExpr& clause = root.items[i];
    if (!clause.has_head("domain")) continue;
    if (clause.items.size() != 3 || !clause.items[1].is_atom() || !clause.items[2].is_list())
      throw ParseError("expected (domain Sort (elements...))", clause.pos);
    Sort s{clause.items[1].atom};
    if (!sig->has_sort(s)) throw ParseError("unknown sort '" + s.name + "'", clause.items[1].pos);
    std::size_t idx = sig->sort_index(s);
    if (sizes[idx]) throw ParseError("domain of '" + s.name + "' given twice", clause.pos);
    for (const SExpr& e : clause.items[2].items) {
      if (!e.is_atom()) throw ParseError("expected an element name", e.pos);
      if (!names[idx].emplace(e.atom, static_cast<Element>(names[idx].size())).second)
        throw ParseError("duplicate element '" + e.atom + "'", e.pos);
    }
    sizes[idx] = names[idx].size();
    if (sizes[idx] == 0) throw ParseError("empty domain for sort '" + s.name + "'", clause.pos);
  }
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    if (!sizes[s]) throw ParseError("missing domain for sort '" + sig->sorts()[s].name + "'", root.pos);
  }

  Structure A(sig, sizes);
  auto element = [&](const SExpr& e, std::size_t sort) {
    if (!e.is_atom()) throw ParseError("expected an element name", e.pos);
    auto it = names[sort].find(e.atom);
    if (it == names[sort].end())
      throw ParseError("'" + e.atom + "' is not an element of sort " + sig->sorts()[sort].name, e.pos);
    return it->second;
  };
  auto tuple = [&](const SExpr& e, const std::vector<std::size_t>& sorts) {
    if (!e.is_list() || e.items.size() != sorts.size())
      throw ParseError("expected a tuple of " + std::to_string(sorts.size()) + " elements", e.pos);
    std::vector<Element> out;
    for (std::size_t i = 0; i < sorts.size(); ++i) out.push_back(element(e.items[i], sorts[i]));
    return out;
  };

  std::vector<bool> fn_seen(sig->functions().size(), false);
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const SExpr& clause = root.items[i];
    if (clause.has_head("domain")) continue;
    if (clause.has_head("fun")) {
      if (clause.items.size() < 2 || !clause.items[1].is_atom())
        throw ParseError("expected (fun name entries...)", clause.pos);
      auto f = sig->function_index(clause.items[1].atom);
      if (!f) throw ParseError("unknown function '" + clause.items[1].atom + "'", clause.items[1].pos);
      std::vector<bool> filled(A.function_table(*f).size(), false);
      for (std::size_t j = 2; j < clause.items.size(); ++j) {
        const SExpr& entry = clause.items[j];
        if (!entry.is_list() || entry.items.size() != 2)
          throw ParseError("expected ((args...) value)", entry.pos);
        auto args = tuple(entry.items[0], A.function_args(*f));
        Element v = element(entry.items[1], A.function_result(*f));
        std::size_t c = A.function_cell(*f, args);
        if (filled[c]) throw ParseError("duplicate table entry", entry.pos);
        filled[c] = true;
        A.function_table(*f)[c] = v;
      }
      for (bool b : filled) {
        if (!b) throw ParseError("function '" + clause.items[1].atom + "' is not total", clause.pos);
      }
      fn_seen[*f] = true;
    } else if (clause.has_head("pred")) {
      if (clause.items.size() < 2 || !clause.items[1].is_atom())
        throw ParseError("expected (pred name tuples...)", clause.pos);
      auto p = sig->predicate_index(clause.items[1].atom);
      if (!p) throw ParseError("unknown predicate '" + clause.items[1].atom + "'", clause.items[1].pos);
      for (std::size_t j = 2; j < clause.items.size(); ++j)
        A.set_holds(*p, tuple(clause.items[j], A.predicate_args(*p)), true);
    } else {
      throw ParseError("expected domain, fun, or pred clause", clause.pos);
    }
  }
  for (std::size_t f = 0; f < fn_seen.size(); ++f) {
    if (!fn_seen[f]) throw ParseError("missing table for function '" + sig->functions()[f].name + "'", root.pos);
  }
  return A;
}

}  // namespace msk
