// Generalized disjunctive / conjunctive normal forms over split signatures.
//
// Conversion is structural. Maximal block-local subformulas are the
// literals. A disjunction of cubes (or a conjunction of clauses) is built
// bottom up. A quantifier over a cube set only touches the component of its
// own block when it distributes over the junction (existential over cubes,
// universal over clauses). Otherwise the body is converted to the dual form
// first and switched back afterwards with the distributive law.

#include <algorithm>

#include "msortkit/transforms.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// SplitContext
// ---------------------------------------------------------------------------

SplitContext::SplitContext(const Signature& sig) : sig_(sig) {
  if (sig.split()) {
    blocks_ = *sig.split();
  } else {
    for (const Sort& s : sig.sorts()) blocks_.push_back({s});
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (const Sort& s : blocks_[b]) sort_block_[s] = b;
  }
  auto check = [&](const std::string& name, const std::vector<Sort>& sorts) {
    for (const Sort& s : sorts) {
      if (block_of(s) != block_of(sorts.front()))
        throw SignatureError("symbol '" + name + "' crosses split blocks");
    }
  };
  for (const auto& f : sig.functions()) {
    std::vector<Sort> all = f.args;
    all.push_back(f.result);
    check(f.name, all);
  }
  for (const auto& p : sig.predicates()) {
    if (!p.args.empty()) check(p.name, p.args);
  }
}

std::size_t SplitContext::block_of(const Sort& s) const {
  auto it = sort_block_.find(s);
  if (it == sort_block_.end()) throw SortError("sort '" + s.name + "' is not in the split");
  return it->second;
}

std::size_t SplitContext::block_of_symbol(const std::string& name) const {
  if (const FunctionSymbol* f = sig_.find_function(name)) return block_of(f->result);
  if (const PredicateSymbol* p = sig_.find_predicate(name)) return p->args.empty() ? 0 : block_of(p->args.front());
  throw SortError("unknown symbol '" + name + "'");
}

std::set<std::size_t> SplitContext::blocks_of(const Formula& f) const {
  std::set<std::size_t> out;
  for (const Sort& s : sorts_of(f)) out.insert(block_of(s));
  for (const auto& sym : symbols_of(f)) out.insert(block_of_symbol(sym));
  return out;
}

std::optional<std::size_t> SplitContext::local_block(const Formula& f) const {
  auto blocks = blocks_of(f);
  if (blocks.size() != 1) return std::nullopt;
  return *blocks.begin();
}

// ---------------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------------

namespace {

// Components keyed by block. In a cube a missing block means true, in a
// clause it means false.
using Component = std::map<std::size_t, FormulaPtr>;
using Cubes = std::vector<Component>;
using Clauses = std::vector<Component>;

FormulaPtr negate_literal(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Not) return f->children[0];
  if (f->kind == Formula::Kind::True) return bottom();
  if (f->kind == Formula::Kind::False) return top();
  return negation(f);
}

FormulaPtr join(Formula::Kind kind, const FormulaPtr& a, const FormulaPtr& b) {
  std::vector<FormulaPtr> children;
  for (const FormulaPtr& f : {a, b}) {
    if (f->kind == kind) {
      children.insert(children.end(), f->children.begin(), f->children.end());
    } else {
      children.push_back(f);
    }
  }
  return kind == Formula::Kind::And ? make_and(std::move(children)) : make_or(std::move(children));
}

class Converter {
 public:
  Converter(const SplitContext& ctx, const NormalFormOptions& options) : ctx_(ctx), options_(options) {}

  Cubes dnf(const FormulaPtr& f) {
    using K = Formula::Kind;
    if (ctx_.is_block_local(*f)) return literal_cubes(f);
    switch (f->kind) {
      case K::Not:
        return negate(cnf(f->children[0]));
      case K::Or: {
        Cubes out;
        for (const auto& c : f->children) {
          Cubes part = dnf(c);
          out.insert(out.end(), part.begin(), part.end());
        }
        return dedup(std::move(out));
      }
      case K::And: {
        Cubes out{Component{}};
        for (const auto& c : f->children) out = product(out, dnf(c), K::And);
        return out;
      }
      case K::Implies: {
        Cubes out = negate(cnf(f->children[0]));
        Cubes rhs = dnf(f->children[1]);
        out.insert(out.end(), rhs.begin(), rhs.end());
        return dedup(std::move(out));
      }
      case K::Exists: {
        Cubes out = dnf(f->children[0]);
        wrap(out, K::Exists, f->bound);
        return dedup(std::move(out));
      }
      case K::Forall: {
        Clauses clauses = cnf(f->children[0]);
        wrap(clauses, K::Forall, f->bound);
        return distribute(clauses, K::And);
      }
      default:
        throw Error("unexpected formula in normal form conversion");
    }
  }

  Clauses cnf(const FormulaPtr& f) {
    using K = Formula::Kind;
    if (ctx_.is_block_local(*f)) return literal_clauses(f);
    switch (f->kind) {
      case K::Not:
        return negate(dnf(f->children[0]));
      case K::And: {
        Clauses out;
        for (const auto& c : f->children) {
          Clauses part = cnf(c);
          out.insert(out.end(), part.begin(), part.end());
        }
        return dedup(std::move(out));
      }
      case K::Or: {
        Clauses out{Component{}};
        for (const auto& c : f->children) out = product(out, cnf(c), K::Or);
        return out;
      }
      case K::Implies: {
        Clauses out{Component{}};
        out = product(out, negate(dnf(f->children[0])), K::Or);
        return product(out, cnf(f->children[1]), K::Or);
      }
      case K::Forall: {
        Clauses out = cnf(f->children[0]);
        wrap(out, K::Forall, f->bound);
        return dedup(std::move(out));
      }
      case K::Exists: {
        Cubes cubes = dnf(f->children[0]);
        wrap(cubes, K::Exists, f->bound);
        return distribute(cubes, K::Or);
      }
      default:
        throw Error("unexpected formula in normal form conversion");
    }
  }

  // Cubes -> clauses and back: one clause per choice of a component from each
  // cube, components of one block merged with `merge`.
  std::vector<Component> distribute(const std::vector<Component>& items, Formula::Kind merge) {
    std::vector<Component> out{Component{}};
    for (const auto& item : items) {
      std::vector<Component> next;
      for (const auto& acc : out) {
        for (const auto& [block, comp] : item) {
          Component c = acc;
          add(c, block, comp, merge);
          next.push_back(std::move(c));
          charge(1);
        }
      }
      out = dedup(std::move(next));
    }
    return out;
  }

  void wrap(std::vector<Component>& items, Formula::Kind quantifier, const Variable& v) {
    const std::size_t block = ctx_.block_of(v.sort);
    for (auto& item : items) {
      auto it = item.find(block);
      if (it == item.end() || !free_vars(*it->second).contains(v)) continue;
      it->second = quantify(quantifier, v, it->second);
      charge(1);
    }
  }

  FormulaPtr cubes_formula(const Cubes& cubes) const {
    std::vector<FormulaPtr> out;
    for (const auto& cube : cubes) out.push_back(component_formula(cube, Formula::Kind::And));
    return disjunction(std::move(out));
  }

  FormulaPtr clauses_formula(const Clauses& clauses) const {
    std::vector<FormulaPtr> out;
    for (const auto& clause : clauses) out.push_back(component_formula(clause, Formula::Kind::Or));
    return conjunction(std::move(out));
  }

 private:
  FormulaPtr component_formula(const Component& c, Formula::Kind kind) const {
    std::vector<FormulaPtr> parts;
    for (const auto& [_, f] : c) parts.push_back(f);
    return kind == Formula::Kind::And ? conjunction(std::move(parts)) : disjunction(std::move(parts));
  }

  std::size_t block_for_literal(const FormulaPtr& f) const {
    auto blocks = ctx_.blocks_of(*f);
    return blocks.empty() ? 0 : *blocks.begin();
  }

  Cubes literal_cubes(const FormulaPtr& f) {
    charge(1);
    if (f->kind == Formula::Kind::True) return {Component{}};
    if (f->kind == Formula::Kind::False) return {};
    return {Component{{block_for_literal(f), f}}};
  }

  Clauses literal_clauses(const FormulaPtr& f) {
    charge(1);
    if (f->kind == Formula::Kind::False) return {Component{}};
    if (f->kind == Formula::Kind::True) return {};
    return {Component{{block_for_literal(f), f}}};
  }

  std::vector<Component> negate(const std::vector<Component>& items) {
    std::vector<Component> out;
    for (const auto& item : items) {
      Component c;
      for (const auto& [block, f] : item) c[block] = negate_literal(f);
      out.push_back(std::move(c));
      charge(1);
    }
    return out;
  }

  void add(Component& c, std::size_t block, const FormulaPtr& f, Formula::Kind merge) {
    auto it = c.find(block);
    if (it == c.end()) {
      c.emplace(block, f);
    } else if (!same(it->second, f)) {
      it->second = join(merge, it->second, f);
    }
  }

  std::vector<Component> product(const std::vector<Component>& a, const std::vector<Component>& b,
                                 Formula::Kind merge) {
    std::vector<Component> out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Component c = x;
        for (const auto& [block, f] : y) add(c, block, f, merge);
        out.push_back(std::move(c));
        charge(1);
      }
    }
    return dedup(std::move(out));
  }

  std::vector<Component> dedup(std::vector<Component> items) const {
    std::vector<Component> out;
    std::set<std::string> seen;
    for (auto& item : items) {
      std::string key;
      for (const auto& [block, f] : item) key += std::to_string(block) + ":" + to_string(*f) + "\n";
      if (seen.insert(key).second) out.push_back(std::move(item));
    }
    return out;
  }

  void charge(std::uint64_t n) {
    built_ += n;
    if (built_ > options_.node_cap)
      throw CapExceeded("normal form conversion exceeded its cap of " + std::to_string(options_.node_cap) +
                        " nodes");
  }

  const SplitContext& ctx_;
  NormalFormOptions options_;
  std::uint64_t built_ = 0;
};

}  // namespace

FormulaPtr to_gdnf(const FormulaPtr& phi, const SplitContext& ctx, const NormalFormOptions& options) {
  sort_check(*phi, ctx.signature());
  if (ctx.is_block_local(*phi)) return phi;
  Converter conv(ctx, options);
  return conv.cubes_formula(conv.dnf(phi));
}

FormulaPtr to_gcnf(const FormulaPtr& phi, const SplitContext& ctx, const NormalFormOptions& options) {
  sort_check(*phi, ctx.signature());
  if (ctx.is_block_local(*phi)) return phi;
  Converter conv(ctx, options);
  return conv.clauses_formula(conv.cnf(phi));
}

namespace {

// A generalized cube (junction = And) or clause (junction = Or): block-local,
// or a junction of block-local parts from pairwise distinct blocks. The unit
// of the junction (true in a cube, false in a clause) belongs to no block.
bool is_generalized(const Formula& f, const SplitContext& ctx, Formula::Kind junction) {
  if (ctx.is_block_local(f)) return true;
  if (f.kind != junction) return false;
  const Formula::Kind unit = junction == Formula::Kind::And ? Formula::Kind::True : Formula::Kind::False;
  std::set<std::size_t> used;
  for (const auto& c : f.children) {
    if (c->kind == unit) continue;
    auto b = ctx.local_block(*c);
    if (!b) {
      if (!ctx.is_block_local(*c)) return false;
      continue;  // mentions no block at all
    }
    if (!used.insert(*b).second) return false;
  }
  return true;
}

}  // namespace

bool is_gdnf(const Formula& phi, const SplitContext& ctx) {
  if (phi.kind == Formula::Kind::Or && !ctx.is_block_local(phi)) {
    return std::all_of(phi.children.begin(), phi.children.end(),
                       [&](const FormulaPtr& c) { return is_generalized(*c, ctx, Formula::Kind::And); });
  }
  return is_generalized(phi, ctx, Formula::Kind::And);
}

bool is_gcnf(const Formula& phi, const SplitContext& ctx) {
  if (phi.kind == Formula::Kind::And && !ctx.is_block_local(phi)) {
    return std::all_of(phi.children.begin(), phi.children.end(),
                       [&](const FormulaPtr& c) { return is_generalized(*c, ctx, Formula::Kind::Or); });
  }
  return is_generalized(phi, ctx, Formula::Kind::Or);
}

}  // namespace msk
