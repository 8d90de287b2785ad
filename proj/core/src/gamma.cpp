// Finite Γ fragments and the Ramsey-based model construction.
//
// Sorts are numbered by their position in the setup's sort order. Constants
// c<i>_<α> (i one-based, α zero-based) are ordered by α. Term templates are
// linear: every leaf is its own slot, so instantiating slots with constants
// covers all terms over the constants up to the depth cap.

#include <algorithm>
#include <functional>

#include "msortkit/checked.hpp"
#include "msortkit/combination.hpp"

namespace msk {

std::vector<Sort> GammaSetup::ordered_sorts() const {
  if (!signature) throw SignatureError("gamma setup has no signature");
  return sort_order.empty() ? signature->sorts() : sort_order;
}

void GammaSetup::validate() const {
  const std::vector<Sort> order = ordered_sorts();
  std::set<Sort> seen(order.begin(), order.end());
  if (seen.size() != order.size() || order.size() != signature->sort_count())
    throw SortError("sort order must list every sort exactly once");
  for (const Sort& s : order) {
    if (!signature->has_sort(s)) throw SortError("sort '" + s.name + "' is undeclared");
  }
  if (constants.size() != order.size()) throw Error("need one constant count per sort");
  if (ell > order.size()) throw Error("threshold exceeds the number of sorts");
  for (std::size_t i = 0; i < ell; ++i) {
    if (constants[i] == 0) throw Error("sorts up to the threshold need at least one constant");
  }
  if (sizes) {
    if (sizes->size() != order.size()) throw Error("need one size per sort");
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < ell && (*sizes)[i] != constants[i])
        throw Error("sorts up to the threshold have exactly as many elements as constants");
      if ((*sizes)[i] == 0 || (*sizes)[i] < constants[i])
        throw Error("sort " + order[i].name + " is too small for its constants");
    }
  }
}

std::size_t TermTemplate::slots_at(std::size_t pos) const {
  return static_cast<std::size_t>(std::count(slot_position.begin(), slot_position.end(), pos));
}

std::vector<FormulaPtr> GammaFragments::all() const {
  std::vector<FormulaPtr> out = gamma1;
  out.insert(out.end(), gamma2.begin(), gamma2.end());
  out.insert(out.end(), gamma3.begin(), gamma3.end());
  return out;
}

namespace {

struct Node {
  std::optional<std::size_t> function;  // nullopt: a slot
  std::size_t position = 0;             // sort of the node
  std::size_t depth = 0;
  std::vector<std::shared_ptr<const Node>> kids;
};
using NodePtr = std::shared_ptr<const Node>;

TermPtr build(const Node& n, const Signature& sig, const std::vector<Sort>& order, TermTemplate& out) {
  if (!n.function) {
    Variable v{"?" + std::to_string(out.slots.size()), order[n.position]};
    out.slots.push_back(v);
    out.slot_position.push_back(n.position);
    return make_var(v);
  }
  std::vector<TermPtr> args;
  for (const auto& k : n.kids) args.push_back(build(*k, sig, order, out));
  const FunctionSymbol& f = sig.functions()[*n.function];
  return make_app_unchecked(f.name, f.result, std::move(args));
}

std::size_t position_of(const std::vector<Sort>& order, const Sort& s) {
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), s) - order.begin());
}

// Calls visit for each tuple in [0,radix)^n, last entry fastest.
void for_each_tuple(std::size_t n, std::size_t radix, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> t(n, 0);
  if (n > 0 && radix == 0) return;
  for (;;) {
    visit(t);
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (++t[i] < radix) {
        done = false;
        break;
      }
      t[i] = 0;
    }
    if (done) return;
  }
}

Pattern index_pattern(const std::vector<std::size_t>& t) {
  std::vector<GroundElement> g(t.begin(), t.end());
  return pattern_of(g);
}

std::string constant_name(std::size_t position, std::size_t alpha) {
  return "c" + std::to_string(position + 1) + "_" + std::to_string(alpha);
}

}  // namespace

std::vector<TermTemplate> term_templates(const Signature& sig, const std::vector<Sort>& order, std::size_t depth,
                                         std::uint64_t cap) {
  // by_sort[p]: nodes of sort p with depth <= current level.
  std::vector<std::vector<NodePtr>> by_sort(order.size());
  std::vector<NodePtr> all;
  auto add = [&](NodePtr n) {
    if (all.size() >= cap) throw CapExceeded("term template cap of " + std::to_string(cap) + " exceeded");
    by_sort[n->position].push_back(n);
    all.push_back(std::move(n));
  };
  for (std::size_t p = 0; p < order.size(); ++p) add(std::make_shared<const Node>(Node{std::nullopt, p, 0, {}}));
  const auto& fns = sig.functions();
  for (std::size_t f = 0; f < fns.size(); ++f) {
    if (fns[f].args.empty()) add(std::make_shared<const Node>(Node{f, position_of(order, fns[f].result), 0, {}}));
  }
  for (std::size_t level = 1; level <= depth; ++level) {
    const auto previous = by_sort;
    for (std::size_t f = 0; f < fns.size(); ++f) {
      if (fns[f].args.empty()) continue;
      std::vector<const std::vector<NodePtr>*> choices;
      bool empty = false;
      for (const Sort& s : fns[f].args) {
        choices.push_back(&previous[position_of(order, s)]);
        empty = empty || choices.back()->empty();
      }
      if (empty) continue;
      std::vector<std::size_t> pos(choices.size(), 0);
      for (;;) {
        std::size_t deepest = 0;
        std::vector<NodePtr> kids;
        for (std::size_t i = 0; i < pos.size(); ++i) {
          kids.push_back((*choices[i])[pos[i]]);
          deepest = std::max(deepest, kids.back()->depth);
        }
        // Shallower combinations were produced at an earlier level.
        if (deepest + 1 == level)
          add(std::make_shared<const Node>(Node{f, position_of(order, fns[f].result), level, std::move(kids)}));
        std::size_t i = pos.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (++pos[i] < choices[i]->size()) {
            done = false;
            break;
          }
          pos[i] = 0;
        }
        if (done) break;
      }
    }
  }
  std::vector<TermTemplate> out;
  for (const auto& n : all) {
    TermTemplate t;
    t.position = n->position;
    t.term = build(*n, sig, order, t);
    out.push_back(std::move(t));
  }
  return out;
}

GammaFragments gamma_fragments(const GammaSetup& setup, const FormulaPtr& phi, const GammaCaps& caps) {
  setup.validate();
  const Signature& base = *setup.signature;
  sort_check(*phi, base);
  const std::vector<Sort> order = setup.ordered_sorts();
  const std::size_t n = order.size();

  GammaFragments out;
  auto sig = std::make_shared<Signature>(base);
  out.constants.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < setup.constants[p]; ++a) {
      const std::string name = constant_name(p, a);
      if (base.has_symbol(name)) throw SignatureError("constant name '" + name + "' is already declared");
      sig->add_function(FunctionSymbol{name, {}, order[p]});
      out.constants[p].push_back(name);
    }
  }
  out.signature = sig;
  auto constant = [&](std::size_t p, std::size_t a) { return make_app(*sig, out.constants[p][a], {}); };

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < setup.constants[p]; ++a) {
      for (std::size_t b = a + 1; b < setup.constants[p]; ++b)
        out.gamma1.push_back(negation(equal(constant(p, a), constant(p, b))));
    }
  }

  for (std::size_t p = 0; p < setup.ell; ++p) {
    const Variable x{"x", order[p]};
    std::vector<FormulaPtr> cover;
    for (std::size_t a = 0; a < setup.constants[p]; ++a) cover.push_back(equal(make_var(x), constant(p, a)));
    out.gamma3.push_back(forall(x, disjunction(std::move(cover))));
  }

  std::uint64_t emitted = 0;
  for (const TermTemplate& t : term_templates(base, order, setup.term_depth, caps.instances)) {
    if (t.position < setup.ell) continue;
    // Slots at or below the term's sort share constants; above it they get
    // pattern-equivalent tuples b ~ d, one pair of tuples per sort.
    std::vector<std::size_t> fixed_slots;
    std::map<std::size_t, std::vector<std::size_t>> free_slots;
    for (std::size_t s = 0; s < t.slots.size(); ++s) {
      if (t.slot_position[s] <= t.position) fixed_slots.push_back(s);
      else free_slots[t.slot_position[s]].push_back(s);
    }
    if (free_slots.empty()) continue;

    std::vector<std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>> pair_lists;
    for (const auto& [pos, slots] : free_slots) {
      std::vector<std::vector<std::size_t>> tuples;
      for_each_tuple(slots.size(), setup.constants[pos], [&](const auto& v) { tuples.push_back(v); });
      std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> pairs;
      for (const auto& b : tuples) {
        for (const auto& d : tuples) {
          if (index_pattern(b) == index_pattern(d)) pairs.emplace_back(b, d);
          if (pairs.size() > caps.instances) throw CapExceeded("Γ2 instance cap exceeded");
        }
      }
      pair_lists.push_back(std::move(pairs));
    }
    bool produced = false;
    std::vector<std::size_t> fixed_radix;
    for (std::size_t s : fixed_slots) fixed_radix.push_back(setup.constants[t.slot_position[s]]);
    if (std::any_of(fixed_radix.begin(), fixed_radix.end(), [](std::size_t r) { return r == 0; })) continue;
    if (std::any_of(pair_lists.begin(), pair_lists.end(), [](const auto& l) { return l.empty(); })) continue;

    std::vector<std::size_t> fixed(fixed_slots.size(), 0);
    for (;;) {
      std::vector<std::size_t> choice(pair_lists.size(), 0);
      for (;;) {
        std::vector<std::size_t> lhs_idx, rhs_idx;
        for (std::size_t g = 0; g < pair_lists.size(); ++g) {
          const auto& [b, d] = pair_lists[g][choice[g]];
          lhs_idx.insert(lhs_idx.end(), b.begin(), b.end());
          rhs_idx.insert(rhs_idx.end(), d.begin(), d.end());
        }
        // Skip trivial equalities and the mirror image of each equality.
        if (lhs_idx < rhs_idx) {
          std::map<Variable, TermPtr> left, right;
          for (std::size_t i = 0; i < fixed_slots.size(); ++i) {
            const std::size_t s = fixed_slots[i];
            left[t.slots[s]] = right[t.slots[s]] = constant(t.slot_position[s], fixed[i]);
          }
          std::size_t g = 0;
          for (const auto& [pos, slots] : free_slots) {
            const auto& [b, d] = pair_lists[g][choice[g]];
            for (std::size_t i = 0; i < slots.size(); ++i) {
              left[t.slots[slots[i]]] = constant(pos, b[i]);
              right[t.slots[slots[i]]] = constant(pos, d[i]);
            }
            ++g;
          }
          out.gamma2.push_back(equal(substitute(t.term, left), substitute(t.term, right)));
          produced = true;
          if (++emitted > caps.instances)
            throw CapExceeded("Γ2 instance cap of " + std::to_string(caps.instances) + " exceeded");
        }
        std::size_t g = choice.size();
        bool done = true;
        while (g > 0) {
          --g;
          if (++choice[g] < pair_lists[g].size()) {
            done = false;
            break;
          }
          choice[g] = 0;
        }
        if (done) break;
      }
      std::size_t i = fixed.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++fixed[i] < fixed_radix[i]) {
          done = false;
          break;
        }
        fixed[i] = 0;
      }
      if (done) break;
    }
    if (produced) out.terms.push_back(t);
  }
  return out;
}

std::optional<SizeTuple> try_gamma_size_plan(const GammaSetup& setup, const GammaFragments& fragments) {
  setup.validate();
  if (setup.sizes) return setup.sizes;
  const std::size_t n = setup.constants.size();
  SizeTuple sizes(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t m = setup.constants[i];
    if (i < setup.ell) {
      sizes[i] = m;
      continue;
    }
    std::uint64_t colors = 0;
    for (std::size_t j = setup.ell; j < i; ++j) colors += sizes[j];
    // r functions with arities summing to `total`, one per term and choice of
    // the other arguments.
    std::uint64_t r = 0, total = 0;
    bool unary = true;
    for (const TermTemplate& t : fragments.terms) {
      if (t.position < setup.ell || t.position >= i) continue;
      const std::uint64_t arity = t.slots_at(i);
      if (arity == 0) continue;
      std::optional<std::uint64_t> count = 1;
      for (std::size_t j = 0; j < n && count; ++j) {
        if (j == i) continue;
        const std::uint64_t base = j < i ? sizes[j] : setup.constants[j];
        auto p = checked_pow(base, t.slots_at(j));
        count = p ? checked_mul(*count, *p) : std::nullopt;
      }
      if (!count) return std::nullopt;
      auto nr = checked_add(r, *count);
      auto prod = checked_mul(*count, arity);
      auto nt = prod ? checked_add(total, *prod) : std::nullopt;
      if (!nr || !nt) return std::nullopt;
      r = *nr;
      total = *nt;
      unary = unary && arity == 1;
    }
    std::uint64_t need = m;
    if (r > 0 && m > 0) {
      std::optional<std::uint64_t> bound;
      auto joint = checked_pow(colors, r);
      if (unary) {
        // One joint color per point: pigeonhole over colors^r classes.
        auto prod = joint ? checked_mul(*joint, m - 1) : std::nullopt;
        bound = prod ? checked_add(*prod, 1) : std::nullopt;
      } else {
        // R**(colors, n⃗, m) = R*(colors^r, Σ n⃗, m + 1).
        bound = joint ? try_rstar_bound(*joint, total, m + 1) : std::nullopt;
      }
      if (!bound) return std::nullopt;
      need = std::max(need, *bound);
    }
    sizes[i] = static_cast<std::size_t>(std::max<std::uint64_t>(need, 1));
  }
  return sizes;
}

SizeTuple gamma_size_plan(const GammaSetup& setup, const GammaFragments& fragments) {
  auto plan = try_gamma_size_plan(setup, fragments);
  if (!plan) throw OverflowError("gamma size plan exceeds 2^64 - 1");
  return *plan;
}

GammaModel construct_gamma_fragment_model(const GammaSetup& setup, const FormulaPtr& phi,
                                          const GammaFragments& fragments, const TheorySolver& base,
                                          const GammaCaps& caps) {
  const SizeTuple sizes = gamma_size_plan(setup, fragments);
  const std::vector<Sort> order = setup.ordered_sorts();
  const Signature& sig = *setup.signature;
  if (!(*base.theory.signature == sig)) throw SignatureError("base theory and setup use different signatures");
  const std::size_t n = order.size();

  SizeTuple sig_sizes(n);
  for (std::size_t p = 0; p < n; ++p) sig_sizes[sig.sort_index(order[p])] = sizes[p];
  auto sat = check_sat(base.theory, *phi, SizeBounds::exactly(sig_sizes), base.enumeration);
  if (!sat) {
    std::string text;
    for (std::size_t s : sizes) text += (text.empty() ? "" : ",") + std::to_string(s);
    throw Error("base theory has no model of phi at sizes (" + text + ")");
  }

  Structure B(fragments.signature, sig_sizes);
  for (std::size_t f = 0; f < sig.functions().size(); ++f) B.function_table(f) = sat->structure.function_table(f);
  for (std::size_t p = 0; p < sig.predicates().size(); ++p)
    B.predicate_table(p) = sat->structure.predicate_table(p);

  std::vector<std::vector<Element>> constants(n);
  for (std::size_t p = 0; p < setup.ell; ++p) {
    for (std::size_t a = 0; a < setup.constants[p]; ++a) constants[p].push_back(static_cast<Element>(a));
  }
  std::uint64_t colorings_built = 0;
  for (std::size_t i = n; i-- > setup.ell;) {
    const std::size_t m = setup.constants[i];
    if (m == 0) continue;
    std::vector<std::size_t> offset(n, 0);
    std::uint64_t colors = 0;
    for (std::size_t j = setup.ell; j < i; ++j) {
      offset[j] = colors;
      colors += sizes[j];
    }
    std::vector<Coloring> fs;
    for (const TermTemplate& t : fragments.terms) {
      if (t.position < setup.ell || t.position >= i) continue;
      std::vector<std::size_t> inner, outer;
      for (std::size_t s = 0; s < t.slots.size(); ++s) (t.slot_position[s] == i ? inner : outer).push_back(s);
      if (inner.empty()) continue;
      // Lower sorts range over their whole domain, higher sorts over the
      // constants already placed.
      std::vector<std::vector<Element>> ranges;
      for (std::size_t s : outer) {
        const std::size_t pos = t.slot_position[s];
        std::vector<Element> r;
        if (pos < i) {
          for (Element e = 0; e < sizes[pos]; ++e) r.push_back(e);
        } else {
          r = constants[pos];
        }
        ranges.push_back(std::move(r));
      }
      if (std::any_of(ranges.begin(), ranges.end(), [](const auto& r) { return r.empty(); })) continue;
      std::vector<std::size_t> idx(outer.size(), 0);
      for (;;) {
        Assignment fixed;
        for (std::size_t k = 0; k < outer.size(); ++k) fixed[t.slots[outer[k]]] = ranges[k][idx[k]];
        const std::uint64_t shift = offset[t.position];
        fs.push_back(Coloring::tuples(
            inner.size(), static_cast<std::uint32_t>(colors), sizes[i],
            [&B, &t, inner, fixed, shift](std::span<const GroundElement> args) {
              Assignment nu = fixed;
              for (std::size_t k = 0; k < inner.size(); ++k) nu[t.slots[inner[k]]] = static_cast<Element>(args[k]);
              return static_cast<std::uint32_t>(shift + eval_term(B, nu, *t.term) + 1);
            }));
        if (++colorings_built > caps.colorings)
          throw CapExceeded("coloring cap of " + std::to_string(caps.colorings) + " exceeded");
        std::size_t k = idx.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++idx[k] < ranges[k].size()) {
            done = false;
            break;
          }
          idx[k] = 0;
        }
        if (done) break;
      }
    }
    std::vector<GroundElement> Y;
    if (fs.empty()) {
      for (std::size_t a = 0; a < m; ++a) Y.push_back(a);
    } else {
      auto found = multi_ramsey_search(fs, m, caps.search);
      if (!found) throw Error("no pattern-monochromatic set of " + std::to_string(m) + " elements in sort " + order[i].name);
      Y = *found;
    }
    for (GroundElement y : Y) constants[i].push_back(static_cast<Element>(y));
  }

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < constants[p].size(); ++a) {
      const auto f = fragments.signature->function_index(fragments.constants[p][a]);
      B.set_value(*f, {}, constants[p][a]);
    }
  }

  if (!satisfies(B, sat->assignment, *phi)) throw Error("constructed structure does not satisfy phi");
  for (const auto& f : fragments.all()) {
    if (!satisfies(B, *f)) throw Error("constructed structure fails " + to_string(*f));
  }
  return GammaModel{std::move(B), sat->assignment, std::move(constants), sizes};
}

}  // namespace msk
