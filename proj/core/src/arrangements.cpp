#include "msortkit/arrangements.hpp"

#include <algorithm>

#include "msortkit/checked.hpp"

namespace msk {

std::vector<std::vector<std::size_t>> restricted_growth_strings(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw CapExceeded("partition enumeration of " + std::to_string(n) + " items exceeds the cap of " +
                      std::to_string(cap));
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> a(n, 0);
  // maxes[i] = max(a[0..i-1]), the largest label usable at i is maxes[i] + 1.
  std::vector<std::size_t> maxes(n, 0);
  for (;;) {
    out.push_back(a);
    std::size_t i = n;
    bool done = true;
    while (i > 1) {
      --i;
      if (a[i] <= maxes[i]) {
        ++a[i];
        for (std::size_t j = i + 1; j < n; ++j) {
          a[j] = 0;
          maxes[j] = std::max(maxes[j - 1], a[j - 1]);
        }
        done = false;
        break;
      }
    }
    if (done) break;
  }
  return out;
}

std::vector<Partition> enumerate_partitions(const std::vector<std::string>& items, std::size_t cap) {
  std::vector<Partition> out;
  for (const auto& rgs : restricted_growth_strings(items.size(), cap)) {
    Partition p;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (rgs[i] == p.size()) p.emplace_back();
      p[rgs[i]].push_back(items[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::uint64_t bell(std::size_t n) {
  // Bell triangle: row i runs from bell(i) to bell(i + 1), and each row
  // starts with the last entry of the previous one.
  if (n == 0) return 1;
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) {
      auto v = checked_add(next.back(), x);
      if (!v) throw OverflowError("bell(" + std::to_string(n) + ") does not fit in 64 bits");
      next.push_back(*v);
    }
    row = std::move(next);
  }
  return row.back();
}

bool Arrangement::same_block(const Variable& a, const Variable& b) const {
  if (a.sort != b.sort) return false;
  auto it = per_sort.find(a.sort);
  if (it == per_sort.end()) return false;
  for (const auto& block : it->second) {
    bool ha = std::find(block.begin(), block.end(), a.name) != block.end();
    bool hb = std::find(block.begin(), block.end(), b.name) != block.end();
    if (ha || hb) return ha && hb;
  }
  return false;
}

FormulaPtr arrangement_formula(const Arrangement& delta) {
  std::vector<FormulaPtr> conjuncts;
  for (const auto& [sort, partition] : delta.per_sort) {
    std::vector<std::pair<std::string, std::size_t>> vars;
    for (std::size_t b = 0; b < partition.size(); ++b) {
      for (const auto& v : partition[b]) vars.emplace_back(v, b);
    }
    std::sort(vars.begin(), vars.end());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      for (std::size_t j = i + 1; j < vars.size(); ++j) {
        auto eq = equal(make_var(vars[i].first, sort), make_var(vars[j].first, sort));
        conjuncts.push_back(vars[i].second == vars[j].second ? eq : negation(eq));
      }
    }
  }
  if (conjuncts.empty()) return top();
  return make_and(std::move(conjuncts));
}

void for_each_arrangement(const VariableSet& V, const std::function<bool(const Arrangement&)>& visit,
                          std::size_t cap) {
  const std::vector<Sort> sorts = V.sorts();
  std::vector<std::vector<Partition>> options;
  for (const Sort& s : sorts) options.push_back(enumerate_partitions(V.of_sort(s), cap));
  std::vector<std::size_t> pos(sorts.size(), 0);
  for (;;) {
    Arrangement a;
    for (std::size_t i = 0; i < sorts.size(); ++i) a.per_sort[sorts[i]] = options[i][pos[i]];
    if (!visit(a)) return;
    std::size_t i = sorts.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++pos[i] < options[i].size()) {
        done = false;
        break;
      }
      pos[i] = 0;
    }
    if (done) return;
  }
}

std::vector<Arrangement> enumerate_arrangements(const VariableSet& V, std::size_t cap) {
  std::vector<Arrangement> out;
  for_each_arrangement(V, [&](const Arrangement& a) {
    out.push_back(a);
    return true;
  }, cap);
  return out;
}

std::uint64_t count_arrangements(const VariableSet& V) {
  std::uint64_t n = 1;
  for (const Sort& s : V.sorts()) {
    auto v = checked_mul(n, bell(V.of_sort(s).size()));
    if (!v) throw OverflowError("arrangement count does not fit in 64 bits");
    n = *v;
  }
  return n;
}

Arrangement arrangement_of_interpretation(const Structure& A, const Assignment& nu, const VariableSet& V) {
  (void)A;
  Arrangement out;
  for (const Sort& s : V.sorts()) {
    Partition p;
    std::vector<Element> block_values;
    for (const auto& name : V.of_sort(s)) {
      auto it = nu.find(Variable{name, s});
      if (it == nu.end()) throw EvalError("no value for variable '" + name + "'");
      auto b = std::find(block_values.begin(), block_values.end(), it->second);
      if (b == block_values.end()) {
        block_values.push_back(it->second);
        p.push_back({name});
      } else {
        p[static_cast<std::size_t>(b - block_values.begin())].push_back(name);
      }
    }
    out.per_sort[s] = std::move(p);
  }
  return out;
}

std::string print_arrangement(const Arrangement& delta) {
  if (delta.per_sort.empty()) return "(empty)";
  std::string out;
  bool first_sort = true;
  for (const auto& [sort, partition] : delta.per_sort) {
    if (!first_sort) out += " | ";
    first_sort = false;
    out += sort.name + ":";
    for (const auto& block : partition) {
      out += " {";
      for (std::size_t i = 0; i < block.size(); ++i) {
        if (i) out += ' ';
        out += block[i];
      }
      out += '}';
    }
  }
  return out;
}

}  // namespace msk
