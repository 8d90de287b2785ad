#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "msortkit/arrangements.hpp"
#include "msortkit/combination.hpp"
#include "msortkit/ramsey.hpp"
#include "msortkit/semantics.hpp"
#include "msortkit/transforms.hpp"

namespace msk::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchema = "msort-kit/1";

// Bad input: unreadable files, malformed text, inconsistent options.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Re-raises errors from parsing `what` with the source name in front.
template <typename F>
auto with_source(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const CapExceeded&) {
    throw;
  } catch (const Error& e) {
    // Parse errors already start with "line:col: ".
    const std::string msg = e.what();
    const bool positioned = !msg.empty() && std::isdigit(static_cast<unsigned char>(msg[0]));
    throw InputError(what + (positioned ? ":" : ": ") + msg);
  }
}

struct LoadedTheory {
  Document doc;
  TheoryDef theory;
};

LoadedTheory load_theory(const std::string& path) {
  return with_source(path, [&] {
    Document doc = parse_document(read_file(path));
    TheoryDef T = theory_from_document(doc);
    return LoadedTheory{std::move(doc), std::move(T)};
  });
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  std::size_t used = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') throw InputError("invalid " + what + ": '" + s + "'");
  return v;
}

std::string sizes_text(const SizeTuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

// ---------------------------------------------------------------------------
// JSON views
// ---------------------------------------------------------------------------

json envelope(const std::string& command) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  return j;
}

json signature_json(const Signature& sig) {
  json j;
  j["sorts"] = json::array();
  for (const Sort& s : sig.sorts()) j["sorts"].push_back(s.name);
  if (sig.split()) {
    j["split"] = json::array();
    for (const auto& block : *sig.split()) {
      json b = json::array();
      for (const Sort& s : block) b.push_back(s.name);
      j["split"].push_back(b);
    }
  }
  j["functions"] = json::array();
  for (const auto& f : sig.functions()) {
    json args = json::array();
    for (const Sort& s : f.args) args.push_back(s.name);
    j["functions"].push_back({{"name", f.name}, {"args", args}, {"result", f.result.name}});
  }
  j["predicates"] = json::array();
  for (const auto& p : sig.predicates()) {
    json args = json::array();
    for (const Sort& s : p.args) args.push_back(s.name);
    j["predicates"].push_back({{"name", p.name}, {"args", args}});
  }
  return j;
}

json structure_json(const Structure& A) {
  const Signature& sig = A.signature();
  json j;
  j["domains"] = json::object();
  for (std::size_t s = 0; s < sig.sort_count(); ++s) j["domains"][sig.sorts()[s].name] = A.size(s);
  j["functions"] = json::array();
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    json table = json::array();
    const auto& cells = A.function_table(f);
    for (std::size_t c = 0; c < cells.size(); ++c)
      table.push_back({{"args", A.decode_cell(A.function_args(f), c)}, {"value", cells[c]}});
    j["functions"].push_back({{"name", sig.functions()[f].name}, {"table", table}});
  }
  j["predicates"] = json::array();
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    json holds = json::array();
    const auto& cells = A.predicate_table(p);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c]) holds.push_back(A.decode_cell(A.predicate_args(p), c));
    }
    j["predicates"].push_back({{"name", sig.predicates()[p].name}, {"true", holds}});
  }
  return j;
}

json assignment_json(const Assignment& nu) {
  json j = json::object();
  for (const auto& [v, e] : nu) j[v.name] = e;
  return j;
}

json witness_json(const SatWitness& w) {
  return {{"structure", structure_json(w.structure)}, {"assignment", assignment_json(w.assignment)}};
}

json arrangement_json(const Arrangement& delta) {
  json j = json::object();
  for (const auto& [sort, partition] : delta.per_sort) j[sort.name] = partition;
  return j;
}

std::string lines(std::string text) {
  if (!text.empty() && text.back() != '\n') text += '\n';
  return text;
}

void print_witness(std::ostream& out, const SatWitness& w) {
  out << lines(print_structure(w.structure)) << lines(print_assignment(w.assignment));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Common {
  bool json = false;
  std::string vars;  // extra free variables, "S:x,y T:u"
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

EnumerationOptions enumeration(const Common& c) {
  EnumerationOptions o;
  o.jobs = std::max(1u, c.jobs);
  return o;
}

int cmd_parse(const std::string& path, const Common& c, std::ostream& out) {
  Document doc = with_source(path, [&] { return parse_document(read_file(path)); });
  if (c.json) {
    json j = envelope("parse");
    j["signature"] = signature_json(doc.signature);
    j["variables"] = json::array();
    for (const auto& [name, sort] : doc.variables) j["variables"].push_back({{"name", name}, {"sort", sort.name}});
    j["assertions"] = json::array();
    for (const auto& a : doc.assertions) j["assertions"].push_back(to_string(*a));
    out << j.dump(2) << "\n";
    return 0;
  }
  out << print_signature(doc.signature);
  for (const auto& [name, sort] : doc.variables) out << "(declare-var " << name << " " << sort.name << ")\n";
  for (const auto& a : doc.assertions) out << "(assert " << to_string(*a) << ")\n";
  return 0;
}

struct ModelsArgs {
  std::string theory;
  std::string size;
  std::size_t bound = 2;
  bool count = false;
  bool iso = false;
  std::size_t limit = 0;
};

int cmd_models(const ModelsArgs& a, const Common& c, std::ostream& out) {
  const LoadedTheory t = load_theory(a.theory);
  const std::size_t n = t.theory.signature->sort_count();
  SizeBounds bounds = SizeBounds::uniform(n, a.bound);
  if (!a.size.empty()) {
    SizeTuple sizes;
    for (const auto& s : split(a.size, ',')) sizes.push_back(to_u64(s, "size"));
    if (sizes.size() != n) throw InputError("--size needs one entry per sort");
    bounds = SizeBounds::exactly(sizes);
  }
  EnumerationOptions o = enumeration(c);
  o.dedup_isomorphic = a.iso;
  std::vector<Structure> models = enumerate_models(t.theory, bounds, o);
  if (a.limit && models.size() > a.limit) models.erase(models.begin() + static_cast<std::ptrdiff_t>(a.limit), models.end());
  if (c.json) {
    json j = envelope("models");
    j["count"] = models.size();
    if (!a.count) {
      j["models"] = json::array();
      for (const auto& m : models) j["models"].push_back(structure_json(m));
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  if (a.count) {
    out << models.size() << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (i) out << "\n";
    out << lines(print_structure(models[i]));
  }
  return 0;
}

VariableSet parse_vars(const std::string& spec);
FormulaPtr load_formula(const std::string& text, const LoadedTheory& t, const std::string& vars,
                        const std::string& name);

struct SolveArgs {
  std::string theory;
  std::string phi = "true";
  std::size_t bound = 3;
};

int cmd_solve(const SolveArgs& a, const Common& c, std::ostream& out) {
  const LoadedTheory t = load_theory(a.theory);
  TheorySolver T;
  T.theory = t.theory;
  T.enumeration = enumeration(c);
  const FormulaPtr phi = load_formula(a.phi, t, c.vars, "phi");
  const SolveResult r = T.solve(phi, a.bound);
  const Verdict v = r.witness ? Verdict::Sat : r.conclusive ? Verdict::Unsat : Verdict::Unknown;
  if (c.json) {
    json j = envelope("solve");
    j["verdict"] = verdict_name(v);
    j["bound"] = a.bound;
    if (r.witness) j["witness"] = witness_json(*r.witness);
    out << j.dump(2) << "\n";
  } else {
    out << verdict_name(v) << "\n";
    if (r.witness) print_witness(out, *r.witness);
  }
  return verdict_exit_code(v);
}

VariableSet parse_vars(const std::string& spec) {
  VariableSet V;
  std::istringstream in(spec);
  std::string group;
  while (in >> group) {
    const auto colon = group.find(':');
    if (colon == std::string::npos || colon == 0) throw InputError("expected SORT:x,y in --vars, got '" + group + "'");
    const Sort s{group.substr(0, colon)};
    for (const auto& name : split(group.substr(colon + 1), ',')) V.insert(Variable{name, s});
  }
  return V;
}

// Free variables come from the theory file's declare-var lines plus --vars;
// a --vars entry whose sort the theory lacks is ignored.
FormulaPtr load_formula(const std::string& text, const LoadedTheory& t, const std::string& vars,
                        const std::string& name) {
  VariableScope scope = t.doc.variables;
  for (const Variable& v : parse_vars(vars).variables()) {
    if (t.theory.signature->has_sort(v.sort)) scope.emplace(v.name, v.sort);
  }
  return with_source(name, [&] { return parse_formula(text, *t.theory.signature, scope); });
}

int cmd_arrange(const std::string& vars, bool count, const Common& c, std::ostream& out) {
  const VariableSet V = parse_vars(vars);
  if (count) {
    const std::uint64_t n = count_arrangements(V);
    if (c.json) {
      json j = envelope("arrange");
      j["count"] = n;
      out << j.dump(2) << "\n";
    } else {
      out << n << "\n";
    }
    return 0;
  }
  json list = json::array();
  for_each_arrangement(V, [&](const Arrangement& delta) {
    const std::string formula = to_string(*arrangement_formula(delta));
    if (c.json) {
      list.push_back({{"arrangement", arrangement_json(delta)}, {"formula", formula}});
    } else {
      out << print_arrangement(delta) << "\n  " << formula << "\n";
    }
    return true;
  });
  if (c.json) {
    json j = envelope("arrange");
    j["arrangements"] = list;
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct RamseyArgs {
  std::string mode = "classic";
  std::uint64_t k = 2;
  std::string n = "2";
  std::uint64_t m = 3;
  std::optional<std::uint64_t> ground;
  std::string coloring;
  bool exact = false;
  bool bound = false;
};

using TupleColors = std::map<std::vector<GroundElement>, std::uint32_t>;

TupleColors parse_coloring_map(const json& j, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": a coloring is a JSON object from \"i,j,...\" to a color");
  TupleColors out;
  for (const auto& [key, value] : j.items()) {
    std::vector<GroundElement> tuple;
    for (const auto& part : split(key, ',')) tuple.push_back(to_u64(part, "tuple entry"));
    if (!value.is_number_unsigned()) throw InputError(path + ": color of \"" + key + "\" is not a positive integer");
    out[tuple] = value.get<std::uint32_t>();
  }
  return out;
}

Coloring::Function table_function(TupleColors colors) {
  return [colors = std::move(colors)](std::span<const GroundElement> args) {
    auto it = colors.find(std::vector<GroundElement>(args.begin(), args.end()));
    if (it == colors.end()) {
      std::string key;
      for (auto a : args) key += (key.empty() ? "" : ",") + std::to_string(a);
      throw InputError("coloring has no color for (" + key + ")");
    }
    return it->second;
  };
}

std::uint64_t max_entry(const TupleColors& colors) {
  std::uint64_t top = 0;
  for (const auto& [t, _] : colors) {
    for (auto x : t) top = std::max(top, x + 1);
  }
  return top;
}

std::optional<std::uint64_t> ramsey_bound(const RamseyArgs& a, const std::vector<std::uint64_t>& arities) {
  if (a.mode == "classic") return try_ramsey_upper_bound(a.k, arities[0], a.m);
  if (a.mode == "directed") return try_rstar_bound(a.k, arities[0], a.m);
  return try_rstarstar_bound(a.k, arities, a.m);
}

int cmd_ramsey(const RamseyArgs& a, const Common& c, std::ostream& out) {
  if (a.mode != "classic" && a.mode != "directed" && a.mode != "multi")
    throw InputError("--mode must be classic, directed, or multi");
  std::vector<std::uint64_t> arities;
  for (const auto& s : split(a.n, ',')) arities.push_back(to_u64(s, "arity"));
  if (arities.empty() || (a.mode != "multi" && arities.size() != 1))
    throw InputError(a.mode == "multi" ? "--n needs a list of arities" : "--n needs a single arity");
  if (a.k == 0 || a.k > std::numeric_limits<std::uint32_t>::max()) throw InputError("--k out of range");

  auto emit_number = [&](const char* key, std::uint64_t v) {
    if (c.json) {
      json j = envelope("ramsey");
      j["mode"] = a.mode;
      j[key] = v;
      out << j.dump(2) << "\n";
    } else {
      out << v << "\n";
    }
    return 0;
  };
  if (a.exact) {
    if (a.mode != "classic") throw InputError("--exact is only available for classic Ramsey numbers");
    return emit_number("exact", ramsey_number_bruteforce(static_cast<std::uint32_t>(a.k), arities[0], a.m));
  }
  if (a.bound) {
    auto b = ramsey_bound(a, arities);
    if (!b) throw OverflowError("bound exceeds 2^64 - 1");
    return emit_number("bound", *b);
  }

  const auto colors = static_cast<std::uint32_t>(a.k);
  std::vector<Coloring> fs;
  const std::string spec = a.coloring.empty() ? "random:" + std::to_string(c.seed) : a.coloring;
  const bool subsets = a.mode == "classic";
  auto ground_or_bound = [&](std::optional<std::uint64_t> fallback) {
    if (a.ground) return *a.ground;
    if (fallback) return *fallback;
    // A saturated bound still works as a ground set: colorings are evaluated lazily.
    return ramsey_bound(a, arities).value_or(std::numeric_limits<GroundElement>::max());
  };
  if (spec.rfind("random:", 0) == 0) {
    const std::uint64_t seed = to_u64(spec.substr(7), "seed");
    const GroundElement N = ground_or_bound(std::nullopt);
    for (std::size_t i = 0; i < arities.size(); ++i) {
      fs.push_back(subsets ? Coloring::random_subsets(arities[i], colors, N, seed + i)
                           : Coloring::random_tuples(arities[i], colors, N, seed + i));
    }
  } else if (spec == "cyclic") {
    const GroundElement N = ground_or_bound(std::nullopt);
    const auto cyclic = [colors](std::span<const GroundElement> args) {
      std::uint64_t sum = 0;
      for (auto x : args) sum += x;
      return static_cast<std::uint32_t>(sum % colors + 1);
    };
    for (std::uint64_t arity : arities) {
      fs.push_back(subsets ? Coloring::subsets(arity, colors, N, cyclic) : Coloring::tuples(arity, colors, N, cyclic));
    }
  } else {
    const json j = with_source(spec, [&] {
      try {
        return json::parse(read_file(spec));
      } catch (const json::parse_error& e) {
        throw InputError(std::string(" ") + e.what());
      }
    });
    std::vector<TupleColors> tables;
    if (a.mode == "multi") {
      if (!j.is_array() || j.size() != arities.size())
        throw InputError(spec + ": multi mode needs a JSON array with one coloring per arity");
      for (const auto& item : j) tables.push_back(parse_coloring_map(item, spec));
    } else {
      tables.push_back(parse_coloring_map(j, spec));
    }
    std::uint64_t seen = 0;
    for (const auto& t : tables) seen = std::max(seen, max_entry(t));
    const GroundElement N = ground_or_bound(seen);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      fs.push_back(subsets ? Coloring::subsets(arities[i], colors, N, table_function(tables[i]))
                           : Coloring::tuples(arities[i], colors, N, table_function(tables[i])));
    }
  }

  RamseySearchOptions o;
  std::optional<std::vector<GroundElement>> Y;
  if (a.mode == "classic") Y = ramsey_search(fs[0], a.m, o);
  else if (a.mode == "directed") Y = directed_ramsey_search(fs[0], a.m, o);
  else Y = multi_ramsey_search(fs, a.m, o);

  if (c.json) {
    json j = envelope("ramsey");
    j["mode"] = a.mode;
    j["ground"] = fs[0].ground();
    if (Y) j["witness"] = *Y;
    else j["refuted"] = true;
    out << j.dump(2) << "\n";
  } else if (Y) {
    out << "witness:";
    for (auto y : *Y) out << " " << y;
    out << "\n";
  } else {
    out << "refuted\n";
  }
  return 0;
}

struct TransformArgs {
  std::string theory;
  std::string phi;
  std::size_t verify = 0;
};

int cmd_transform(const std::string& which, const TransformArgs& a, const Common& c, std::ostream& out) {
  const LoadedTheory t = load_theory(a.theory);
  const FormulaPtr phi = load_formula(a.phi, t, c.vars, "phi");
  const SignaturePtr& sig = t.theory.signature;
  const EnumerationOptions o = enumeration(c);

  FormulaPtr result;
  std::optional<Skolemized> sk;
  bool shape_ok = true;
  if (which == "pnf") {
    result = to_pnf(phi);
  } else if (which == "skolemize") {
    sk = skolemize(phi, *sig);
    result = sk->sentence;
  } else {
    const SplitContext ctx(*sig);
    result = which == "gdnf" ? to_gdnf(phi, ctx) : to_gcnf(phi, ctx);
    shape_ok = which == "gdnf" ? is_gdnf(*result, ctx) : is_gcnf(*result, ctx);
  }

  std::optional<std::string> problem;
  if (a.verify) {
    if (!shape_ok) problem = "output fails the " + which + " shape check";
    if (sk) {
      if (auto bad = find_skolem_mismatch(phi, sig, *sk, a.verify, o))
        problem = "satisfiability differs at sizes " + sizes_text(*bad);
    } else if (auto bad = find_inequivalence(phi, result, sig, a.verify, o)) {
      problem = "outputs differ on\n" + lines(print_structure(bad->structure)) + print_assignment(bad->assignment);
    }
  }

  if (c.json) {
    json j = envelope(which);
    j["input"] = to_string(*phi);
    j["output"] = to_string(*result);
    if (sk) {
      j["skolem_functions"] = json::array();
      for (const auto& f : sk->skolem_functions) {
        json args = json::array();
        for (const Sort& s : f.args) args.push_back(s.name);
        j["skolem_functions"].push_back({{"name", f.name}, {"args", args}, {"result", f.result.name}});
      }
    }
    if (a.verify) {
      j["verified_up_to"] = a.verify;
      j["verified"] = !problem;
      if (problem) j["problem"] = *problem;
    }
    out << j.dump(2) << "\n";
  } else {
    if (sk) {
      for (const auto& f : sk->skolem_functions) {
        out << "(declare-fun " << f.name << " (";
        for (std::size_t i = 0; i < f.args.size(); ++i) out << (i ? " " : "") << f.args[i].name;
        out << ") " << f.result.name << ")\n";
      }
    }
    out << to_string(*result) << "\n";
    if (a.verify) {
      if (problem) out << "MISMATCH: " << *problem << "\n";
      else out << "verified up to size " << a.verify << "\n";
    }
  }
  return problem ? 1 : 0;
}

TheorySolver combination_solver(const LoadedTheory& t, const std::set<Sort>& shared, const Common& c) {
  TheorySolver T;
  T.theory = t.theory;
  T.designated = shared;
  T.enumeration = enumeration(c);
  // A pure-equality theory without axioms is the empty theory and has a known witness function.
  if (t.theory.signature->is_empty() && t.theory.axioms.empty()) {
    const SignaturePtr sig = t.theory.signature;
    T.wit = [shared, sig](const FormulaPtr& phi) { return wit_empty_theory(phi, shared, *sig); };
  }
  return T;
}

struct CombineArgs {
  std::string mode = "polite";
  std::string t1, t2;
  std::string phi1 = "true", phi2 = "true";
  std::size_t bound = 3;
};

int cmd_combine(const CombineArgs& a, const Common& c, std::ostream& out) {
  if (a.mode != "polite" && a.mode != "shiny" && a.mode != "oracle")
    throw InputError("--mode must be polite, shiny, or oracle");
  const LoadedTheory l1 = load_theory(a.t1);
  const LoadedTheory l2 = load_theory(a.t2);
  const std::set<Sort> shared = with_source("theories", [&] {
    return shared_sorts(*l1.theory.signature, *l2.theory.signature);
  });
  const TheorySolver T1 = combination_solver(l1, shared, c);
  const TheorySolver T2 = combination_solver(l2, shared, c);
  const FormulaPtr phi1 = load_formula(a.phi1, l1, c.vars, "phi1");
  const FormulaPtr phi2 = load_formula(a.phi2, l2, c.vars, "phi2");
  if (a.mode == "polite" && !T1.wit) throw InputError("polite mode needs the first theory to be the empty theory");

  const CombineResult r = a.mode == "polite"  ? polite_combine(T1, T2, phi1, phi2, a.bound)
                          : a.mode == "shiny" ? shiny_combine(T1, T2, phi1, phi2, a.bound)
                                              : oracle_combine(T1, T2, phi1, phi2, a.bound);
  if (c.json) {
    json j = envelope("combine");
    j["mode"] = a.mode;
    j["bound"] = a.bound;
    j["verdict"] = verdict_name(r.verdict);
    if (a.mode != "oracle") j["arrangements_tried"] = r.arrangements_tried;
    if (r.certificate) {
      const Certificate& cert = *r.certificate;
      json cj;
      cj["arrangement"] = arrangement_json(cert.arrangement);
      cj["arrangement_formula"] = to_string(*arrangement_formula(cert.arrangement));
      if (cert.kappa) cj["kappa"] = *cert.kappa;
      cj["side1"] = to_string(*cert.side1);
      cj["side2"] = to_string(*cert.side2);
      cj["witness1"] = witness_json(cert.witness1);
      cj["witness2"] = witness_json(cert.witness2);
      j["certificate"] = cj;
    }
    if (r.union_witness) j["witness"] = witness_json(*r.union_witness);
    out << j.dump(2) << "\n";
  } else {
    out << verdict_name(r.verdict) << "\n";
    if (r.certificate) {
      const Certificate& cert = *r.certificate;
      out << "arrangement: " << print_arrangement(cert.arrangement) << "\n";
      if (cert.kappa) out << "kappa: " << sizes_text(*cert.kappa) << "\n";
      out << "model1:\n";
      print_witness(out, cert.witness1);
      out << "model2:\n";
      print_witness(out, cert.witness2);
    }
    if (r.union_witness) {
      out << "model:\n";
      print_witness(out, *r.union_witness);
    }
  }
  return verdict_exit_code(r.verdict);
}

struct MinmodsArgs {
  std::string theory;
  std::string phi = "true";
  std::string sorts;
  std::size_t bound = 3;
};

int cmd_minmods(const MinmodsArgs& a, const Common& c, std::ostream& out) {
  const LoadedTheory t = load_theory(a.theory);
  std::set<Sort> S;
  if (a.sorts.empty()) {
    S.insert(t.theory.signature->sorts().begin(), t.theory.signature->sorts().end());
  } else {
    for (const auto& name : split(a.sorts, ',')) {
      if (!t.theory.signature->has_sort(Sort{name})) throw InputError("unknown sort '" + name + "'");
      S.insert(Sort{name});
    }
  }
  TheorySolver T;
  T.theory = t.theory;
  T.enumeration = enumeration(c);
  const auto mins = minmods(T, S, load_formula(a.phi, t, c.vars, "phi"), a.bound);
  if (c.json) {
    json j = envelope("minmods");
    j["sorts"] = json::array();
    for (const Sort& s : t.theory.signature->sorts()) {
      if (S.count(s)) j["sorts"].push_back(s.name);
    }
    j["bound"] = a.bound;
    j["minmods"] = mins;
    out << j.dump(2) << "\n";
  } else if (mins.empty()) {
    out << "none\n";
  } else {
    for (const auto& m : mins) out << sizes_text(m) << "\n";
  }
  return 0;
}

struct GammaArgs {
  std::string setup;
  bool verify = false;
  bool fragments = false;
};

int cmd_gamma(const GammaArgs& a, const Common& c, std::ostream& out) {
  const json cfg = with_source(a.setup, [&] {
    try {
      return json::parse(read_file(a.setup));
    } catch (const json::parse_error& e) {
      throw InputError(std::string(" ") + e.what());
    }
  });
  std::string theory_text;
  try {
    if (cfg.contains("theory")) {
      theory_text = cfg.at("theory").get<std::string>();
    } else {
      const auto dir = std::filesystem::path(a.setup).parent_path();
      theory_text = read_file((dir / cfg.at("theory_file").get<std::string>()).string());
    }
  } catch (const json::exception& e) {
    throw InputError(a.setup + ": " + e.what());
  }
  const Document doc = with_source(a.setup + ": theory", [&] { return parse_document(theory_text); });
  TheorySolver base;
  base.theory = with_source(a.setup + ": theory", [&] { return theory_from_document(doc); });
  base.enumeration = enumeration(c);

  GammaSetup setup;
  std::string phi_text = "true";
  try {
    setup.signature = base.theory.signature;
    for (const auto& s : cfg.value("sort_order", std::vector<std::string>{})) setup.sort_order.push_back(Sort{s});
    setup.ell = cfg.value("ell", std::size_t{0});
    setup.constants = cfg.at("constants").get<std::vector<std::size_t>>();
    setup.term_depth = cfg.value("term_depth", std::size_t{2});
    if (cfg.contains("sizes")) setup.sizes = cfg.at("sizes").get<SizeTuple>();
    phi_text = cfg.value("phi", std::string{"true"});
  } catch (const json::exception& e) {
    throw InputError(a.setup + ": " + e.what());
  }
  const FormulaPtr phi = with_source(a.setup + ": phi", [&] {
    return parse_formula(phi_text, *base.theory.signature, doc.variables);
  });
  const GammaFragments frags = with_source(a.setup, [&] {
    setup.validate();
    return gamma_fragments(setup, phi);
  });
  const SizeTuple sizes = gamma_size_plan(setup, frags);
  const std::vector<Sort> order = setup.ordered_sorts();

  std::optional<GammaModel> model;
  if (a.verify) model = construct_gamma_fragment_model(setup, phi, frags, base);

  if (c.json) {
    json j = envelope("gamma-demo");
    j["sizes"] = json::object();
    for (std::size_t p = 0; p < order.size(); ++p) j["sizes"][order[p].name] = sizes[p];
    j["fragments"] = {{"gamma1", frags.gamma1.size()}, {"gamma2", frags.gamma2.size()}, {"gamma3", frags.gamma3.size()}};
    if (a.fragments) {
      for (const char* key : {"gamma1", "gamma2", "gamma3"}) {
        const auto& list = std::string(key) == "gamma1" ? frags.gamma1
                           : std::string(key) == "gamma2" ? frags.gamma2 : frags.gamma3;
        json texts = json::array();
        for (const auto& f : list) texts.push_back(to_string(*f));
        j["formulas"][key] = texts;
      }
    }
    if (model) {
      j["constants"] = json::object();
      for (std::size_t p = 0; p < order.size(); ++p) {
        for (std::size_t i = 0; i < model->constants[p].size(); ++i)
          j["constants"][frags.constants[p][i]] = model->constants[p][i];
      }
      j["structure"] = structure_json(model->structure);
      j["verified"] = true;
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "sizes:";
  for (std::size_t p = 0; p < order.size(); ++p) out << " " << order[p].name << "=" << sizes[p];
  out << "\n";
  out << "gamma1: " << frags.gamma1.size() << " formulas\n";
  out << "gamma2: " << frags.gamma2.size() << " formulas\n";
  out << "gamma3: " << frags.gamma3.size() << " formulas\n";
  if (a.fragments) {
    for (const auto& f : frags.all()) out << to_string(*f) << "\n";
  }
  if (model) {
    out << "constants:";
    for (std::size_t p = 0; p < order.size(); ++p) {
      for (std::size_t i = 0; i < model->constants[p].size(); ++i)
        out << " " << frags.constants[p][i] << "=" << element_name(model->constants[p][i]);
    }
    out << "\n" << lines(print_structure(model->structure));
    out << "verified: phi and " << frags.all().size() << " fragment formulas hold\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Many-sorted first-order logic toolkit", "msort-kit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--jobs", common.jobs, "Worker threads for model enumeration")->check(CLI::PositiveNumber);
  app.add_option("--seed", common.seed, "Seed for random colorings");
  app.add_flag("--json", common.json, "Machine-readable output");

  std::string parse_path;
  auto* parse = app.add_subcommand("parse", "Parse and normalize a theory file");
  parse->add_option("file", parse_path)->required();

  ModelsArgs models_args;
  auto* models = app.add_subcommand("models", "Enumerate the finite models of a theory");
  models->add_option("--theory", models_args.theory)->required();
  models->add_option("--size", models_args.size, "Exact sizes, one per sort (e.g. 2,3)");
  models->add_option("--bound", models_args.bound, "Largest size of every sort")->check(CLI::PositiveNumber);
  models->add_option("--limit", models_args.limit, "Print at most this many models");
  models->add_flag("--count", models_args.count, "Print only the number of models");
  models->add_flag("--iso", models_args.iso, "Skip models isomorphic to an earlier one");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Bounded satisfiability of a formula modulo a theory");
  solve->add_option("--theory", solve_args.theory)->required();
  solve->add_option("--phi", solve_args.phi);
  solve->add_option("--vars", common.vars, "Free variables, e.g. \"S:x,y T:u\"");
  solve->add_option("--bound", solve_args.bound)->check(CLI::PositiveNumber);

  std::string arrange_vars;
  bool arrange_count = false;
  auto* arrange = app.add_subcommand("arrange", "Enumerate arrangements of a variable set");
  arrange->add_option("--vars", arrange_vars, "Variables per sort, e.g. \"S1:x,y S2:u\"")->required();
  arrange->add_flag("--count", arrange_count, "Print only the number of arrangements");

  RamseyArgs ramsey_args;
  auto* ramsey = app.add_subcommand("ramsey", "Ramsey witness search, bounds, and exact numbers");
  ramsey->add_option("--mode", ramsey_args.mode, "classic, directed, or multi");
  ramsey->add_option("--k", ramsey_args.k, "Number of colors");
  ramsey->add_option("--n", ramsey_args.n, "Arity, or a comma-separated list in multi mode");
  ramsey->add_option("--m", ramsey_args.m, "Size of the homogeneous set");
  ramsey->add_option("--ground", ramsey_args.ground, "Ground set size (default: the upper bound)");
  ramsey->add_option("--coloring", ramsey_args.coloring, "JSON file, random:SEED, or cyclic");
  ramsey->add_flag("--exact", ramsey_args.exact, "Compute the classic Ramsey number by exhaustion");
  ramsey->add_flag("--bound", ramsey_args.bound, "Print the constructive upper bound");

  TransformArgs transform_args;
  std::map<std::string, CLI::App*> transforms;
  const std::pair<const char*, const char*> transform_help[] = {
      {"pnf", "Prenex normal form of a formula"},
      {"skolemize", "Skolemize a sentence"},
      {"gdnf", "Generalized disjunctive normal form over a split signature"},
      {"gcnf", "Generalized conjunctive normal form over a split signature"}};
  for (const auto& [name, help] : transform_help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--theory", transform_args.theory)->required();
    sub->add_option("--phi", transform_args.phi)->required();
    sub->add_option("--vars", common.vars, "Free variables, e.g. \"S:x,y T:u\"");
    sub->add_option("--verify", transform_args.verify, "Check the result on all structures up to this size");
    transforms[name] = sub;
  }

  CombineArgs combine_args;
  auto* combine = app.add_subcommand("combine", "Decide a combined query at a size bound");
  combine->add_option("--mode", combine_args.mode, "polite, shiny, or oracle");
  combine->add_option("--t1", combine_args.t1)->required();
  combine->add_option("--t2", combine_args.t2)->required();
  combine->add_option("--phi1", combine_args.phi1);
  combine->add_option("--phi2", combine_args.phi2);
  combine->add_option("--vars", common.vars, "Free variables, e.g. \"S:x,y T:u\"");
  combine->add_option("--bound", combine_args.bound)->check(CLI::PositiveNumber);

  MinmodsArgs minmods_args;
  auto* mm = app.add_subcommand("minmods", "Minimal model sizes of a formula");
  mm->add_option("--theory", minmods_args.theory)->required();
  mm->add_option("--phi", minmods_args.phi);
  mm->add_option("--vars", common.vars, "Free variables, e.g. \"S:x,y T:u\"");
  mm->add_option("--sorts", minmods_args.sorts, "Comma-separated sorts (default: all)");
  mm->add_option("--bound", minmods_args.bound)->check(CLI::PositiveNumber);

  GammaArgs gamma_args;
  auto* gamma = app.add_subcommand("gamma-demo", "Build the Γ fragments and a model for them");
  gamma->add_option("--setup", gamma_args.setup, "JSON setup file")->required();
  gamma->add_flag("--verify", gamma_args.verify, "Construct the model and check every fragment");
  gamma->add_flag("--fragments", gamma_args.fragments, "Print the fragment formulas");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "msort-kit: " << e.what() << "\n";
    err << "Run with --help for more information.\n";
    return kExitUsage;
  }

  try {
    if (*parse) return cmd_parse(parse_path, common, out);
    if (*models) return cmd_models(models_args, common, out);
    if (*solve) return cmd_solve(solve_args, common, out);
    if (*arrange) return cmd_arrange(arrange_vars, arrange_count, common, out);
    if (*ramsey) return cmd_ramsey(ramsey_args, common, out);
    for (const auto& [name, sub] : transforms) {
      if (*sub) return cmd_transform(name, transform_args, common, out);
    }
    if (*combine) return cmd_combine(combine_args, common, out);
    if (*mm) return cmd_minmods(minmods_args, common, out);
    if (*gamma) return cmd_gamma(gamma_args, common, out);
  } catch (const CapExceeded& e) {
    err << "msort-kit: " << e.what() << "\n";
    return kExitCap;
  } catch (const OverflowError& e) {
    err << "msort-kit: " << e.what() << "\n";
    return kExitCap;
  } catch (const Error& e) {
    err << "msort-kit: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace msk::cli
