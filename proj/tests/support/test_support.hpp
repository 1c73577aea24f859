#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "emars/characterization.hpp"
#include "emars/engine.hpp"
#include "emars/expansion.hpp"
#include "emars/fact_io.hpp"
#include "emars/parser.hpp"
#include "emars/plan.hpp"
#include "emars/store.hpp"
#include "emars/timeline.hpp"
#include "emars/wikidata.hpp"

namespace emars::testing {

inline EntityRef Q(int n) { return EntityRef::item("Q" + std::to_string(n)); }
inline EntityRef P(int n) { return EntityRef::property("P" + std::to_string(n)); }

/// Alias from the Wikidata prelude, e.g. "instance_of".
inline EntityRef alias(const std::string& name) { return std::get<EntityRef>(wikidata::wikidata_aliases().at(name)); }

inline Fact fact(EntityRef p, std::vector<Term> args, AttributeSet attrs = {}) {
  return Fact{std::move(p), std::move(args), std::move(attrs)};
}

inline Fact fact(EntityRef p, EntityRef s, EntityRef o, AttributeSet attrs = {}) {
  return fact(std::move(p), std::vector<Term>{std::move(s), std::move(o)}, std::move(attrs));
}

inline Seconds jan1(int year) { return to_seconds({year, 1, 1, 0, 0, 0}); }
inline Seconds dec31(int year) { return to_seconds({year, 12, 31, 23, 59, 59}); }

/// Time from Jan 1 of `lo` to Dec 31 of `hi`, main at Jan 1 of `main`.
inline TimeValue years(int main, int lo, int hi) { return TimeValue::make(jan1(main), jan1(lo), dec31(hi)); }
inline TimeValue year(int y) { return years(y, y, y); }

inline QuantityValue qty(const char* main, const char* lo, const char* hi, const char* unit = "1") {
  return QuantityValue::make(Decimal::parse(main), Decimal::parse(lo), Decimal::parse(hi), unit);
}

inline std::string source_path(const std::string& rel) { return std::string(EMARS_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline lang::Program parse(const std::string& text) { return lang::parse_program(text); }
inline lang::Program parse_file(const std::string& rel) { return parse(read_file(source_path(rel))); }

inline Store store_of(const std::vector<Fact>& facts) {
  Store s;
  for (const Fact& f : facts) s.assert_fact(f);
  return s;
}

inline std::set<Fact, FactLess> fact_set(const Store& s) { return {s.facts().begin(), s.facts().end()}; }

inline std::string snapshot_string(const Store& s) {
  std::ostringstream out;
  write_snapshot(s, out);
  return out.str();
}

/// Closure of `facts` under `program` through the lazy plan.
inline Store close_with(const lang::Program& program, const std::vector<Fact>& facts, ClosureOptions options = {}) {
  Store s = store_of(facts);
  close(s, compile(program), options);
  return s;
}

// ---------------------------------------------------------------------------
// Naive Datalog over plain tuples: the oracle for attribute-free programs.
// A tuple is (predicate, arg1, ..); terms are entity ids.

struct OTerm {
  bool var = false;
  std::string name;
};
inline OTerm v(std::string n) { return {true, std::move(n)}; }
inline OTerm c(std::string n) { return {false, std::move(n)}; }

struct OAtom {
  OTerm pred;
  std::vector<OTerm> args;
};

struct ORule {
  std::vector<OAtom> body;
  OAtom head;
};

using Tuple = std::vector<std::string>;

namespace detail {

inline bool bind(const OTerm& t, const std::string& value, std::map<std::string, std::string>& env) {
  if (!t.var) return t.name == value;
  auto [it, fresh] = env.emplace(t.name, value);
  return fresh || it->second == value;
}

inline void join(const std::vector<OAtom>& body, std::size_t i, const std::set<Tuple>& facts,
                 std::map<std::string, std::string>& env, const OAtom& head, std::set<Tuple>& out) {
  if (i == body.size()) {
    Tuple t;
    t.push_back(head.pred.var ? env.at(head.pred.name) : head.pred.name);
    for (const OTerm& a : head.args) t.push_back(a.var ? env.at(a.name) : a.name);
    out.insert(std::move(t));
    return;
  }
  const OAtom& atom = body[i];
  for (const Tuple& f : facts) {
    if (f.size() != atom.args.size() + 1) continue;
    auto saved = env;
    bool ok = bind(atom.pred, f[0], env);
    for (std::size_t k = 0; ok && k < atom.args.size(); ++k) ok = bind(atom.args[k], f[k + 1], env);
    if (ok) join(body, i + 1, facts, env, head, out);
    env = std::move(saved);
  }
}

}  // namespace detail

inline std::set<Tuple> naive_closure(const std::vector<ORule>& rules, std::set<Tuple> facts) {
  for (;;) {
    std::set<Tuple> derived;
    for (const ORule& r : rules) {
      std::map<std::string, std::string> env;
      detail::join(r.body, 0, facts, env, r.head, derived);
    }
    const std::size_t before = facts.size();
    facts.insert(derived.begin(), derived.end());
    if (facts.size() == before) return facts;
  }
}

inline Tuple tuple_of(const Fact& f) {
  Tuple t{f.predicate.str()};
  for (const Term& a : f.args) t.push_back(std::get<EntityRef>(a).str());
  return t;
}

inline std::set<Tuple> tuples_of(const Store& s) {
  std::set<Tuple> out;
  for (const Fact& f : s.facts()) out.insert(tuple_of(f));
  return out;
}

inline Fact fact_of(const Tuple& t) {
  Fact f;
  f.predicate = *EntityRef::parse(t[0]);
  for (std::size_t i = 1; i < t.size(); ++i) f.args.push_back(*EntityRef::parse(t[i]));
  return f;
}

/// The six ontology rules, written out against the oracle directly.
inline std::vector<ORule> ontology_oracle_rules() {
  const std::string inst = "P31", sub = "P279", subp = "P1647";
  const std::string wdp = "Q18616576", sym = "Q18647518", trans = "Q18647515";
  return {
      {{{c(sub), {v("c"), v("d")}}, {c(sub), {v("d"), v("e")}}}, {c(sub), {v("c"), v("e")}}},
      {{{c(inst), {v("y"), v("c")}}, {c(sub), {v("c"), v("d")}}}, {c(inst), {v("y"), v("d")}}},
      {{{c(subp), {v("p"), v("q")}}, {c(subp), {v("q"), v("r")}}}, {c(subp), {v("p"), v("r")}}},
      {{{c(inst), {v("p"), c(wdp)}}, {c(subp), {v("p"), v("q")}}, {v("p"), {v("x"), v("y")}}},
       {v("q"), {v("x"), v("y")}}},
      {{{c(inst), {v("p"), c(sym)}}, {v("p"), {v("y"), v("x")}}}, {v("p"), {v("x"), v("y")}}},
      {{{c(inst), {v("p"), c(trans)}}, {v("p"), {v("x"), v("y")}}, {v("p"), {v("y"), v("z")}}},
       {v("p"), {v("x"), v("z")}}},
  };
}

/// Random attribute-free program over P101..P104 and Q1..Q5, with a
/// predicate variable guarded by P110 facts, in rule syntax and oracle form.
struct PlainCase {
  std::string text;
  std::vector<ORule> rules;
  std::vector<Fact> facts;
};

inline PlainCase random_plain_case(std::mt19937& rng, int max_facts = 20) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto pred = [&] { return "P" + std::to_string(pick(101, 104)); };
  PlainCase out;
  const int n_rules = pick(1, 4);
  for (int r = 0; r < n_rules; ++r) {
    const std::string a = pred(), b = pred(), h = pred();
    std::ostringstream t;
    t << "[r" << r << "] ";
    switch (pick(0, 4)) {
      case 0:
        t << a << "(x, y) -> " << h << "(y, x).";
        out.rules.push_back({{{c(a), {v("x"), v("y")}}}, {c(h), {v("y"), v("x")}}});
        break;
      case 1:
        t << a << "(x, y), " << b << "(y, z) -> " << h << "(x, z).";
        out.rules.push_back({{{c(a), {v("x"), v("y")}}, {c(b), {v("y"), v("z")}}}, {c(h), {v("x"), v("z")}}});
        break;
      case 2:
        t << a << "(x, y), " << b << "(x, y) -> " << h << "(x, x).";
        out.rules.push_back({{{c(a), {v("x"), v("y")}}, {c(b), {v("x"), v("y")}}}, {c(h), {v("x"), v("x")}}});
        break;
      case 3:
        t << a << "(x, Q1), " << b << "(y, x) -> " << h << "(y, Q2).";
        out.rules.push_back({{{c(a), {v("x"), c("Q1")}}, {c(b), {v("y"), v("x")}}}, {c(h), {v("y"), c("Q2")}}});
        break;
      default:
        t << "P110(p, Q9), p(x, y) -> " << h << "(y, x).";
        out.rules.push_back({{{c("P110"), {v("p"), c("Q9")}}, {v("p"), {v("x"), v("y")}}}, {c(h), {v("y"), v("x")}}});
        break;
    }
    out.text += t.str() + "\n";
  }
  const int n_facts = pick(1, max_facts);
  for (int i = 0; i < n_facts; ++i) {
    if (pick(0, 9) == 0) {
      out.facts.push_back(fact(P(110), P(pick(101, 104)), Q(9)));
    } else {
      out.facts.push_back(fact(P(pick(101, 104)), Q(pick(1, 5)), Q(pick(1, 5))));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random characterized programs for plan/expansion equivalence.

struct CharacterizedCase {
  std::string text;
  std::string ignore_text;  // same rules, no characterizations
  std::vector<Fact> facts;
  bool blend = false;
  bool guarded = false;
};

inline CharacterizedCase random_characterized_case(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  CharacterizedCase out;

  std::string chars;
  switch (pick(0, 4)) {
    case 0: chars += "qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n"; out.guarded = true; break;
    case 1: chars += "qualifier P585: TimeValue combine fn = iv_hull.\n"; break;
    case 2: chars += "qualifier P585: TimeValue combine fn = time_first guard = nonempty.\n"; break;
    case 3: chars += "qualifier P585 additive.\n"; break;
    default: break;
  }
  switch (pick(0, 3)) {
    case 0:
    case 1:
      chars +=
          "qualifier P580: TimeValue blend combine(P580 = time_last, P582 = time_first) fn = could_be_before "
          "guard = could_be_before.\n"
          "qualifier P582: TimeValue blend combine(P582 = time_first, P580 = time_last) fn = could_be_after "
          "guard = could_be_after.\n";
      out.blend = true;
      out.guarded = true;
      break;
    case 2: chars += "qualifier P580: TimeValue combine fn = time_last.\nqualifier P582 additive.\n"; break;
    default: break;
  }
  if (pick(0, 1)) chars += "qualifier P276 additive.\n";
  if (pick(0, 1)) chars += "qualifier P1545 additive.\n";

  auto pred = [&] { return "P" + std::to_string(pick(101, 103)); };
  std::string rules;
  const int n_rules = pick(1, 3);
  for (int r = 0; r < n_rules; ++r) {
    const std::string a = pred(), b = pred(), h = pred();
    std::string body, head;
    switch (pick(0, 3)) {
      case 0: body = a + "(x, y)@S1"; head = h + "(y, x)"; break;
      case 1: body = a + "(x, y)@S1, " + b + "(y, z)@S2"; head = h + "(x, z)"; break;
      case 2: body = a + "(x, y)@S1, " + b + "(x, y)@S2"; head = h + "(x, y)"; break;
      default: body = a + "(x, y)@S1, " + b + "(y, w)@S2"; head = h + "(x, y)"; break;
    }
    if (pick(0, 4) == 0) head += "@{P642: y}";
    std::string with;
    if (pick(0, 2) == 0) {
      const std::string fn = "f" + std::to_string(r);
      static const char* kClauses[] = {"(P642 : v) in S1 => P642 : v;", "(P580 : v) in S1 => P580 : v;",
                                       "=> P1545 : \"x\";", "(a : v) in S1 => a : v;"};
      rules += "function " + fn + "(S1) { " + kClauses[pick(0, 3)] + " }\n";
      with = " with " + fn + "(S1)";
    }
    rules += "[r" + std::to_string(r) + "] " + body + " -> " + head + with + ".\n";
  }
  out.text = chars + rules;
  out.ignore_text = rules;

  auto time = [&] {
    const int lo = pick(2000, 2008);
    const int hi = lo + pick(0, 3);
    return Term(DataValue(years(pick(lo, hi), lo, hi)));
  };
  const int n_facts = pick(1, 6);
  for (int i = 0; i < n_facts; ++i) {
    AttributeSet attrs;
    for (int attr : {580, 582, 585}) {
      if (pick(0, 9) < 5) {
        attrs[P(attr)].insert(time());
        if (pick(0, 5) == 0) attrs[P(attr)].insert(time());
      }
    }
    if (pick(0, 2) == 0) attrs[P(276)].insert(Q(pick(90, 91)));
    if (pick(0, 3) == 0) attrs[P(1545)].insert(DataValue(StringValue{std::to_string(pick(1, 2))}));
    if (pick(0, 3) == 0) attrs[P(642)].insert(Q(pick(70, 71)));
    out.facts.push_back(fact(P(pick(101, 103)), Q(pick(1, 3)), Q(pick(1, 3)), std::move(attrs)));
  }
  return out;
}

inline ClosureOptions quiet_options() {
  ClosureOptions o;
  o.provenance = false;
  o.limits.max_rounds = 40;
  o.limits.max_facts = 5000;
  return o;
}

/// Closure through the lazy plan and through the materialized expansion.
struct PlanVsExpansion {
  Store plan;
  Store expanded;
  ClosureReport plan_report;
  ClosureReport expanded_report;
};

inline PlanVsExpansion plan_vs_expansion(const lang::Program& program, const std::vector<Fact>& facts) {
  PlanVsExpansion r{store_of(facts), store_of(facts), {}, {}};
  r.plan_report = close(r.plan, compile(program), quiet_options());
  const lang::Program expanded = expand_materialized(program, DatatypeTheory::wikidata());
  r.expanded_report = close(r.expanded, compile(expanded), quiet_options());
  return r;
}

// ---------------------------------------------------------------------------
// Skolem renaming.

inline bool has_skolem(const Term& t) {
  const EntityRef* e = as_entity(t);
  return e != nullptr && e->kind == EntityRef::Kind::skolem;
}

/// Renames skolems to _:sk0, _:sk1, .. in order of first occurrence, facts
/// ordered with skolems masked out.
inline std::vector<Fact> skolem_normal(std::vector<Fact> facts) {
  const Term mask = EntityRef::skolem("_:sk");
  auto masked = [&](Fact f) {
    for (Term& a : f.args) {
      if (has_skolem(a)) a = mask;
    }
    for (auto& [k, vals] : f.attrs) {
      ValueSet out;
      for (const Term& t : vals) out.insert(has_skolem(t) ? mask : t);
      vals = std::move(out);
    }
    return f;
  };
  std::stable_sort(facts.begin(), facts.end(),
                   [&](const Fact& a, const Fact& b) { return compare_facts(masked(a), masked(b)) < 0; });
  std::map<std::string, std::string> names;
  auto rename = [&](const Term& t) -> Term {
    if (!has_skolem(t)) return t;
    const std::string& id = std::get<EntityRef>(t).id;
    auto it = names.find(id);
    if (it == names.end()) it = names.emplace(id, "_:sk" + std::to_string(names.size())).first;
    return EntityRef::skolem(it->second);
  };
  for (Fact& f : facts) {
    for (Term& a : f.args) a = rename(a);
    for (auto& [k, vals] : f.attrs) {
      ValueSet out;
      for (const Term& t : vals) out.insert(rename(t));
      vals = std::move(out);
    }
  }
  std::sort(facts.begin(), facts.end(), FactLess{});
  return facts;
}

}  // namespace emars::testing
