// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "emars/constraints.hpp"
#include "interval_oracle.hpp"
#include "test_support.hpp"

using namespace emars;
using namespace emars::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

const lang::Program& ontology() {
  static const lang::Program p = parse_file("rules/wikidata_ontology.marpl");
  return p;
}

std::vector<nlohmann::json> load_docs(const std::string& rel) {
  std::ifstream in(source_path(rel));
  return wikidata::read_entity_documents(in);
}

// 1. The symmetric spouse rule copies start, location and end exactly.
Outcome spouse_attributes() {
  Outcome o;
  AttributeSet attrs;
  attrs[P(580)].insert(DataValue(TimeValue::make(to_seconds({1990, 6, 16, 0, 0, 0}), to_seconds({1990, 6, 16, 0, 0, 0}),
                                                 to_seconds({1990, 6, 16, 23, 59, 59}))));
  attrs[P(276)].insert(Q(90));
  attrs[P(582)].insert(DataValue(year(2005)));
  Store s = store_of({fact(P(26), Q(1), Q(2), attrs)});
  const ClosureReport r = close(s, compile(parse_file("rules/spouse_symmetric.marpl")));
  const auto inverse = s.match(Pattern{PatternSlot::of(P(26)), {PatternSlot::of(Q(2)), PatternSlot::of(Q(1))}, {}});
  o.expect(inverse.size() == 1, "expected exactly one spouse(Q2, Q1)");
  if (inverse.size() == 1) o.expect(s.fact(inverse[0].fact).attrs == attrs, "inverse attributes differ");
  o.expect(s.size() == 2 && !r.limit_hit, "unexpected extra facts or limit");
  o.detail = o.pass ? "attrs equal, rounds=" + std::to_string(r.rounds) : o.detail;
  return o;
}

// 2. Ontology closure equals a naive Datalog oracle.
Outcome ontology_closure() {
  Outcome o;
  const EntityRef inst = alias("instance_of"), sub = alias("subclass_of"), subp = alias("subproperty_of");
  std::vector<Fact> facts;
  for (int i = 1; i <= 6; ++i) facts.push_back(fact(sub, Q(i), Q(i + 1)));
  facts.push_back(fact(inst, Q(100), Q(1)));
  for (int i = 1; i <= 3; ++i) {
    facts.push_back(fact(subp, P(200 + i), P(201 + i)));
    facts.push_back(fact(inst, P(200 + i), alias("Wikidata_property")));
  }
  facts.push_back(fact(P(201), Q(50), Q(51)));
  facts.push_back(fact(inst, P(26), alias("symmetric_property")));
  facts.push_back(fact(P(26), Q(60), Q(61)));
  facts.push_back(fact(inst, P(361), alias("transitive_property")));
  for (int i = 70; i < 74; ++i) facts.push_back(fact(P(361), Q(i), Q(i + 1)));

  const Store s = close_with(ontology(), facts);
  std::set<Tuple> base;
  for (const Fact& f : facts) base.insert(tuple_of(f));
  const auto want = naive_closure(ontology_oracle_rules(), base);
  const auto got = tuples_of(s);
  o.expect(got == want, "closure differs from oracle");
  o.detail = "facts=" + std::to_string(got.size()) + " oracle=" + std::to_string(want.size());
  return o;
}

// 3. Humans become persons through the subclass chain.
Outcome humans_are_persons() {
  Outcome o;
  const EntityRef inst = alias("instance_of"), sub = alias("subclass_of");
  std::vector<Fact> facts = {fact(sub, alias("human"), Q(154954)), fact(sub, Q(154954), alias("person"))};
  for (int i = 0; i < 50; ++i) facts.push_back(fact(inst, Q(1000 + i), alias("human")));
  const Pattern persons{PatternSlot::of(inst), {PatternSlot::variable("x"), PatternSlot::of(alias("person"))}, {}};
  const std::size_t before = store_of(facts).match(persons).size();
  const Store s = close_with(ontology(), facts);
  const std::size_t after = s.match(persons).size();
  o.expect(before == 0 && after == 50, "person count");
  o.detail = "before=" + std::to_string(before) + " after=" + std::to_string(after);
  return o;
}

// 4. Class recognition for female humans.
Outcome female_humans() {
  Outcome o;
  const EntityRef inst = alias("instance_of");
  std::vector<Fact> facts;
  std::set<Term, TermLess> female;
  for (int i = 0; i < 20; ++i) {
    const EntityRef h = Q(2000 + i);
    facts.push_back(fact(inst, h, alias("human")));
    const bool f = i % 5 == 0 || i % 5 == 3;
    facts.push_back(fact(alias("sex_or_gender"), h, f ? alias("female") : Q(6581097)));
    if (f) female.insert(h);
  }
  const Store s = close_with(parse_file("rules/female_human.marpl"), facts);
  std::set<Term, TermLess> got;
  for (const Match& m :
       s.match(Pattern{PatternSlot::of(inst), {PatternSlot::variable("x"), PatternSlot::of(alias("female_human"))}, {}})) {
    got.insert(m.bindings.at("x"));
  }
  o.expect(female.size() == 8 && got == female, "recognized set differs");
  o.detail = "recognized=" + std::to_string(got.size()) + "/8";
  return o;
}

// 5. Lazy plan agrees with the materialized expansion.
Outcome plan_equals_expansion() {
  Outcome o;
  std::mt19937 rng(5005);
  int cases = 0, blend = 0, blocked = 0;
  for (; cases < 600; ++cases) {
    const CharacterizedCase c = random_characterized_case(rng);
    const PlanVsExpansion r = plan_vs_expansion(parse(c.text), c.facts);
    if (fact_set(r.plan) != fact_set(r.expanded) || r.plan_report.limit_hit != r.expanded_report.limit_hit) {
      o.expect(false, "mismatch on case " + std::to_string(cases) + ":\n" + c.text);
      break;
    }
    blend += c.blend;
    if (c.guarded) {
      const Store plain = close_with(parse(c.ignore_text), c.facts, quiet_options());
      std::set<Tuple> characterized;
      for (const Fact& f : r.plan.facts()) characterized.insert(tuple_of(Fact{f.predicate, f.args, {}}));
      for (const Fact& f : plain.facts()) {
        if (!characterized.count(tuple_of(Fact{f.predicate, f.args, {}}))) {
          ++blocked;
          break;
        }
      }
    }
  }
  o.expect(blend > 0 && blocked > 0, "generator produced no blend or guard-blocked cases");
  o.detail = "cases=" + std::to_string(cases) + " blend=" + std::to_string(blend) + " blocked=" + std::to_string(blocked);
  return o;
}

// 6. Interval operations against an exhaustive point-set oracle.
Outcome interval_oracle() {
  Outcome o;
  const OracleTally t = run_interval_oracle(60606, 600);
  o.expect(t.checks >= 10000, "too few checks");
  o.expect(t.failures == 0, t.first_failure);
  o.detail = "checks=" + std::to_string(t.checks) + " failures=" + std::to_string(t.failures);
  return o;
}

// 7. Built-in constraints on fixtures and against brute force.
Outcome constraint_detection() {
  Outcome o;
  Store dup;
  wikidata::ingest_entities(load_docs("fixtures/duplicate_values.json"), dup);
  const auto distinct = parse_file("constraints/distinct_values.mapl").constraints.at(0);
  const auto vs = find_violations(dup, distinct);
  o.expect(vs.size() == 1, "expected one distinct_values violation");
  if (vs.size() == 1) {
    const std::map<std::string, Term> b(vs[0].bindings.begin(), vs[0].bindings.end());
    o.expect(b.at("s1") == Term(Q(101)) && b.at("s2") == Term(Q(102)) && b.at("o1") == Term(Q(500)),
             "wrong distinct_values bindings");
  }
  auto docs = load_docs("fixtures/duplicate_values.json");
  docs.erase(std::remove_if(docs.begin(), docs.end(), [](const auto& d) { return d.at("id") == "Q102"; }), docs.end());
  Store clean;
  wikidata::ingest_entities(docs, clean);
  o.expect(find_violations(clean, distinct).empty(), "violation on distinct values");

  const auto single = parse_file("constraints/single_value.mapl").constraints.at(0);
  std::mt19937 rng(707);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::size_t total = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<Fact> facts;
    for (int p = 1; p <= 3; ++p) {
      if (pick(0, 1)) facts.push_back(fact(P(2302), P(p), alias("single_value_constraint")));
    }
    for (int k = pick(1, 20); k > 0; --k) facts.push_back(fact(P(pick(1, 3)), Q(pick(1, 5)), Q(pick(1, 5))));
    const Store s = store_of(facts);
    const Interpretation interp(s);
    const auto fast = find_violations(interp, single);
    o.expect(fast == find_violations_brute(interp, single), "single_value query differs from brute force");
    total += fast.size();
  }
  o.detail = "distinct=" + std::to_string(vs.size()) + " single_value_random=" + std::to_string(total);
  return o;
}

// 8. Ingest of the 100-entity fixture.
Outcome ingest_fixture() {
  Outcome o;
  const auto docs = load_docs("fixtures/ingest_100.json");
  Store s;
  const auto report = wikidata::ingest_entities(docs, s);
  const auto counts = nlohmann::json::parse(read_file(source_path("fixtures/ingest_100.counts.json")));
  const auto got = report.to_json();
  for (const auto& [k, v] : counts.items()) o.expect(got.at(k) == v, "count " + k);
  std::vector<Fact> expected;
  std::istringstream lines(read_file(source_path("fixtures/ingest_100.expected.jsonl")));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) expected.push_back(fact_from_json(nlohmann::json::parse(line)));
  }
  o.expect(skolem_normal(s.facts()) == skolem_normal(expected), "facts differ from expected");
  Store again;
  again.set_skolem_counter(5000);
  wikidata::ingest_entities(docs, again);
  o.expect(skolem_normal(again.facts()) == skolem_normal(s.facts()), "re-ingest not isomorphic");
  o.detail = "facts=" + std::to_string(s.size()) + " skolems=" + std::to_string(report.skolems_created);
  return o;
}

// 9. Closure properties.
Outcome closure_properties() {
  Outcome o;
  std::mt19937 rng(909);
  for (int i = 0; i < 60; ++i) {
    const CharacterizedCase c = random_characterized_case(rng);
    const lang::Program p = parse(c.text);
    Store s = store_of(c.facts);
    const ExecutionPlan plan = compile(p);
    const ClosureReport first = close(s, plan, quiet_options());
    if (first.limit_hit) continue;
    const std::string snap = snapshot_string(s);
    close(s, plan, quiet_options());
    o.expect(snapshot_string(s) == snap, "closure not idempotent");

    std::vector<Fact> shuffled = c.facts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    lang::Program reversed = p;
    std::reverse(reversed.rules.begin(), reversed.rules.end());
    std::reverse(reversed.characterizations.begin(), reversed.characterizations.end());
    o.expect(snapshot_string(close_with(reversed, shuffled, quiet_options())) == snap, "snapshot depends on input order");

    Store naive = store_of(c.facts);
    close_naive(naive, plan, quiet_options().limits);
    o.expect(fact_set(naive) == fact_set(s), "semi-naive differs from naive");
  }
  for (int i = 0; i < 60; ++i) {
    const PlainCase c = random_plain_case(rng);
    const Store s = close_with(parse(c.text), c.facts);
    std::set<Tuple> base;
    for (const Fact& f : c.facts) base.insert(tuple_of(f));
    o.expect(tuples_of(s) == naive_closure(c.rules, base), "plain closure differs from oracle");
  }
  std::vector<Fact> chain;
  for (int i = 1; i <= 8; ++i) chain.push_back(fact(alias("subclass_of"), Q(i), Q(i + 1)));
  Store limited = store_of(chain);
  ClosureOptions tight;
  tight.limits.max_facts = 10;
  const ClosureReport r = close(limited, compile(ontology()), tight);
  o.expect(r.limit_hit && r.limit == "maxFacts" && !limited.closed() && limited.size() <= 10, "limit not enforced");
  if (o.pass) o.detail = "idempotent, order-independent, naive-equal, limit=" + r.limit;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"spouse symmetry keeps attributes", spouse_attributes},
      {"ontology closure matches oracle", ontology_closure},
      {"humans are persons", humans_are_persons},
      {"female human recognition", female_humans},
      {"plan equals expansion", plan_equals_expansion},
      {"interval operations match oracle", interval_oracle},
      {"constraint violations detected", constraint_detection},
      {"ingest fixture", ingest_fixture},
      {"closure properties", closure_properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": " << o.detail << '\n';
  }
  return failed == 0 ? 0 : 1;
}
