#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "emars/constraints.hpp"
#include "emars/error.hpp"
#include "test_support.hpp"

using namespace emars;
using namespace emars::testing;

namespace {

const EntityRef kPC = P(2302);
const EntityRef kDistinct = alias("distinct_values_constraint");
const EntityRef kSingle = alias("single_value_constraint");
const EntityRef kSymmetric = alias("symmetric_constraint");

lang::Constraint constraint_named(const std::string& name) {
  for (const auto& c : builtin_constraints()) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no builtin " + name);
}

lang::Constraint one_constraint(const std::string& text) { return parse(text).constraints.at(0); }

std::map<std::string, Term> bindings_of(const Violation& v) { return {v.bindings.begin(), v.bindings.end()}; }

std::vector<Fact> random_store(std::mt19937& rng, int max_facts) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<Fact> out;
  const int n = pick(1, max_facts);
  for (int i = 0; i < n; ++i) out.push_back(fact(P(pick(1, 3)), Q(pick(1, 6)), Q(pick(1, 6))));
  for (int pn = 1; pn <= 3; ++pn) {
    if (pick(0, 1)) out.push_back(fact(kPC, P(pn), kSingle));
    if (pick(0, 2) == 0) out.push_back(fact(kPC, P(pn), kDistinct));
  }
  return out;
}

}  // namespace

TEST(Eval, CountingAndEquality) {
  const Store s = store_of({fact(P(26), Q(1), Q(2))});
  EXPECT_TRUE(eval_formula(s, lang::parse_formula("exists=1 y . spouse(Q1, y)")));
  EXPECT_FALSE(eval_formula(s, lang::parse_formula("exists>=2 y . spouse(Q1, y)")));
  EXPECT_TRUE(eval_formula(s, lang::parse_formula("Q1 = Q1")));
  EXPECT_FALSE(eval_formula(s, lang::parse_formula("Q1 = _:sk1")));
}

TEST(Eval, AsymmetricSpousePair) {
  AttributeSet start;
  start[P(580)].insert(DataValue(year(1990)));
  const Store s = store_of({fact(P(26), Q(1), Q(2), start), fact(P(26), Q(3), Q(4))});
  const auto f = parse_file("constraints/spouse_symmetric.mapl").constraints.at(0).formula;
  EXPECT_FALSE(eval_formula(s, f));
  const Store ok = store_of({fact(P(26), Q(1), Q(2)), fact(P(26), Q(2), Q(1))});
  EXPECT_TRUE(eval_formula(ok, f));
}

TEST(Eval, SetAtomsAndDatatypeRelations) {
  AttributeSet a;
  a[P(580)].insert(DataValue(year(1990)));
  const Store s = store_of({fact(P(26), Q(1), Q(2), a), fact(P(26), Q(1), Q(3))});
  EXPECT_TRUE(eval_formula(s, lang::parse_formula("exists y, S, t . P26(Q1, y)@S and (P580 : t) in S and nonempty(t)")));
  EXPECT_TRUE(eval_formula(s, lang::parse_formula("exists y, S . P26(Q1, y)@S and absent(P580, S)")));
  EXPECT_FALSE(eval_formula(s, lang::parse_formula("forall y, S . P26(Q1, y)@S -> not absent(P580, S)")));
}

TEST(Eval, Errors) {
  const Store s = store_of({fact(P(26), Q(1), Q(2))});
  EXPECT_THROW(eval_formula(s, lang::parse_formula("P26(x, Q2)")), EvaluationError);
  const Store v = store_of({fact(P(1), {Q(1), DataValue(year(2000))}), fact(P(2), {Q(1), DataValue(StringValue{"x"})})});
  EXPECT_THROW(eval_formula(v, lang::parse_formula("forall t, u . P1(Q1, t) and P2(Q1, u) -> before(t, u)")),
               EvaluationError);
  FormulaBindings b = {{"x", Q(1)}};
  EXPECT_TRUE(eval_formula(s, lang::parse_formula("P26(x, Q2)"), b));
}

TEST(Violations, DistinctValuesDuplicate) {
  const Store s = store_of({fact(kPC, P(9001), kDistinct), fact(P(9001), Q(1), Q(500)), fact(P(9001), Q(2), Q(500))});
  const auto vs = find_violations(s, constraint_named("distinct_values"));
  ASSERT_EQ(vs.size(), 1u);
  const auto b = bindings_of(vs[0]);
  EXPECT_EQ(b.at("p"), Term(P(9001)));
  EXPECT_EQ(b.at("s1"), Term(Q(1)));
  EXPECT_EQ(b.at("s2"), Term(Q(2)));
  EXPECT_EQ(b.at("o1"), Term(Q(500)));
  EXPECT_EQ(b.at("o2"), Term(Q(500)));
  EXPECT_EQ(vs[0].witnesses.size(), 3u);
}

TEST(Violations, DistinctValuesClean) {
  const Store s = store_of({fact(kPC, P(9001), kDistinct), fact(P(9001), Q(1), Q(500)), fact(P(9001), Q(2), Q(501))});
  EXPECT_TRUE(find_violations(s, constraint_named("distinct_values")).empty());
}

TEST(Violations, SingleValue) {
  const Store s = store_of({fact(kPC, P(5), kSingle), fact(P(5), Q(1), Q(2)), fact(P(5), Q(1), Q(3)), fact(P(5), Q(4), Q(2))});
  const auto c = constraint_named("single_value");
  const auto vs = find_violations(s, c);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(bindings_of(vs[0]).at("s"), Term(Q(1)));
  EXPECT_EQ(vs, find_violations_brute(Interpretation(s), c));
}

TEST(Violations, SymmetricTemplateFlagsMissingInverse) {
  const Store s = store_of({fact(kPC, P(26), kSymmetric), fact(P(26), Q(1), Q(2)), fact(P(26), Q(3), Q(4)),
                            fact(P(26), Q(4), Q(3))});
  const auto vs = find_violations(s, constraint_named("symmetric"));
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(bindings_of(vs[0]).at("x"), Term(Q(1)));
  EXPECT_EQ(bindings_of(vs[0]).at("y"), Term(Q(2)));
}

TEST(Builtins, DistinctValuesIsTheShippedFormula) {
  EXPECT_EQ(constraint_named("distinct_values"), parse_file("constraints/distinct_values.mapl").constraints.at(0));
  EXPECT_EQ(constraint_named("single_value"), parse_file("constraints/single_value.mapl").constraints.at(0));
}

TEST(Builtins, ActivatedByPropertyConstraintFacts) {
  EXPECT_TRUE(active_builtins(store_of({fact(P(26), Q(1), Q(2))})).empty());
  const auto active = active_builtins(store_of({fact(kPC, P(26), kSymmetric)}));
  ASSERT_EQ(active.size(), 1u);
  EXPECT_EQ(active[0].name, "symmetric");
}

TEST(Violations, QueryRouteEqualsBruteForce) {
  const std::vector<lang::Constraint> cs = {
      constraint_named("distinct_values"),
      constraint_named("single_value"),
      one_constraint("constraint inv(x, y) : P1(x, y) -> P2(y, x) or P1(y, x)."),
      one_constraint("constraint two(x) : exists y . P1(x, y) -> exists>=2 z . P3(x, z)."),
      one_constraint("constraint exact(x) warning : P2(x, x) -> exists=1 y . P1(x, y) and not P3(y, x)."),
      one_constraint("constraint chain : forall x, y, z . P1(x, y) and P1(y, z) -> P1(x, z)."),
  };
  std::mt19937 rng(77);
  for (int i = 0; i < 120; ++i) {
    const Store s = store_of(random_store(rng, 25));
    const Interpretation interp(s);
    for (const auto& c : cs) EXPECT_EQ(find_violations(interp, c), find_violations_brute(interp, c)) << c.name;
  }
}

TEST(Violations, DualityWithUniversalClosure) {
  const std::vector<std::string> texts = {"constraint inv(x, y) : P1(x, y) -> P1(y, x).",
                                          "constraint sv(p, s) : property_constraint(p, single_value_constraint) -> "
                                          "exists<=1 o . p(s, o)."};
  std::mt19937 rng(88);
  for (int i = 0; i < 80; ++i) {
    const Store s = store_of(random_store(rng, 15));
    for (const auto& t : texts) {
      const auto c = one_constraint(t);
      lang::Formula closed;
      closed.kind = lang::Formula::Kind::forall;
      closed.vars = c.params;
      closed.children = {c.formula};
      EXPECT_EQ(find_violations(s, c).empty(), eval_formula(s, closed)) << t;
    }
  }
}

TEST(Violations, CountingAgreesWithEnumeration) {
  std::mt19937 rng(99);
  for (int i = 0; i < 40; ++i) {
    const Store s = store_of(random_store(rng, 50));
    const Interpretation interp(s);
    std::map<Term, std::set<Term, TermLess>, TermLess> succ;
    for (const Fact& f : s.facts()) {
      if (f.predicate == P(1)) succ[f.args[0]].insert(f.args[1]);
    }
    const auto domain = interp.domain();
    for (int k = 0; k <= 5; ++k) {
      const std::pair<const char*, std::function<bool(std::size_t)>> kinds[] = {
          {">=", [k](std::size_t n) { return n >= static_cast<std::size_t>(k); }},
          {"<=", [k](std::size_t n) { return n <= static_cast<std::size_t>(k); }},
          {"=", [k](std::size_t n) { return n == static_cast<std::size_t>(k); }}};
      for (const auto& [op, holds] : kinds) {
        const auto c =
            one_constraint("constraint c(x) : exists" + std::string(op) + std::to_string(k) + " y . P1(x, y).");
        std::vector<Term> want;
        for (const Term& x : domain) {
          const std::size_t n = succ.count(x) ? succ.at(x).size() : 0;
          if (!holds(n)) want.push_back(x);
        }
        std::vector<Term> got;
        for (const Violation& v : find_violations(interp, c)) got.push_back(v.bindings.at(0).second);
        EXPECT_EQ(got, want) << op << k;
      }
    }
  }
}

TEST(Violations, SymmetricDeduplication) {
  const Store s = store_of({fact(kPC, P(9), kDistinct), fact(P(9), Q(1), Q(7)), fact(P(9), Q(2), Q(7)), fact(P(9), Q(3), Q(7))});
  const auto vs = find_violations(s, constraint_named("distinct_values"));
  ASSERT_EQ(vs.size(), 3u);
  for (const auto& v : vs) {
    const auto b = bindings_of(v);
    EXPECT_TRUE(compare_terms(b.at("s1"), b.at("s2")) < 0);
  }
}

TEST(Visibility, DeprecatedAndSkolems) {
  Store s;
  const EntityRef sk = s.fresh_skolem();
  s.assert_fact(fact(P(26), Q(1), Q(2), {{wikidata::kRank, {wikidata::kDeprecated}}}));
  s.assert_fact(fact(P(26), Q(3), sk, {{wikidata::kRank, {wikidata::kNormal}}}));
  const auto c = parse_file("constraints/spouse_symmetric.mapl").constraints.at(0);
  EXPECT_EQ(find_violations(s, c).size(), 1u);
  CheckOptions all;
  all.include_deprecated = true;
  EXPECT_EQ(find_violations(s, c, all).size(), 2u);
  CheckOptions no_skolems;
  no_skolems.include_skolems = false;
  EXPECT_TRUE(find_violations(s, c, no_skolems).empty());
}

TEST(Violations, UnknownFreeVariableIsCompileError) {
  const Store s = store_of({fact(P(1), Q(1), Q(2))});
  EXPECT_THROW(find_violations(s, one_constraint("constraint c(x) : P1(x, y).")), CompileError);
}

TEST(Typing, ValueTypeConstraints) {
  const auto cs = typing_constraints({{P(569), Datatype::time}});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].name, "value_type_P569");
  const Store s = store_of({fact(P(569), {Q(1), DataValue(year(1950))}), fact(P(569), {Q(2), Q(3)})});
  const auto vs = find_violations(s, cs[0]);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(bindings_of(vs[0]).at("s"), Term(Q(2)));
}

TEST(Check, ReportOrderWarningsAndPurity) {
  Store s = store_of({fact(kPC, P(9001), kDistinct), fact(P(9001), Q(1), Q(500)), fact(P(9001), Q(2), Q(500)),
                      fact(P(26), Q(1), Q(2))});
  const std::string before = snapshot_string(s);
  auto cs = builtin_constraints();
  cs.push_back(parse_file("constraints/spouse_symmetric.mapl").constraints.at(0));
  const CheckReport r = check(s, cs);
  EXPECT_EQ(snapshot_string(s), before);
  EXPECT_EQ(r.constraints, 4u);
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.violations[0].constraint, "distinct_values");
  EXPECT_EQ(r.violations[1].constraint, "spouse_symmetric");
  EXPECT_EQ(r.warnings.size(), 1u);

  CheckOptions serial;
  serial.parallel = false;
  EXPECT_EQ(check(s, cs, serial).violations, r.violations);

  s.set_closed(true);
  EXPECT_TRUE(check(s, cs).warnings.empty());

  std::ostringstream jsonl, table;
  write_violations_jsonl(jsonl, r);
  write_violations_table(table, r);
  std::istringstream lines(jsonl.str());
  std::string first;
  std::getline(lines, first);
  const auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j["constraint"], "distinct_values");
  EXPECT_EQ(j["severity"], "violation");
  EXPECT_EQ(j["bindings"]["s1"], "Q1");
  EXPECT_NE(table.str().find("spouse_symmetric"), std::string::npos);
}

TEST(Fixture, DuplicateValuesThroughIngest) {
  std::ifstream in(source_path("fixtures/duplicate_values.json"));
  Store s;
  wikidata::ingest_entities(wikidata::read_entity_documents(in), s);
  const auto vs = find_violations(s, parse_file("constraints/distinct_values.mapl").constraints.at(0));
  ASSERT_EQ(vs.size(), 1u);
  const auto b = bindings_of(vs[0]);
  EXPECT_EQ(b.at("s1"), Term(Q(101)));
  EXPECT_EQ(b.at("s2"), Term(Q(102)));
  EXPECT_EQ(b.at("o1"), Term(Q(500)));
}
