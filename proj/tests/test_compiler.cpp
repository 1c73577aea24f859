#include <gtest/gtest.h>

#include <random>

#include "emars/error.hpp"
#include "emars/interval.hpp"
#include "emars/printer.hpp"
#include "test_support.hpp"

using namespace emars;
using namespace emars::testing;

namespace {

const std::string kJoin = "[j] P1(x, y)@S1, P2(y, z)@S2 -> P3(x, z).\n";

/// Derived P3 facts of a closure.
std::vector<Fact> heads(const Store& s) {
  std::vector<Fact> out;
  for (const Fact& f : s.facts()) {
    if (f.predicate == P(3)) out.push_back(f);
  }
  return out;
}

AttributeSet at(EntityRef a, std::vector<Term> vals) {
  AttributeSet s;
  for (Term& t : vals) s[a].insert(std::move(t));
  return s;
}

AttributeSet merge(AttributeSet a, const AttributeSet& b) {
  for (const auto& [k, vs] : b) a[k].insert(vs.begin(), vs.end());
  return a;
}

}  // namespace

TEST(HeadAttrs, CopyAllFunctionMirrorsEverything) {
  AttributeSet attrs = merge(merge(at(P(580), {DataValue(years(1990, 1990, 1990))}), at(P(276), {Q(90)})),
                             at(P(582), {DataValue(year(2005))}));
  const Store s = close_with(parse_file("rules/spouse_copy_all.marpl"), {fact(P(26), Q(1), Q(2), attrs)});
  EXPECT_TRUE(s.contains(fact(P(26), Q(2), Q(1), attrs)));
  EXPECT_EQ(s.size(), 2u);
}

TEST(HeadAttrs, AdditiveTakesTheUnion) {
  const auto p = parse("qualifier P276 additive.\n" + kJoin);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(276), {Q(90)})), fact(P(2), Q(2), Q(3), at(P(276), {Q(91)}))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(276), {Q(90), Q(91)}));
}

TEST(HeadAttrs, CombiningIntersectsOverlappingRanges) {
  const auto p = parse("qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n" + kJoin);
  const TimeValue a = years(2005, 2000, 2010), b = years(2012, 2008, 2020);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(a)})),
                                 fact(P(2), Q(2), Q(3), at(P(585), {DataValue(b)}))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(585), {dt::iv_intersect(a, b)}));
}

TEST(HeadAttrs, CombiningGuardBlocksDisjointRanges) {
  const auto p = parse("qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n" + kJoin);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(years(1990, 1990, 1995))})),
                                 fact(P(2), Q(2), Q(3), at(P(585), {DataValue(years(2000, 2000, 2005))})),
                                 fact(P(2), Q(2), Q(4), at(P(585), {DataValue(years(1992, 1992, 1993))}))});
  // The blocked match does not stop the other one.
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].args[1], Term(Q(4)));
}

TEST(HeadAttrs, StartEndBlend) {
  const auto p = parse(read_file(source_path("rules/temporal_qualifiers.marpl")) + kJoin);
  const TimeValue s1 = years(1990, 1990, 1995), s2 = years(1993, 1992, 1994);
  const TimeValue e1 = years(2000, 1994, 2000), e2 = years(2010, 2010, 2010);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), merge(at(P(580), {DataValue(s1)}), at(P(582), {DataValue(e1)}))),
                                 fact(P(2), Q(2), Q(3), merge(at(P(580), {DataValue(s2)}), at(P(582), {DataValue(e2)})))});
  const TimeValue start = dt::time_extreme(dt::Extreme::last, s1, s2);
  const TimeValue end = dt::time_extreme(dt::Extreme::first, e1, e2);
  const TimeValue bstart = dt::time_part(start, end, dt::Flavour::can, dt::TimeOrder::before);
  const TimeValue bend = dt::time_part(end, start, dt::Flavour::can, dt::TimeOrder::after);
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, merge(at(P(580), {DataValue(bstart)}), at(P(582), {DataValue(bend)})));
}

TEST(HeadAttrs, StartEndBlendBlocksWhenStartCannotPrecedeEnd) {
  const auto p = parse(read_file(source_path("rules/temporal_qualifiers.marpl")) + kJoin);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(580), {DataValue(year(2010))})),
                                 fact(P(2), Q(2), Q(3), at(P(582), {DataValue(year(2000))}))});
  EXPECT_TRUE(heads(s).empty());
}

TEST(HeadAttrs, AllIgnoredLeavesOnlyExplicitOutput) {
  const auto p = parse("[j] P1(x, y)@S1, P2(y, z)@S2 -> P3(x, z)@{P642: y}.");
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(580), {DataValue(year(2000))})),
                                 fact(P(2), Q(2), Q(3), at(P(276), {Q(90)}))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(642), {Q(2)}));
}

TEST(HeadAttrs, CombiningFoldsLeftInBodyOrder) {
  // could_be_before is not associative, so the fold order shows.
  const auto p = parse(
      "qualifier P585: TimeValue combine fn = could_be_before.\n"
      "[j] P1(x, y)@S1, P2(y, z)@S2, P4(z, w)@S3 -> P3(x, w).");
  const TimeValue v1 = years(1990, 1990, 2010), v2 = years(2005, 2000, 2008), v3 = years(1995, 1995, 2001);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(v1)})),
                                 fact(P(2), Q(2), Q(3), at(P(585), {DataValue(v2)})),
                                 fact(P(4), Q(3), Q(4), at(P(585), {DataValue(v3)}))});
  const TimeValue left = dt::could_be_before(dt::could_be_before(v1, v2), v3);
  const TimeValue right = dt::could_be_before(v1, dt::could_be_before(v2, v3));
  ASSERT_NE(left, right);
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(585), {DataValue(left)}));
}

TEST(HeadAttrs, AssociativeCombineIsOrderFree) {
  const auto p = parse(
      "qualifier P585: TimeValue combine fn = iv_hull.\n"
      "[j] P1(x, y)@S1, P2(y, z)@S2, P4(z, w)@S3 -> P3(x, w).");
  const auto q = parse(
      "qualifier P585: TimeValue combine fn = iv_hull.\n"
      "[j] P4(z, w)@S3, P2(y, z)@S2, P1(x, y)@S1 -> P3(x, w).");
  std::mt19937 rng(4);
  for (int i = 0; i < 30; ++i) {
    auto t = [&] {
      const int lo = std::uniform_int_distribution<int>(1990, 2010)(rng);
      return DataValue(years(lo, lo, lo + 2));
    };
    const std::vector<Fact> facts = {fact(P(1), Q(1), Q(2), at(P(585), {t()})), fact(P(2), Q(2), Q(3), at(P(585), {t()})),
                                     fact(P(4), Q(3), Q(4), at(P(585), {t()}))};
    const auto a = heads(close_with(p, facts)), b = heads(close_with(q, facts));
    ASSERT_EQ(a.size(), 1u);
    ASSERT_EQ(b.size(), 1u);
    // Ranges agree; the main of a hull follows its first argument.
    EXPECT_EQ(std::get<TimeValue>(std::get<DataValue>(*a[0].attrs.at(P(585)).begin())).earliest,
              std::get<TimeValue>(std::get<DataValue>(*b[0].attrs.at(P(585)).begin())).earliest);
    EXPECT_EQ(std::get<TimeValue>(std::get<DataValue>(*a[0].attrs.at(P(585)).begin())).latest,
              std::get<TimeValue>(std::get<DataValue>(*b[0].attrs.at(P(585)).begin())).latest);
  }
  const auto r = parse(
      "qualifier P585: TimeValue combine fn = iv_intersect.\n"
      "[j] P1(x, y)@S1, P2(y, z)@S2, P4(z, w)@S3 -> P3(x, w).");
  const auto r2 = parse(
      "qualifier P585: TimeValue combine fn = iv_intersect.\n"
      "[j] P2(y, z)@S2, P4(z, w)@S3, P1(x, y)@S1 -> P3(x, w).");
  for (int i = 0; i < 30; ++i) {
    auto t = [&] {
      const int lo = std::uniform_int_distribution<int>(1990, 1994)(rng);
      return DataValue(years(lo, lo, lo + 4));
    };
    const std::vector<Fact> facts = {fact(P(1), Q(1), Q(2), at(P(585), {t()})), fact(P(2), Q(2), Q(3), at(P(585), {t()})),
                                     fact(P(4), Q(3), Q(4), at(P(585), {t()}))};
    EXPECT_EQ(heads(close_with(r, facts)), heads(close_with(r2, facts)));
  }
}

TEST(HeadAttrs, ValuesWithinOneFactAreFolded) {
  const auto p = parse("qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n[m] P1(x, y) -> P3(x, y).");
  const TimeValue a = years(2000, 2000, 2004), b = years(2003, 2002, 2008);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(a), DataValue(b)}))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(585), {dt::iv_intersect(a, b)}));
}

TEST(HeadAttrs, SingleValuePassesThroughGuard) {
  const auto p = parse("qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n" + kJoin);
  const TimeValue a = years(2005, 2000, 2010);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(a)})), fact(P(2), Q(2), Q(3))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(585), {DataValue(a)}));
}

TEST(HeadAttrs, AbsentEverywhereContributesNothing) {
  for (const char* policy : {"additive", ": TimeValue combine fn = iv_intersect guard = nonempty"}) {
    const auto p = parse(std::string("qualifier P585 ") + policy + ".\n" + kJoin);
    const Store s = close_with(p, {fact(P(1), Q(1), Q(2)), fact(P(2), Q(2), Q(3))});
    ASSERT_EQ(heads(s).size(), 1u);
    EXPECT_TRUE(heads(s)[0].attrs.empty());
  }
}

TEST(HeadAttrs, FunctionMentionSuppressesHandler) {
  const auto p = parse(
      "qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n"
      "function f(S1) { (P585 : v) in S1 => P585 : v; }\n"
      "[j] P1(x, y)@S1, P2(y, z)@S2 -> P3(x, z) with f(S1).");
  // Disjoint values would block the handler; the function copies S1 instead.
  const TimeValue a = year(1990), b = year(2000);
  const Store s = close_with(p, {fact(P(1), Q(1), Q(2), at(P(585), {DataValue(a)})),
                                 fact(P(2), Q(2), Q(3), at(P(585), {DataValue(b)}))});
  ASSERT_EQ(heads(s).size(), 1u);
  EXPECT_EQ(heads(s)[0].attrs, at(P(585), {DataValue(a)}));
}

TEST(Compile, RejectsIllTypedCharacterizations) {
  EXPECT_THROW(compile(parse("qualifier P585: QuantityValue combine fn = time_first.\n" + kJoin)), CompileError);
  EXPECT_THROW(compile(parse("qualifier P585: TimeValue combine fn = iv_intersect guard = before.\n" + kJoin)),
               CompileError);
  EXPECT_THROW(compile(parse("qualifier P585: TimeValue combine fn = text.\n" + kJoin)), CompileError);
  EXPECT_THROW(compile(parse("P1(x, y) -> P2(x, z).")), CompileError);
  EXPECT_THROW(compile(parse("P1(x, y)@S -> P2(x, y) with nosuch(S).")), CompileError);
}

TEST(Expansion, OneCombiningAttributeSplitsInTwo) {
  const auto p = parse("qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n[m] P1(x, y) -> P3(x, y).");
  const lang::Program e = expand_materialized(p, DatatypeTheory::wikidata());
  EXPECT_TRUE(e.characterizations.empty());
  ASSERT_EQ(e.rules.size(), 2u);
  int with_guard = 0;
  for (const lang::Rule& r : e.rules) {
    ASSERT_TRUE(r.fn.has_value());
    for (const lang::Atom& a : r.body) with_guard += a.kind == lang::Atom::Kind::datatype_rel && a.rel == "nonempty";
  }
  EXPECT_EQ(with_guard, 1);
  ASSERT_EQ(e.functions.size(), 1u);
  EXPECT_EQ(e.rules[0].fn->name, e.functions[0].name);
  EXPECT_EQ(e.rules[1].fn->name, e.functions[0].name);
}

TEST(Expansion, IgnoreOnlyKeepsRules) {
  const auto p = parse(kJoin);
  const lang::Program e = expand_materialized(p, DatatypeTheory::wikidata());
  ASSERT_EQ(e.rules.size(), 1u);
  EXPECT_EQ(e.rules[0].head, p.rules[0].head);
  EXPECT_EQ(e.functions.size(), 1u);
}

TEST(Expansion, VariantsBoundedByPowerOfTwo) {
  const std::string chars =
      "qualifier P585: TimeValue combine fn = iv_intersect guard = nonempty.\n"
      "qualifier P580: TimeValue combine fn = time_last.\n"
      "qualifier P582: TimeValue combine fn = time_first guard = nonempty.\n";
  for (int m = 1; m <= 3; ++m) {
    std::string text;
    std::size_t pos = 0;
    for (int i = 0; i < m; ++i) pos = chars.find('\n', pos) + 1;
    text = chars.substr(0, pos) + "[j] P1(x, y)@S1, P2(y, z)@S2, P4(z, w)@S3 -> P3(x, w).";
    const lang::Program e = expand_materialized(parse(text), DatatypeTheory::wikidata());
    EXPECT_LE(e.rules.size(), std::size_t{1} << m) << text;
    EXPECT_GE(e.rules.size(), 2u);
  }
}

TEST(Expansion, ExpandedProgramReparses) {
  const auto p = parse(read_file(source_path("rules/temporal_qualifiers.marpl")) + kJoin);
  const lang::Program e = expand_materialized(p, DatatypeTheory::wikidata());
  EXPECT_EQ(parse(lang::print(e)), e);
}

TEST(PlanVsExpansion, RandomPrograms) {
  std::mt19937 rng(1234);
  int derived = 0;
  for (int i = 0; i < 200; ++i) {
    const CharacterizedCase c = random_characterized_case(rng);
    const PlanVsExpansion r = plan_vs_expansion(parse(c.text), c.facts);
    ASSERT_EQ(fact_set(r.plan), fact_set(r.expanded)) << c.text;
    EXPECT_EQ(r.plan_report.limit_hit, r.expanded_report.limit_hit);
    derived += r.plan.size() > c.facts.size();
  }
  EXPECT_GT(derived, 50);
}
