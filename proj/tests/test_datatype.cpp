#include <gtest/gtest.h>

#include <random>

#include "emars/error.hpp"
#include "emars/interval.hpp"
#include "emars/literal.hpp"
#include "emars/theory.hpp"
#include "interval_oracle.hpp"
#include "test_support.hpp"

using namespace emars;
using namespace emars::testing;

namespace {

DataValue mono(const char* text, const char* lang) { return MonolingualTextValue::make(text, lang); }
DataValue str(const char* s) { return StringValue{s}; }

}  // namespace

TEST(Decimal, TotalOrderMatchesDoubles) {
  std::vector<std::string> texts = {"-1000", "-2.5", "-1", "-0.5", "-0.05", "0", "0.05", "0.5", "1", "1.5", "10", "123.456"};
  for (const auto& a : texts) {
    for (const auto& b : texts) {
      const auto got = Decimal::parse(a) <=> Decimal::parse(b);
      const double x = std::stod(a), y = std::stod(b);
      EXPECT_EQ(got < 0, x < y) << a << " " << b;
      EXPECT_EQ(got == 0, x == y) << a << " " << b;
    }
  }
  EXPECT_EQ(Decimal::parse("-0"), Decimal::parse("0.000"));
}

TEST(DvEq, IdentityAndBounds) {
  const DataValue y2005 = years(2005, 2005, 2005);
  EXPECT_TRUE(dv_eq(y2005, y2005));
  const DataValue wide = years(2005, 2000, 2010);
  // Field-by-field: same main, different earliest and latest.
  const auto& w = std::get<TimeValue>(wide);
  const auto& n = std::get<TimeValue>(y2005);
  const bool fields_equal = w.main == n.main && w.earliest == n.earliest && w.latest == n.latest;
  EXPECT_EQ(dv_eq(wide, y2005), fields_equal);
  EXPECT_FALSE(dv_eq(wide, y2005));
  EXPECT_TRUE(dv_neq(wide, y2005));
}

TEST(DvEq, CrossDatatypeIsFalse) {
  EXPECT_FALSE(dv_eq(QuantityValue::make(Decimal(5), Decimal(5), Decimal(5), "Q11573"), str("5")));
}

TEST(DvEq, CanonicalForms) {
  EXPECT_TRUE(dv_eq(mono("chat", "FR"), mono("chat", "fr")));
  EXPECT_TRUE(dv_eq(qty("1.50", "1", "2"), qty("1.5", "1.0", "2")));
  EXPECT_TRUE(dv_eq(QuantityValue::exact(Decimal(3), "http://www.wikidata.org/entity/Q11573"),
                    QuantityValue::exact(Decimal(3), "Q11573")));
}

TEST(DvEq, EquivalenceRelation) {
  std::mt19937 rng(7);
  std::vector<DataValue> vals;
  for (int i = 0; i < 40; ++i) {
    const auto s = oracle::random_span(rng, 0, 6, 2);
    vals.push_back(oracle::time_of(s));
  }
  for (const auto& a : vals) {
    EXPECT_TRUE(dv_eq(a, a));
    for (const auto& b : vals) {
      EXPECT_EQ(dv_eq(a, b), dv_eq(b, a));
      EXPECT_EQ(dv_neq(a, b), !dv_eq(a, b));
      for (const auto& c : vals) {
        if (dv_eq(a, b) && dv_eq(b, c)) EXPECT_TRUE(dv_eq(a, c));
      }
    }
  }
}

TEST(IvState, Examples) {
  EXPECT_EQ(dt::iv_state(QuantityValue::make(Decimal(5), Decimal(5), Decimal(5), "Q11573")),
            dt::ImpreciseState::precise);
  EXPECT_EQ(dt::iv_state(years(2005, 2000, 2010)), dt::ImpreciseState::imprecise);
  EXPECT_EQ(dt::iv_state(TimeValue::empty_value()), dt::ImpreciseState::empty);
  EXPECT_THROW(dt::iv_state(str("x")), DatatypeError);
}

TEST(IvRelate, Examples) {
  EXPECT_TRUE(dt::iv_relate(dt::IntervalRelation::overlaps, years(2005, 2000, 2010), years(2012, 2008, 2020)));
  EXPECT_TRUE(dt::iv_relate(dt::IntervalRelation::disjoint, qty("1", "0", "2", "Q11573"), qty("5", "4", "6", "Q11573")));
  EXPECT_TRUE(dt::iv_relate(dt::IntervalRelation::main_eq, years(2005, 2000, 2010), year(2005)));
}

TEST(IvRelate, Errors) {
  EXPECT_THROW(dt::iv_relate(dt::IntervalRelation::overlaps, qty("1", "0", "2", "Q11573"), qty("1", "0", "2", "Q174728")),
               DatatypeError);
  EXPECT_THROW(dt::iv_relate(dt::IntervalRelation::overlaps, year(2000), qty("1", "0", "2")), DatatypeError);
  EXPECT_THROW(dt::iv_intersect(GeoCoordinatesValue::make(1, 1, 1, "Q2"), GeoCoordinatesValue::make(1, 1, 1, "Q405")),
               DatatypeError);
}

TEST(IvIntersect, Examples) {
  // Ranges [2000, 2010] and [2008, 2020] meet in [2008, 2010]; neither main
  // (2005, 2012) lies there, clamping gives 2008 and 2010, the smaller wins.
  const TimeValue want = TimeValue::make(jan1(2008), jan1(2008), dec31(2010));
  EXPECT_EQ(dt::iv_intersect(years(2005, 2000, 2010), years(2012, 2008, 2020)), DataValue(want));
  const DataValue v = years(2005, 2000, 2010);
  EXPECT_EQ(dt::iv_intersect(v, v), v);
  EXPECT_EQ(dt::iv_intersect(qty("1", "0", "2"), qty("5", "4", "6")), DataValue(QuantityValue::empty_value()));
}

TEST(IvHull, Examples) {
  const auto h = std::get<TimeValue>(dt::iv_hull(years(2000, 2000, 2005), years(2010, 2010, 2020)));
  EXPECT_EQ(h.earliest, jan1(2000));
  EXPECT_EQ(h.latest, dec31(2020));
  const DataValue v = years(2005, 2000, 2010);
  EXPECT_EQ(dt::iv_hull(v, v), v);
  EXPECT_EQ(dt::iv_hull(v, TimeValue::empty_value()), v);
}

TEST(QtyCompare, Examples) {
  using F = dt::Flavour;
  using O = dt::Order;
  const auto a = qty("1", "0", "2"), b = qty("5", "4", "6");
  EXPECT_EQ(dt::qty_compare(F::must, O::lt, a, b), a.upper < b.lower);
  EXPECT_TRUE(dt::qty_compare(F::must, O::lt, a, b));
  const auto c = qty("2", "0", "5");
  EXPECT_TRUE(dt::qty_compare(F::can, O::lt, c, b));
  EXPECT_FALSE(dt::qty_compare(F::must, O::lt, c, b));
  EXPECT_FALSE(dt::qty_compare(F::main, O::lt, qty("5", "5", "5"), qty("5", "4", "6")));
  EXPECT_THROW(dt::qty_compare(F::main, O::lt, qty("5", "5", "5", "Q11573"), qty("5", "5", "5")), DatatypeError);
}

TEST(GeoRelate, Examples) {
  using F = dt::Flavour;
  using D = dt::Direction;
  EXPECT_TRUE(dt::geo_relate(D::north, F::main, GeoCoordinatesValue::make(60, 0, 0), GeoCoordinatesValue::make(50, 0, 0)));
  const auto a = GeoCoordinatesValue::make(60, 0, 1), b = GeoCoordinatesValue::make(50, 0, 1);
  EXPECT_EQ(dt::geo_relate(D::north, F::must, a, b), a.lat_min > b.lat_max);
  EXPECT_TRUE(dt::geo_relate(D::north, F::must, a, b));
  const auto c = GeoCoordinatesValue::make(50, 0, 5), d = GeoCoordinatesValue::make(52, 0, 5);
  EXPECT_TRUE(dt::geo_relate(D::north, F::can, c, d));
  EXPECT_FALSE(dt::geo_relate(D::north, F::must, c, d));
  EXPECT_THROW(dt::geo_relate(D::east, F::main, GeoCoordinatesValue::make(0, -170, 0),
                              GeoCoordinatesValue::make(0, 170, 0)),
               DatatypeError);
  EXPECT_THROW(dt::geo_relate(D::north, F::main, a, GeoCoordinatesValue::make(50, 0, 1, "Q405")), DatatypeError);
}

TEST(TimeCompare, Examples) {
  using F = dt::Flavour;
  using O = dt::TimeOrder;
  const TimeValue a = years(1990, 1990, 1995), b = years(2000, 2000, 2005);
  EXPECT_EQ(dt::time_compare(F::must, O::before, a, b), a.latest < b.earliest);
  EXPECT_TRUE(dt::time_compare(F::must, O::before, a, b));
  const TimeValue c = years(1990, 1990, 2002);
  EXPECT_TRUE(dt::time_compare(F::can, O::before, c, b));
  EXPECT_FALSE(dt::time_compare(F::must, O::before, c, b));
  EXPECT_FALSE(dt::time_compare(F::main, O::after, year(2005), years(2005, 2000, 2010)));
  EXPECT_THROW(dt::time_compare(F::main, O::after, TimeValue::empty_value(), year(2005)), DatatypeError);
}

TEST(TimePart, Examples) {
  using F = dt::Flavour;
  using O = dt::TimeOrder;
  const TimeValue b = years(2000, 2000, 2005);
  const TimeValue cut = dt::time_part(years(1990, 1990, 2010), b, F::can, O::before);
  EXPECT_EQ(cut.earliest, jan1(1990));
  EXPECT_EQ(cut.latest, dec31(2005) - 1);
  EXPECT_TRUE(dt::time_part(years(2010, 2010, 2020), b, F::can, O::before).empty);
  EXPECT_EQ(dt::could_be_before(years(1990, 1990, 2010), b), cut);
  EXPECT_THROW(dt::time_part(TimeValue::empty_value(), b, F::can, O::before), DatatypeError);
}

TEST(TimePart, MustWithinCan) {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const TimeValue a = oracle::time_of(oracle::random_span(rng, 0, 30, 12));
    const TimeValue b = oracle::time_of(oracle::random_span(rng, 0, 30, 12));
    for (auto o : {dt::TimeOrder::before, dt::TimeOrder::after}) {
      const TimeValue m = dt::time_part(a, b, dt::Flavour::must, o);
      const TimeValue c = dt::time_part(a, b, dt::Flavour::can, o);
      if (m.empty) continue;
      ASSERT_FALSE(c.empty);
      EXPECT_LE(c.earliest, m.earliest);
      EXPECT_GE(c.latest, m.latest);
    }
  }
}

TEST(TimeExtreme, Examples) {
  const TimeValue a = years(2005, 2000, 2010), b = years(2012, 2008, 2020);
  EXPECT_EQ(dt::time_extreme(dt::Extreme::first, a, b),
            TimeValue::make(std::min(a.main, b.main), std::min(a.earliest, b.earliest), std::min(a.latest, b.latest)));
  EXPECT_EQ(dt::time_extreme(dt::Extreme::first, a, b), a);
  EXPECT_EQ(dt::time_extreme(dt::Extreme::first, a, a), a);
  EXPECT_EQ(dt::time_extreme(dt::Extreme::last, a, b), b);
}

TEST(StrRelate, Examples) {
  using R = dt::StringRelation;
  EXPECT_TRUE(dt::str_relate(R::lt, str("abc"), str("abd")));
  EXPECT_TRUE(dt::str_relate(R::matches, str("Q42"), str("^Q[0-9]+$")));
  EXPECT_FALSE(dt::str_relate(R::lt, mono("a", "en"), mono("b", "fr")));
  EXPECT_TRUE(dt::str_relate(R::lt, mono("a", "en"), mono("b", "en")));
  EXPECT_THROW(dt::str_relate(R::matches, str("x"), str("(")), DatatypeError);
}

TEST(TextExtract, Examples) {
  using T = dt::TextFunction;
  EXPECT_EQ(dt::text_extract(T::lang, mono("chat", "fr")).text, "fr");
  const DataValue multi = MultilingualTextValue::make({{"en", "cat"}, {"fr", "chat"}});
  EXPECT_EQ(dt::text_extract(T::text_for_lang, multi, "fr").text, "chat");
  EXPECT_EQ(dt::text_extract(T::text_for_lang, MultilingualTextValue::make({{"en", "cat"}}), "de").text, "");
  EXPECT_THROW(dt::text_extract(T::lang, str("x")), DatatypeError);
}

TEST(Theory, EveryRelationHasItsNegation) {
  const auto& th = DatatypeTheory::wikidata();
  for (const std::string& name : th.relation_names()) {
    if (name.rfind("not_", 0) == 0) {
      EXPECT_NE(th.relation(name.substr(4)), nullptr) << name;
    } else {
      EXPECT_NE(th.relation("not_" + name), nullptr) << name;
    }
  }
}

TEST(Theory, NegationIsComplement) {
  const auto& th = DatatypeTheory::wikidata();
  std::mt19937 rng(3);
  for (const char* name : {"overlaps", "before", "must_be_before", "can_be_after", "could_be_before", "lt_main"}) {
    const RelationInfo* r = th.relation(name);
    const RelationInfo* n = th.relation(std::string("not_") + name);
    ASSERT_NE(r, nullptr);
    ASSERT_NE(n, nullptr);
    for (int i = 0; i < 50; ++i) {
      const Term args[] = {DataValue(oracle::time_of(oracle::random_span(rng, 0, 20, 6))),
                           DataValue(oracle::time_of(oracle::random_span(rng, 0, 20, 6)))};
      EXPECT_NE(r->eval(args), n->eval(args)) << name;
    }
  }
}

TEST(Literal, RoundTrip) {
  const DataValue vals[] = {years(2005, 2000, 2010),
                            qty("1.5", "1", "2", "Q11573"),
                            GeoCoordinatesValue::make(52.5, 13.4, 0.1),
                            mono("chat", "fr"),
                            MultilingualTextValue::make({{"en", "cat"}, {"fr", "chat"}}),
                            IriValue{"http://example.org/x"},
                            str("with \"quotes\""),
                            TimeValue::empty_value()};
  for (const DataValue& v : vals) EXPECT_EQ(parse_value(format_value(v)), v) << format_value(v);
}

TEST(Oracle, IntervalFunctionsAndRelations) {
  const OracleTally t = run_interval_oracle(20240601, 400);
  EXPECT_EQ(t.failures, 0u) << t.first_failure;
  EXPECT_GT(t.checks, 10000u);
}
