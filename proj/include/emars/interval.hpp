#pragma once

#include <string_view>

#include "emars/datavalue.hpp"

// Relations and functions of the Wikidata datatype theory. All functions are
// pure; they throw DatatypeError for operands outside their signature.
namespace emars::dt {

enum class ImpreciseState { precise, imprecise, empty };

/// Throws for the precise datatypes (strings, IRIs, texts).
ImpreciseState iv_state(const DataValue& v);

enum class IntervalRelation { overlaps, disjoint, main_eq, main_neq };

/// Requires the same imprecise datatype and the same unit or globe.
/// EMPTY overlaps nothing and has no main value.
bool iv_relate(IntervalRelation rel, const DataValue& a, const DataValue& b);

/// Smallest value containing the intersection of both ranges, or the EMPTY
/// sentinel when the ranges are disjoint. The main value is an original main
/// lying in the result (the smaller when both do), else the smaller clamped
/// main; the choice is symmetric so intersection commutes.
DataValue iv_intersect(const DataValue& a, const DataValue& b);

/// Smallest range enclosing both; keeps the main value (and timezone,
/// calendar) of the first argument. hull(v, EMPTY) = v.
DataValue iv_hull(const DataValue& a, const DataValue& b);

/// `main` compares main values; `must` quantifies over all pairs of points of
/// the two ranges, `can` over some pair. Ranges are closed.
enum class Flavour { main, must, can };
enum class Order { lt, le, gt, ge };

bool qty_compare(Flavour flavour, Order rel, const QuantityValue& a, const QuantityValue& b);

enum class Direction { north, south, east, west };

/// East and west compare longitudes without wraparound; pairs whose combined
/// longitude span exceeds 180 degrees are rejected.
bool geo_relate(Direction dir, Flavour flavour, const GeoCoordinatesValue& a, const GeoCoordinatesValue& b);

enum class TimeOrder { before, after };

/// `before` is strict.
bool time_compare(Flavour flavour, TimeOrder rel, const TimeValue& a, const TimeValue& b);

/// Part of `a` whose points stand in the (must|can) relation to `b`'s range:
/// can-before keeps points below b.latest, must-before points below
/// b.earliest, and symmetrically for after. EMPTY when nothing remains.
TimeValue time_part(const TimeValue& a, const TimeValue& b, Flavour flavour, TimeOrder rel);

/// could_be_before(a, b) = time_part(a, b, can, before).
inline TimeValue could_be_before(const TimeValue& a, const TimeValue& b) {
  return time_part(a, b, Flavour::can, TimeOrder::before);
}

enum class Extreme { first, last };

/// Componentwise min (first) or max (last) of main, earliest and latest.
TimeValue time_extreme(Extreme which, const TimeValue& a, const TimeValue& b);

enum class StringRelation { lt, le, gt, ge, matches };

/// Code-point lexicographic order. Monolingual texts relate only when their
/// tags match; multilingual texts when they have the same tags and every
/// per-language pair relates. `matches` takes an ECMAScript pattern in `b`.
bool str_relate(StringRelation rel, const DataValue& a, const DataValue& b);

enum class TextFunction { text, lang, text_for_lang };

/// text_for_lang on a missing tag yields the empty string.
StringValue text_extract(TextFunction fn, const DataValue& v, std::string_view lang = {});

}  // namespace emars::dt
