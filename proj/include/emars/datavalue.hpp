#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "emars/decimal.hpp"
#include "emars/timeline.hpp"

namespace emars {

/// The seven Wikidata value datatypes. Order matches the DataValue variant.
enum class Datatype { iri, string, monolingual_text, multilingual_text, quantity, geo_coordinates, time };

inline constexpr Datatype kAllDatatypes[] = {Datatype::iri,      Datatype::string,          Datatype::monolingual_text,
                                             Datatype::multilingual_text, Datatype::quantity, Datatype::geo_coordinates,
                                             Datatype::time};

/// Name of the datatype's unary predicate, e.g. "TimeValue".
std::string_view datatype_name(Datatype d);
std::optional<Datatype> datatype_from_name(std::string_view name);
bool is_imprecise(Datatype d);

struct IriValue {
  std::string iri;
  auto operator<=>(const IriValue&) const = default;
};

struct StringValue {
  std::string text;
  auto operator<=>(const StringValue&) const = default;
};

struct MonolingualTextValue {
  std::string text;
  std::string lang;  // lowercase

  static MonolingualTextValue make(std::string text, std::string_view lang);
  auto operator<=>(const MonolingualTextValue&) const = default;
};

struct MultilingualTextValue {
  std::map<std::string, std::string> texts;  // lowercase tag -> text

  static MultilingualTextValue make(const std::map<std::string, std::string>& texts);
  auto operator<=>(const MultilingualTextValue&) const = default;
};

/// Quantity with explicit closed bounds [lower, upper] around the main amount.
struct QuantityValue {
  bool empty = false;
  Decimal main;
  Decimal lower;
  Decimal upper;
  std::string unit = "1";  // entity id of the unit, "1" for dimensionless

  static QuantityValue make(Decimal main, Decimal lower, Decimal upper, std::string_view unit = "1");
  static QuantityValue exact(Decimal main, std::string_view unit = "1");
  static QuantityValue empty_value(std::string_view unit = "1");

  auto operator<=>(const QuantityValue&) const = default;
};

/// Point with a rectangle of possible positions. Bounds are stored explicitly
/// so intersections and hulls stay exact.
struct GeoCoordinatesValue {
  bool empty = false;
  double lat = 0;
  double lon = 0;
  double lat_min = 0;
  double lat_max = 0;
  double lon_min = 0;
  double lon_max = 0;
  std::string globe = "Q2";

  /// Rectangle [lat +- precision] x [lon +- precision], clipped to the valid ranges.
  static GeoCoordinatesValue make(double lat, double lon, double precision, std::string_view globe = "Q2");
  static GeoCoordinatesValue make_bounds(double lat, double lon, double lat_min, double lat_max, double lon_min,
                                         double lon_max, std::string_view globe = "Q2");
  static GeoCoordinatesValue empty_value(std::string_view globe = "Q2");

  auto operator<=>(const GeoCoordinatesValue&) const = default;
};

/// Point in time with explicit closed bounds on the proleptic Gregorian timeline.
struct TimeValue {
  bool empty = false;
  Seconds main = 0;
  Seconds earliest = 0;
  Seconds latest = 0;
  int tz_minutes = 0;
  std::string calendar;  // entity id, e.g. "Q1985727"; stored, never converted

  static TimeValue make(Seconds main, Seconds earliest, Seconds latest, int tz_minutes = 0,
                        std::string_view calendar = "");
  static TimeValue exact(Seconds main);
  static TimeValue empty_value();

  auto operator<=>(const TimeValue&) const = default;
};

using DataValue = std::variant<IriValue, StringValue, MonolingualTextValue, MultilingualTextValue, QuantityValue,
                               GeoCoordinatesValue, TimeValue>;

Datatype datatype_of(const DataValue& v);

/// Equality taking all aspects into account; values are canonical on
/// construction so this is structural. Cross-datatype pairs compare unequal.
bool dv_eq(const DataValue& a, const DataValue& b);
inline bool dv_neq(const DataValue& a, const DataValue& b) { return !dv_eq(a, b); }

std::size_t hash_value(const DataValue& v);

/// Strips the Wikidata entity IRI prefix from unit, globe and calendar ids.
std::string canonical_entity_id(std::string_view id);

/// Lowercases a language tag; throws DatatypeError on characters outside
/// [A-Za-z0-9-].
std::string canonical_lang_tag(std::string_view tag);

}  // namespace emars
