#include "emars/datavalue.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <functional>

#include "emars/error.hpp"

namespace emars {

namespace {

constexpr std::string_view kEntityPrefix = "http://www.wikidata.org/entity/";

double canonical_double(double v, const char* what) {
  if (std::isnan(v)) throw DatatypeError(std::string("NaN ") + what);
  return v + 0.0;  // folds -0.0 into 0.0
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_double(double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return std::hash<std::uint64_t>{}(bits);
}

}  // namespace

std::string_view datatype_name(Datatype d) {
  switch (d) {
    case Datatype::iri: return "IriValue";
    case Datatype::string: return "StringValue";
    case Datatype::monolingual_text: return "MonolingualTextValue";
    case Datatype::multilingual_text: return "MultilingualTextValue";
    case Datatype::quantity: return "QuantityValue";
    case Datatype::geo_coordinates: return "GeoCoordinatesValue";
    case Datatype::time: return "TimeValue";
  }
  return "?";
}

std::optional<Datatype> datatype_from_name(std::string_view name) {
  for (Datatype d : kAllDatatypes) {
    if (datatype_name(d) == name) return d;
  }
  return std::nullopt;
}

bool is_imprecise(Datatype d) {
  return d == Datatype::quantity || d == Datatype::geo_coordinates || d == Datatype::time;
}

std::string canonical_entity_id(std::string_view id) {
  if (id.starts_with(kEntityPrefix)) id.remove_prefix(kEntityPrefix.size());
  return std::string(id);
}

std::string canonical_lang_tag(std::string_view tag) {
  std::string out;
  out.reserve(tag.size());
  for (char c : tag) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') {
      throw DatatypeError("invalid language tag '" + std::string(tag) + "'");
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (out.empty()) throw DatatypeError("empty language tag");
  return out;
}

MonolingualTextValue MonolingualTextValue::make(std::string text, std::string_view lang) {
  return MonolingualTextValue{std::move(text), canonical_lang_tag(lang)};
}

MultilingualTextValue MultilingualTextValue::make(const std::map<std::string, std::string>& texts) {
  MultilingualTextValue v;
  for (const auto& [tag, text] : texts) {
    auto [it, inserted] = v.texts.emplace(canonical_lang_tag(tag), text);
    if (!inserted) throw DatatypeError("duplicate language tag '" + it->first + "'");
  }
  return v;
}

QuantityValue QuantityValue::make(Decimal main, Decimal lower, Decimal upper, std::string_view unit) {
  if (upper < lower) std::swap(lower, upper);
  if (main < lower || main > upper) {
    throw DatatypeError("quantity amount " + main.to_string() + " outside bounds [" + lower.to_string() + ", " +
                        upper.to_string() + "]");
  }
  QuantityValue q;
  q.main = std::move(main);
  q.lower = std::move(lower);
  q.upper = std::move(upper);
  q.unit = canonical_entity_id(unit);
  if (q.unit.empty()) q.unit = "1";
  return q;
}

QuantityValue QuantityValue::exact(Decimal main, std::string_view unit) { return make(main, main, main, unit); }

QuantityValue QuantityValue::empty_value(std::string_view unit) {
  QuantityValue q;
  q.empty = true;
  q.unit = canonical_entity_id(unit);
  if (q.unit.empty()) q.unit = "1";
  return q;
}

GeoCoordinatesValue GeoCoordinatesValue::make(double lat, double lon, double precision, std::string_view globe) {
  precision = canonical_double(precision, "precision");
  if (precision < 0) throw DatatypeError("negative coordinate precision");
  lat = canonical_double(lat, "latitude");
  lon = canonical_double(lon, "longitude");
  return make_bounds(lat, lon, std::max(-90.0, lat - precision), std::min(90.0, lat + precision),
                     std::max(-180.0, lon - precision), std::min(180.0, lon + precision), globe);
}

GeoCoordinatesValue GeoCoordinatesValue::make_bounds(double lat, double lon, double lat_min, double lat_max,
                                                     double lon_min, double lon_max, std::string_view globe) {
  GeoCoordinatesValue g;
  g.lat = canonical_double(lat, "latitude");
  g.lon = canonical_double(lon, "longitude");
  g.lat_min = canonical_double(lat_min, "latitude");
  g.lat_max = canonical_double(lat_max, "latitude");
  g.lon_min = canonical_double(lon_min, "longitude");
  g.lon_max = canonical_double(lon_max, "longitude");
  if (g.lat < -90 || g.lat > 90) throw DatatypeError("latitude out of range");
  if (g.lon <= -180 || g.lon > 180) {
    if (g.lon == -180) {
      g.lon = 180;
    } else {
      throw DatatypeError("longitude out of range");
    }
  }
  if (g.lat_min > g.lat_max) std::swap(g.lat_min, g.lat_max);
  if (g.lon_min > g.lon_max) std::swap(g.lon_min, g.lon_max);
  if (g.lat < g.lat_min || g.lat > g.lat_max || g.lon < g.lon_min || g.lon > g.lon_max) {
    throw DatatypeError("coordinate outside its own bounds");
  }
  g.globe = canonical_entity_id(globe);
  return g;
}

GeoCoordinatesValue GeoCoordinatesValue::empty_value(std::string_view globe) {
  GeoCoordinatesValue g;
  g.empty = true;
  g.globe = canonical_entity_id(globe);
  return g;
}

TimeValue TimeValue::make(Seconds main, Seconds earliest, Seconds latest, int tz_minutes, std::string_view calendar) {
  if (latest < earliest) std::swap(earliest, latest);
  if (main < earliest || main > latest) {
    throw DatatypeError("time " + format_timestamp(main) + " outside bounds [" + format_timestamp(earliest) + ", " +
                        format_timestamp(latest) + "]");
  }
  TimeValue t;
  t.main = main;
  t.earliest = earliest;
  t.latest = latest;
  t.tz_minutes = tz_minutes;
  t.calendar = canonical_entity_id(calendar);
  return t;
}

TimeValue TimeValue::exact(Seconds main) { return make(main, main, main); }

TimeValue TimeValue::empty_value() {
  TimeValue t;
  t.empty = true;
  return t;
}

Datatype datatype_of(const DataValue& v) { return static_cast<Datatype>(v.index()); }

bool dv_eq(const DataValue& a, const DataValue& b) { return a == b; }

std::size_t hash_value(const DataValue& v) {
  std::size_t h = std::hash<std::size_t>{}(v.index());
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        std::hash<std::string> hs;
        if constexpr (std::is_same_v<T, IriValue>) {
          h = mix(h, hs(x.iri));
        } else if constexpr (std::is_same_v<T, StringValue>) {
          h = mix(h, hs(x.text));
        } else if constexpr (std::is_same_v<T, MonolingualTextValue>) {
          h = mix(mix(h, hs(x.text)), hs(x.lang));
        } else if constexpr (std::is_same_v<T, MultilingualTextValue>) {
          for (const auto& [k, t] : x.texts) h = mix(mix(h, hs(k)), hs(t));
        } else if constexpr (std::is_same_v<T, QuantityValue>) {
          h = mix(h, x.empty);
          h = mix(mix(mix(mix(h, x.main.hash()), x.lower.hash()), x.upper.hash()), hs(x.unit));
        } else if constexpr (std::is_same_v<T, GeoCoordinatesValue>) {
          h = mix(h, x.empty);
          for (double d : {x.lat, x.lon, x.lat_min, x.lat_max, x.lon_min, x.lon_max}) h = mix(h, hash_double(d));
          h = mix(h, hs(x.globe));
        } else if constexpr (std::is_same_v<T, TimeValue>) {
          std::hash<std::int64_t> hi;
          h = mix(h, x.empty);
          h = mix(mix(mix(mix(h, hi(x.main)), hi(x.earliest)), hi(x.latest)), hi(x.tz_minutes));
          h = mix(h, hs(x.calendar));
        }
      },
      v);
  return h;
}

}  // namespace emars
