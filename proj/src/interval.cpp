#include "emars/interval.hpp"

#include <algorithm>
#include <regex>
#include <string>
#include <tuple>

#include "emars/error.hpp"

namespace emars::dt {

namespace {

template <class T>
struct Range {
  T lo;
  T hi;
};

template <class T>
bool overlaps(const Range<T>& a, const Range<T>& b) {
  return !(a.hi < b.lo) && !(b.hi < a.lo);
}

template <class T>
bool ordered(Flavour f, Order o, const T& am, const Range<T>& a, const T& bm, const Range<T>& b) {
  switch (f) {
    case Flavour::main:
      switch (o) {
        case Order::lt: return am < bm;
        case Order::le: return am <= bm;
        case Order::gt: return am > bm;
        case Order::ge: return am >= bm;
      }
      break;
    case Flavour::must:
      switch (o) {
        case Order::lt: return a.hi < b.lo;
        case Order::le: return a.hi <= b.lo;
        case Order::gt: return a.lo > b.hi;
        case Order::ge: return a.lo >= b.hi;
      }
      break;
    case Flavour::can:
      switch (o) {
        case Order::lt: return a.lo < b.hi;
        case Order::le: return a.lo <= b.hi;
        case Order::gt: return a.hi > b.lo;
        case Order::ge: return a.hi >= b.lo;
      }
      break;
  }
  return false;
}

template <class T>
T clamp_to(const T& v, const T& lo, const T& hi) {
  if (v < lo) return lo;
  if (hi < v) return hi;
  return v;
}

// Main value for an intersected range [lo, hi].
template <class T>
T pick_main(const T& am, const T& bm, const T& lo, const T& hi) {
  const bool a_in = !(am < lo) && !(hi < am);
  const bool b_in = !(bm < lo) && !(hi < bm);
  if (a_in && b_in) return std::min(am, bm);
  if (a_in) return am;
  if (b_in) return bm;
  return std::min(clamp_to(am, lo, hi), clamp_to(bm, lo, hi));
}

const char* type_label(const DataValue& v) { return datatype_name(datatype_of(v)).data(); }

void require_same_type(const DataValue& a, const DataValue& b, const char* op) {
  if (a.index() != b.index()) {
    throw DatatypeError(std::string(op) + ": datatype mismatch (" + type_label(a) + " vs " + type_label(b) + ")");
  }
  if (!is_imprecise(datatype_of(a))) {
    throw DatatypeError(std::string(op) + ": " + type_label(a) + " is not an imprecise datatype");
  }
}

void require_unit(const QuantityValue& a, const QuantityValue& b, const char* op) {
  if (a.unit != b.unit) throw DatatypeError(std::string(op) + ": unit mismatch (" + a.unit + " vs " + b.unit + ")");
}

void require_globe(const GeoCoordinatesValue& a, const GeoCoordinatesValue& b, const char* op) {
  if (a.globe != b.globe) {
    throw DatatypeError(std::string(op) + ": globe mismatch (" + a.globe + " vs " + b.globe + ")");
  }
}

void require_nonempty(bool empty, const char* op) {
  if (empty) throw DatatypeError(std::string(op) + ": EMPTY operand");
}

Range<Seconds> range_of(const TimeValue& t) { return {t.earliest, t.latest}; }
Range<Decimal> range_of(const QuantityValue& q) { return {q.lower, q.upper}; }
Range<double> lat_range(const GeoCoordinatesValue& g) { return {g.lat_min, g.lat_max}; }
Range<double> lon_range(const GeoCoordinatesValue& g) { return {g.lon_min, g.lon_max}; }

// Ties in timezone and calendar are broken symmetrically.
std::pair<int, std::string> time_meta_min(const TimeValue& a, const TimeValue& b) {
  auto ka = std::tie(a.tz_minutes, a.calendar);
  auto kb = std::tie(b.tz_minutes, b.calendar);
  return ka <= kb ? std::pair{a.tz_minutes, a.calendar} : std::pair{b.tz_minutes, b.calendar};
}

}  // namespace

ImpreciseState iv_state(const DataValue& v) {
  return std::visit(
      [](const auto& x) -> ImpreciseState {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TimeValue>) {
          if (x.empty) return ImpreciseState::empty;
          return x.earliest == x.main && x.latest == x.main ? ImpreciseState::precise : ImpreciseState::imprecise;
        } else if constexpr (std::is_same_v<T, QuantityValue>) {
          if (x.empty) return ImpreciseState::empty;
          return x.lower == x.main && x.upper == x.main ? ImpreciseState::precise : ImpreciseState::imprecise;
        } else if constexpr (std::is_same_v<T, GeoCoordinatesValue>) {
          if (x.empty) return ImpreciseState::empty;
          const bool exact = x.lat_min == x.lat && x.lat_max == x.lat && x.lon_min == x.lon && x.lon_max == x.lon;
          return exact ? ImpreciseState::precise : ImpreciseState::imprecise;
        } else {
          throw DatatypeError(std::string("precision state undefined for ") + datatype_name(datatype_of(x)).data());
        }
      },
      v);
}

bool iv_relate(IntervalRelation rel, const DataValue& a, const DataValue& b) {
  require_same_type(a, b, "iv_relate");
  bool overlap = false;
  bool main_equal = false;
  if (const auto* ta = std::get_if<TimeValue>(&a)) {
    const auto& tb = std::get<TimeValue>(b);
    if (!ta->empty && !tb.empty) {
      overlap = overlaps(range_of(*ta), range_of(tb));
      main_equal = ta->main == tb.main;
    }
  } else if (const auto* qa = std::get_if<QuantityValue>(&a)) {
    const auto& qb = std::get<QuantityValue>(b);
    require_unit(*qa, qb, "iv_relate");
    if (!qa->empty && !qb.empty) {
      overlap = overlaps(range_of(*qa), range_of(qb));
      main_equal = qa->main == qb.main;
    }
  } else {
    const auto& ga = std::get<GeoCoordinatesValue>(a);
    const auto& gb = std::get<GeoCoordinatesValue>(b);
    require_globe(ga, gb, "iv_relate");
    if (!ga.empty && !gb.empty) {
      overlap = overlaps(lat_range(ga), lat_range(gb)) && overlaps(lon_range(ga), lon_range(gb));
      main_equal = ga.lat == gb.lat && ga.lon == gb.lon;
    }
  }
  switch (rel) {
    case IntervalRelation::overlaps: return overlap;
    case IntervalRelation::disjoint: return !overlap;
    case IntervalRelation::main_eq: return main_equal;
    case IntervalRelation::main_neq: return !main_equal;
  }
  return false;
}

DataValue iv_intersect(const DataValue& a, const DataValue& b) {
  require_same_type(a, b, "iv_intersect");
  if (const auto* ta = std::get_if<TimeValue>(&a)) {
    const auto& tb = std::get<TimeValue>(b);
    if (ta->empty || tb.empty || !overlaps(range_of(*ta), range_of(tb))) return TimeValue::empty_value();
    const Seconds lo = std::max(ta->earliest, tb.earliest);
    const Seconds hi = std::min(ta->latest, tb.latest);
    auto [tz, cal] = time_meta_min(*ta, tb);
    return TimeValue::make(pick_main(ta->main, tb.main, lo, hi), lo, hi, tz, cal);
  }
  if (const auto* qa = std::get_if<QuantityValue>(&a)) {
    const auto& qb = std::get<QuantityValue>(b);
    require_unit(*qa, qb, "iv_intersect");
    if (qa->empty || qb.empty || !overlaps(range_of(*qa), range_of(qb))) return QuantityValue::empty_value(qa->unit);
    Decimal lo = std::max(qa->lower, qb.lower);
    Decimal hi = std::min(qa->upper, qb.upper);
    Decimal main = pick_main(qa->main, qb.main, lo, hi);
    return QuantityValue::make(std::move(main), std::move(lo), std::move(hi), qa->unit);
  }
  const auto& ga = std::get<GeoCoordinatesValue>(a);
  const auto& gb = std::get<GeoCoordinatesValue>(b);
  require_globe(ga, gb, "iv_intersect");
  if (ga.empty || gb.empty || !overlaps(lat_range(ga), lat_range(gb)) || !overlaps(lon_range(ga), lon_range(gb))) {
    return GeoCoordinatesValue::empty_value(ga.globe);
  }
  const double lat_lo = std::max(ga.lat_min, gb.lat_min);
  const double lat_hi = std::min(ga.lat_max, gb.lat_max);
  const double lon_lo = std::max(ga.lon_min, gb.lon_min);
  const double lon_hi = std::min(ga.lon_max, gb.lon_max);
  return GeoCoordinatesValue::make_bounds(pick_main(ga.lat, gb.lat, lat_lo, lat_hi),
                                          pick_main(ga.lon, gb.lon, lon_lo, lon_hi), lat_lo, lat_hi, lon_lo, lon_hi,
                                          ga.globe);
}

DataValue iv_hull(const DataValue& a, const DataValue& b) {
  require_same_type(a, b, "iv_hull");
  if (const auto* ta = std::get_if<TimeValue>(&a)) {
    const auto& tb = std::get<TimeValue>(b);
    if (ta->empty) return tb;
    if (tb.empty) return *ta;
    return TimeValue::make(ta->main, std::min(ta->earliest, tb.earliest), std::max(ta->latest, tb.latest),
                           ta->tz_minutes, ta->calendar);
  }
  if (const auto* qa = std::get_if<QuantityValue>(&a)) {
    const auto& qb = std::get<QuantityValue>(b);
    require_unit(*qa, qb, "iv_hull");
    if (qa->empty) return qb;
    if (qb.empty) return *qa;
    return QuantityValue::make(qa->main, std::min(qa->lower, qb.lower), std::max(qa->upper, qb.upper), qa->unit);
  }
  const auto& ga = std::get<GeoCoordinatesValue>(a);
  const auto& gb = std::get<GeoCoordinatesValue>(b);
  require_globe(ga, gb, "iv_hull");
  if (ga.empty) return gb;
  if (gb.empty) return ga;
  return GeoCoordinatesValue::make_bounds(ga.lat, ga.lon, std::min(ga.lat_min, gb.lat_min),
                                          std::max(ga.lat_max, gb.lat_max), std::min(ga.lon_min, gb.lon_min),
                                          std::max(ga.lon_max, gb.lon_max), ga.globe);
}

bool qty_compare(Flavour flavour, Order rel, const QuantityValue& a, const QuantityValue& b) {
  require_unit(a, b, "qty_compare");
  require_nonempty(a.empty || b.empty, "qty_compare");
  return ordered(flavour, rel, a.main, range_of(a), b.main, range_of(b));
}

bool geo_relate(Direction dir, Flavour flavour, const GeoCoordinatesValue& a, const GeoCoordinatesValue& b) {
  require_globe(a, b, "geo_relate");
  require_nonempty(a.empty || b.empty, "geo_relate");
  switch (dir) {
    case Direction::north:
      return ordered(flavour, Order::gt, a.lat, lat_range(a), b.lat, lat_range(b));
    case Direction::south:
      return ordered(flavour, Order::lt, a.lat, lat_range(a), b.lat, lat_range(b));
    case Direction::east:
    case Direction::west: {
      const double span = std::max({a.lon, a.lon_max, b.lon, b.lon_max}) - std::min({a.lon, a.lon_min, b.lon, b.lon_min});
      if (span > 180) throw DatatypeError("geo_relate: east/west across the antimeridian is undefined");
      const Order o = dir == Direction::east ? Order::gt : Order::lt;
      return ordered(flavour, o, a.lon, lon_range(a), b.lon, lon_range(b));
    }
  }
  return false;
}

bool time_compare(Flavour flavour, TimeOrder rel, const TimeValue& a, const TimeValue& b) {
  require_nonempty(a.empty || b.empty, "time_compare");
  const Order o = rel == TimeOrder::before ? Order::lt : Order::gt;
  return ordered(flavour, o, a.main, range_of(a), b.main, range_of(b));
}

TimeValue time_part(const TimeValue& a, const TimeValue& b, Flavour flavour, TimeOrder rel) {
  require_nonempty(a.empty || b.empty, "time_part");
  if (flavour == Flavour::main) throw DatatypeError("time_part: flavour must be must or can");
  Seconds lo = a.earliest;
  Seconds hi = a.latest;
  if (rel == TimeOrder::before) {
    const Seconds bound = flavour == Flavour::can ? b.latest : b.earliest;
    hi = std::min(hi, bound - 1);
  } else {
    const Seconds bound = flavour == Flavour::can ? b.earliest : b.latest;
    lo = std::max(lo, bound + 1);
  }
  if (lo > hi) return TimeValue::empty_value();
  return TimeValue::make(clamp_to(a.main, lo, hi), lo, hi, a.tz_minutes, a.calendar);
}

TimeValue time_extreme(Extreme which, const TimeValue& a, const TimeValue& b) {
  require_nonempty(a.empty || b.empty, "time_extreme");
  auto [tz, cal] = time_meta_min(a, b);
  if (which == Extreme::first) {
    return TimeValue::make(std::min(a.main, b.main), std::min(a.earliest, b.earliest), std::min(a.latest, b.latest),
                           tz, cal);
  }
  return TimeValue::make(std::max(a.main, b.main), std::max(a.earliest, b.earliest), std::max(a.latest, b.latest), tz,
                         cal);
}

namespace {

bool text_ordered(StringRelation rel, const std::string& a, const std::string& b) {
  switch (rel) {
    case StringRelation::lt: return a < b;
    case StringRelation::le: return a <= b;
    case StringRelation::gt: return a > b;
    case StringRelation::ge: return a >= b;
    case StringRelation::matches: break;
  }
  return false;
}

bool is_stringlike(const DataValue& v) {
  return std::holds_alternative<StringValue>(v) || std::holds_alternative<MonolingualTextValue>(v) ||
         std::holds_alternative<MultilingualTextValue>(v);
}

}  // namespace

bool str_relate(StringRelation rel, const DataValue& a, const DataValue& b) {
  if (!is_stringlike(a) || !is_stringlike(b)) {
    throw DatatypeError(std::string("string relation on ") + type_label(a) + " and " + type_label(b));
  }
  if (rel == StringRelation::matches) {
    const auto* pattern = std::get_if<StringValue>(&b);
    if (pattern == nullptr) throw DatatypeError("matches: pattern must be a StringValue");
    std::regex re;
    try {
      re = std::regex(pattern->text, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw DatatypeError("matches: invalid pattern '" + pattern->text + "': " + e.what());
    }
    if (const auto* s = std::get_if<StringValue>(&a)) return std::regex_search(s->text, re);
    if (const auto* m = std::get_if<MonolingualTextValue>(&a)) return std::regex_search(m->text, re);
    const auto& multi = std::get<MultilingualTextValue>(a);
    return std::all_of(multi.texts.begin(), multi.texts.end(),
                       [&](const auto& kv) { return std::regex_search(kv.second, re); });
  }
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<StringValue>(&a)) return text_ordered(rel, s->text, std::get<StringValue>(b).text);
  if (const auto* m = std::get_if<MonolingualTextValue>(&a)) {
    const auto& mb = std::get<MonolingualTextValue>(b);
    return m->lang == mb.lang && text_ordered(rel, m->text, mb.text);
  }
  const auto& ma = std::get<MultilingualTextValue>(a);
  const auto& mb = std::get<MultilingualTextValue>(b);
  if (ma.texts.size() != mb.texts.size()) return false;
  for (auto ia = ma.texts.begin(), ib = mb.texts.begin(); ia != ma.texts.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !text_ordered(rel, ia->second, ib->second)) return false;
  }
  return true;
}

StringValue text_extract(TextFunction fn, const DataValue& v, std::string_view lang) {
  switch (fn) {
    case TextFunction::text:
      if (const auto* m = std::get_if<MonolingualTextValue>(&v)) return StringValue{m->text};
      break;
    case TextFunction::lang:
      if (const auto* m = std::get_if<MonolingualTextValue>(&v)) return StringValue{m->lang};
      break;
    case TextFunction::text_for_lang:
      if (const auto* m = std::get_if<MultilingualTextValue>(&v)) {
        auto it = m->texts.find(canonical_lang_tag(lang));
        return StringValue{it == m->texts.end() ? std::string() : it->second};
      }
      break;
  }
  throw DatatypeError(std::string("text function not defined on ") + type_label(v));
}

}  // namespace emars::dt
