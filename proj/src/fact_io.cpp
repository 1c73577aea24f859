#include "emars/fact_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "emars/error.hpp"

namespace emars {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw FormatError(what); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "' in " + j.dump());
  return *it;
}

std::string str_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string opt_str(const json& j, const char* key, const std::string& dflt) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : dflt;
}

double num_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

json value_to_json(const DataValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IriValue>) {
          return {{"type", "iri"}, {"value", x.iri}};
        } else if constexpr (std::is_same_v<T, StringValue>) {
          return {{"type", "string"}, {"value", x.text}};
        } else if constexpr (std::is_same_v<T, MonolingualTextValue>) {
          return {{"type", "monolingualtext"}, {"text", x.text}, {"language", x.lang}};
        } else if constexpr (std::is_same_v<T, MultilingualTextValue>) {
          return {{"type", "multilingualtext"}, {"texts", x.texts}};
        } else if constexpr (std::is_same_v<T, QuantityValue>) {
          if (x.empty) return {{"type", "quantity"}, {"empty", true}, {"unit", x.unit}};
          return {{"type", "quantity"},
                  {"amount", x.main.to_string()},
                  {"lower", x.lower.to_string()},
                  {"upper", x.upper.to_string()},
                  {"unit", x.unit}};
        } else if constexpr (std::is_same_v<T, GeoCoordinatesValue>) {
          if (x.empty) return {{"type", "geo"}, {"empty", true}, {"globe", x.globe}};
          return {{"type", "geo"},         {"lat", x.lat},         {"lon", x.lon},
                  {"lat_min", x.lat_min},  {"lat_max", x.lat_max}, {"lon_min", x.lon_min},
                  {"lon_max", x.lon_max},  {"globe", x.globe}};
        } else {
          if (x.empty) return {{"type", "time"}, {"empty", true}};
          json j = {{"type", "time"},
                    {"main", format_timestamp(x.main)},
                    {"earliest", format_timestamp(x.earliest)},
                    {"latest", format_timestamp(x.latest)},
                    {"tz", format_tz(x.tz_minutes)}};
          if (!x.calendar.empty()) j["calendar"] = x.calendar;
          return j;
        }
      },
      v);
}

DataValue value_from_json(const json& j) {
  if (!j.is_object()) bad("data value must be an object: " + j.dump());
  const std::string type = str_field(j, "type");
  const bool empty = j.value("empty", false);
  try {
    if (type == "iri") return IriValue{str_field(j, "value")};
    if (type == "string") return StringValue{str_field(j, "value")};
    if (type == "monolingualtext") return MonolingualTextValue::make(str_field(j, "text"), str_field(j, "language"));
    if (type == "multilingualtext") {
      const json& texts = field(j, "texts");
      if (!texts.is_object()) bad("texts must be an object");
      return MultilingualTextValue::make(texts.get<std::map<std::string, std::string>>());
    }
    if (type == "quantity") {
      const std::string unit = opt_str(j, "unit", "1");
      if (empty) return QuantityValue::empty_value(unit);
      Decimal amount = Decimal::parse(str_field(j, "amount"));
      Decimal lower = j.contains("lower") ? Decimal::parse(str_field(j, "lower")) : amount;
      Decimal upper = j.contains("upper") ? Decimal::parse(str_field(j, "upper")) : amount;
      return QuantityValue::make(amount, lower, upper, unit);
    }
    if (type == "geo") {
      const std::string globe = opt_str(j, "globe", "Q2");
      if (empty) return GeoCoordinatesValue::empty_value(globe);
      const double lat = num_field(j, "lat");
      const double lon = num_field(j, "lon");
      if (j.contains("precision")) return GeoCoordinatesValue::make(lat, lon, num_field(j, "precision"), globe);
      return GeoCoordinatesValue::make_bounds(lat, lon, num_field(j, "lat_min"), num_field(j, "lat_max"),
                                              num_field(j, "lon_min"), num_field(j, "lon_max"), globe);
    }
    if (type == "time") {
      if (empty) return TimeValue::empty_value();
      const Seconds main = parse_timestamp(str_field(j, "main"));
      const Seconds earliest = j.contains("earliest") ? parse_timestamp(str_field(j, "earliest")) : main;
      const Seconds latest = j.contains("latest") ? parse_timestamp(str_field(j, "latest")) : main;
      const int tz = j.contains("tz") ? parse_tz(str_field(j, "tz")) : 0;
      return TimeValue::make(main, earliest, latest, tz, opt_str(j, "calendar", ""));
    }
  } catch (const DatatypeError& e) {
    bad(std::string("invalid ") + type + " value: " + e.what());
  }
  bad("unknown value type '" + type + "'");
}

json term_to_json(const Term& t) {
  if (const auto* e = as_entity(t)) return e->str();
  return value_to_json(std::get<DataValue>(t));
}

Term term_from_json(const json& j) {
  if (j.is_string()) {
    auto e = EntityRef::parse(j.get<std::string>());
    if (!e) bad("not an entity id: " + j.dump());
    return *e;
  }
  return value_from_json(j);
}

json fact_to_json(const Fact& f) {
  json args = json::array();
  for (const Term& t : f.args) args.push_back(term_to_json(t));
  json attrs = json::object();
  for (const auto& [k, vs] : f.attrs) {
    json values = json::array();
    for (const Term& v : vs) values.push_back(term_to_json(v));
    attrs[k.str()] = std::move(values);
  }
  return {{"p", f.predicate.str()}, {"args", std::move(args)}, {"attrs", std::move(attrs)}};
}

Fact fact_from_json(const json& j) {
  if (!j.is_object()) bad("fact record must be an object");
  Fact f;
  auto p = EntityRef::parse(str_field(j, "p"));
  if (!p) bad("invalid predicate in " + j.dump());
  f.predicate = *p;
  const json& args = field(j, "args");
  if (!args.is_array()) bad("args must be an array");
  for (const json& a : args) f.args.push_back(term_from_json(a));
  if (auto it = j.find("attrs"); it != j.end()) {
    if (!it->is_object()) bad("attrs must be an object");
    for (const auto& [key, values] : it->items()) {
      auto attr = EntityRef::parse(key);
      if (!attr) bad("invalid attribute id '" + key + "'");
      if (!values.is_array() || values.empty()) bad("attribute " + key + " needs a non-empty value array");
      auto& set = f.attrs[*attr];
      for (const json& v : values) set.insert(term_from_json(v));
    }
  }
  return f;
}

std::size_t read_facts(std::istream& in, Store& store) {
  std::string line;
  std::size_t n = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      bad("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      store.assert_fact(fact_from_json(j));
    } catch (const StoreError& e) {
      bad("line " + std::to_string(lineno) + ": " + e.what());
    }
    ++n;
  }
  return n;
}

void write_facts(std::ostream& out, const std::vector<Fact>& facts) {
  for (const Fact& f : facts) out << fact_to_json(f).dump() << '\n';
}

void write_snapshot(const Store& store, std::ostream& out) {
  const std::vector<FactId> order = store.canonical_order();
  std::vector<std::size_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  json header = {{"format", kSnapshotFormat},
                 {"version", kSnapshotVersion},
                 {"skolem_counter", store.skolem_counter()},
                 {"closed", store.closed()},
                 {"facts", store.size()}};
  out << header.dump() << '\n';
  for (FactId id : order) {
    json j = fact_to_json(store.fact(id));
    if (!store.is_base(id)) j["derived"] = true;
    out << j.dump() << '\n';
  }
  auto emit = [&](std::size_t i, const Derivation& d, bool founding) {
    json premises = json::array();
    for (FactId p : d.premises) premises.push_back(position[p]);
    json rec = {{"fact", i}, {"rule", d.rule_key}, {"premises", std::move(premises)}};
    if (founding) rec["founding"] = true;
    out << json{{"derivation", std::move(rec)}}.dump() << '\n';
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (const Derivation* f = store.founding(order[i])) emit(i, *f, true);
    for (const Derivation& d : store.derivations(order[i])) emit(i, d, false);
  }
}

Store read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty snapshot");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error&) {
    bad("corrupted snapshot header");
  }
  if (!header.is_object() || header.value("format", "") != kSnapshotFormat) bad("not an emars snapshot");
  if (header.value("version", -1) != kSnapshotVersion) {
    bad("snapshot version mismatch: expected " + std::to_string(kSnapshotVersion) + ", found " +
        header.value("version", json()).dump());
  }
  const std::size_t count = header.value("facts", std::size_t{0});

  Store store;
  std::vector<FactId> ids;
  ids.reserve(count);
  struct Pending {
    std::size_t pos;
    Derivation d;
    bool founding;
  };
  std::vector<Pending> pending;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      bad("snapshot line " + std::to_string(lineno) + ": " + e.what());
    }
    if (auto it = j.find("derivation"); it != j.end()) {
      Derivation d;
      d.rule_key = str_field(*it, "rule");
      for (const json& p : field(*it, "premises")) d.premises.push_back(p.get<FactId>());
      pending.push_back({field(*it, "fact").get<std::size_t>(), std::move(d), it->value("founding", false)});
      continue;
    }
    const bool derived = j.value("derived", false);
    Fact f = fact_from_json(j);
    ids.push_back(derived ? store.assert_derived(std::move(f)).id : store.assert_fact(std::move(f)).id);
  }
  if (ids.size() != count) {
    bad("snapshot declares " + std::to_string(count) + " facts but holds " + std::to_string(ids.size()));
  }
  for (auto& [pos, d, founding] : pending) {
    if (pos >= ids.size()) bad("derivation refers to a missing fact");
    for (FactId& p : d.premises) {
      if (p >= ids.size()) bad("derivation refers to a missing premise");
      p = ids[p];
    }
    if (founding) {
      store.set_founding(ids[pos], std::move(d));
    } else {
      store.add_derivation(ids[pos], std::move(d));
    }
  }
  store.set_skolem_counter(std::max(store.skolem_counter(), header.value("skolem_counter", std::uint64_t{0})));
  store.set_closed(header.value("closed", false));
  return store;
}

void save_snapshot(const Store& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StoreError("cannot write " + path);
  write_snapshot(store, out);
  if (!out) throw StoreError("write failed for " + path);
}

Store load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path);
  return read_snapshot(in);
}

}  // namespace emars
