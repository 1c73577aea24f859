#include "emars/wikidata.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "emars/error.hpp"
#include "emars/parser.hpp"

namespace emars::wikidata {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw FormatError(msg); }

const json& member(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing '") + key + "'");
  return *it;
}

std::string str_member(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Seconds year_start(std::int64_t year) { return to_seconds({year, 1, 1, 0, 0, 0}); }

Seconds month_start(std::int64_t year, std::int64_t month0) {
  // month0 counts months from year 0, January
  const std::int64_t y = year + floor_div(month0, 12);
  const int m = static_cast<int>(month0 - floor_div(month0, 12) * 12) + 1;
  return to_seconds({y, m, 1, 0, 0, 0});
}

std::int64_t year_span(int precision) {
  switch (precision) {
    case 9: return 1;
    case 8: return 10;
    case 7: return 100;
    case 6: return 1000;
    default: break;
  }
  std::int64_t n = 1;
  for (int i = 0; i < 9 - precision; ++i) n *= 10;
  return n;
}

Datatype registry_datatype(const std::string& name, bool& skip) {
  skip = false;
  if (auto d = datatype_from_name(name)) return *d;
  static const std::map<std::string, Datatype> kWikibase = {
      {"time", Datatype::time},
      {"quantity", Datatype::quantity},
      {"globe-coordinate", Datatype::geo_coordinates},
      {"globecoordinate", Datatype::geo_coordinates},
      {"string", Datatype::string},
      {"external-id", Datatype::string},
      {"commonsMedia", Datatype::string},
      {"math", Datatype::string},
      {"musical-notation", Datatype::string},
      {"tabular-data", Datatype::string},
      {"geo-shape", Datatype::string},
      {"url", Datatype::iri},
      {"monolingualtext", Datatype::monolingual_text},
  };
  if (auto it = kWikibase.find(name); it != kWikibase.end()) return it->second;
  static const std::set<std::string> kEntity = {"wikibase-item", "wikibase-property", "wikibase-lexeme",
                                                "wikibase-form", "wikibase-sense"};
  if (kEntity.count(name)) {
    skip = true;
    return Datatype::string;
  }
  throw DatatypeError("unknown datatype name '" + name + "'");
}

}  // namespace

PropertyRegistry registry_from_json(const json& j) {
  if (!j.is_object()) bad("property registry must be a JSON object");
  PropertyRegistry reg;
  for (const auto& [key, value] : j.items()) {
    auto p = EntityRef::parse(key);
    if (!p || p->kind != EntityRef::Kind::property) bad("registry key '" + key + "' is not a property id");
    if (!value.is_string()) bad("registry value for " + key + " must be a string");
    bool skip = false;
    const Datatype d = registry_datatype(value.get<std::string>(), skip);
    if (!skip) reg[*p] = d;
  }
  return reg;
}

PropertyRegistry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return registry_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

json IngestReport::to_json() const {
  return {{"documents", documents},
          {"statements", statements},
          {"facts_emitted", facts_emitted},
          {"skolems_created", skolems_created},
          {"novalue_skipped", novalue_skipped},
          {"novalue_qualifiers_skipped", novalue_qualifiers_skipped},
          {"deprecated_skipped", deprecated_skipped},
          {"deprecated_kept", deprecated_kept},
          {"references_ignored", references_ignored},
          {"malformed_snaks", malformed_snaks},
          {"skips", skips}};
}

std::vector<json> read_entity_documents(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  auto unpack = [](json j, std::vector<json>& out) {
    if (j.is_array()) {
      for (json& d : j) out.push_back(std::move(d));
    } else if (j.is_object() && j.contains("entities") && j["entities"].is_object()) {
      for (auto& [id, d] : j["entities"].items()) out.push_back(std::move(d));
    } else if (j.is_object()) {
      out.push_back(std::move(j));
    } else {
      bad("entity input must hold objects");
    }
  };

  std::vector<json> out;
  try {
    unpack(json::parse(text), out);
    return out;
  } catch (const json::parse_error&) {
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    while (!line.empty() && (std::isspace(static_cast<unsigned char>(line.back())) || line.back() == ',')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line == "[" || line == "]") continue;
    try {
      unpack(json::parse(line.substr(start)), out);
    } catch (const json::parse_error& e) {
      bad("entity input line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

TimeValue convert_time(const std::string& timestamp, int precision, std::int64_t before, std::int64_t after,
                       int tz_minutes, const std::string& calendar) {
  if (precision < 0 || precision > 14) throw DatatypeError("time precision " + std::to_string(precision) + " out of range");
  const CivilTime c = parse_civil(timestamp);
  const Seconds main = to_seconds(c);
  Seconds lo = 0;
  Seconds hi = 0;
  if (precision >= 11) {
    static constexpr Seconds kUnit[] = {86400, 3600, 60, 1};
    const Seconds unit = kUnit[precision - 11];
    lo = floor_div(main, unit) * unit - before * unit;
    hi = floor_div(main, unit) * unit + unit - 1 + after * unit;
  } else if (precision == 10) {
    const std::int64_t m0 = c.year * 12 + (c.month - 1);
    lo = month_start(0, m0 - before);
    hi = month_start(0, m0 + 1 + after) - 1;
  } else {
    const std::int64_t span = year_span(precision);
    const std::int64_t first = floor_div(c.year, span) * span;
    lo = year_start(first - before * span);
    hi = year_start(first + span + after * span) - 1;
  }
  return TimeValue::make(std::clamp(main, lo, hi), lo, hi, tz_minutes, calendar);
}

Term convert_datavalue(const json& dv, const std::string& snak_datatype) {
  const std::string type = str_member(dv, "type");
  const json& v = member(dv, "value");
  if (type == "wikibase-entityid") {
    std::string id;
    if (v.contains("id")) {
      id = str_member(v, "id");
    } else {
      const std::string et = str_member(v, "entity-type");
      const auto num = member(v, "numeric-id").get<std::int64_t>();
      id = (et == "property" ? "P" : "Q") + std::to_string(num);
    }
    auto e = EntityRef::parse(id);
    if (!e || (e->kind != EntityRef::Kind::item && e->kind != EntityRef::Kind::property)) {
      bad("unsupported entity id '" + id + "'");
    }
    return *e;
  }
  if (type == "string") {
    if (!v.is_string()) bad("string datavalue must hold a string");
    if (snak_datatype == "url") return DataValue(IriValue{v.get<std::string>()});
    return DataValue(StringValue{v.get<std::string>()});
  }
  if (type == "monolingualtext") {
    return DataValue(MonolingualTextValue::make(str_member(v, "text"), str_member(v, "language")));
  }
  if (type == "quantity") {
    const Decimal amount = Decimal::parse(str_member(v, "amount"));
    const Decimal lower = v.contains("lowerBound") ? Decimal::parse(str_member(v, "lowerBound")) : amount;
    const Decimal upper = v.contains("upperBound") ? Decimal::parse(str_member(v, "upperBound")) : amount;
    const std::string unit = v.contains("unit") ? str_member(v, "unit") : "1";
    return DataValue(QuantityValue::make(amount, lower, upper, unit));
  }
  if (type == "globecoordinate") {
    const double lat = member(v, "latitude").get<double>();
    const double lon = member(v, "longitude").get<double>();
    const json& p = v.contains("precision") ? v["precision"] : json();
    const double precision = p.is_number() ? p.get<double>() : 0.0;
    const std::string globe = v.contains("globe") ? str_member(v, "globe") : "Q2";
    return DataValue(GeoCoordinatesValue::make(lat, lon, precision, globe));
  }
  if (type == "time") {
    const int precision = member(v, "precision").get<int>();
    const std::int64_t before = v.value("before", std::int64_t{0});
    const std::int64_t after = v.value("after", std::int64_t{0});
    const int tz = v.value("timezone", 0);
    const std::string cal = v.contains("calendarmodel") ? str_member(v, "calendarmodel") : "";
    return DataValue(convert_time(str_member(v, "time"), precision, before, after, tz, cal));
  }
  bad("unsupported datavalue type '" + type + "'");
}

namespace {

struct Ingester {
  Store& store;
  const IngestOptions& options;
  IngestReport& report;

  // Value of a snak, or nullopt for novalue. Throws on malformed snaks.
  std::optional<Term> snak_value(const json& snak, const EntityRef& property, std::size_t& skolems) {
    const std::string kind = str_member(snak, "snaktype");
    if (kind == "novalue") return std::nullopt;
    if (kind == "somevalue") {
      ++skolems;
      return store.fresh_skolem();
    }
    if (kind != "value") bad("unknown snaktype '" + kind + "'");
    Term t = convert_datavalue(member(snak, "datavalue"), snak.value("datatype", ""));
    if (options.registry) {
      auto it = options.registry->find(property);
      if (it != options.registry->end()) {
        const DataValue* dv = as_value(t);
        if (dv == nullptr || datatype_of(*dv) != it->second) {
          bad("value of " + property.str() + " is not a " + std::string(datatype_name(it->second)));
        }
      }
    }
    return t;
  }

  void statement(const EntityRef& subject, const EntityRef& property, const json& st) {
    ++report.statements;
    const std::string id = st.value("id", "");
    auto skip = [&](const char* kind, const std::string& reason) {
      json rec = {{"kind", kind}, {"subject", subject.str()}, {"property", property.str()}, {"statement", id}};
      if (!reason.empty()) rec["reason"] = reason;
      report.skips.push_back(std::move(rec));
    };
    if (auto it = st.find("references"); it != st.end() && it->is_array()) report.references_ignored += it->size();

    const std::string rank = st.value("rank", "normal");
    if (rank == "deprecated" && !options.keep_deprecated) {
      ++report.deprecated_skipped;
      skip("deprecated", "");
      return;
    }

    // Convert everything before minting skolems so a malformed statement
    // leaves the store untouched.
    const std::uint64_t counter = store.skolem_counter();
    std::size_t skolems = 0;
    Fact f;
    try {
      if (rank != "normal" && rank != "preferred" && rank != "deprecated") bad("unknown rank '" + rank + "'");
      const json& mainsnak = member(st, "mainsnak");
      if (mainsnak.contains("property") && str_member(mainsnak, "property") != property.id) {
        bad("mainsnak property differs from its claim group");
      }
      auto object = snak_value(mainsnak, property, skolems);
      if (!object) {
        ++report.novalue_skipped;
        skip("novalue", "");
        return;
      }
      f.predicate = property;
      f.args = {subject, *object};
      std::size_t novalue_qualifiers = 0;
      if (auto q = st.find("qualifiers"); q != st.end()) {
        if (!q->is_object()) bad("qualifiers must be an object");
        for (const auto& [pid, snaks] : q->items()) {
          auto attr = EntityRef::parse(pid);
          if (!attr || attr->kind != EntityRef::Kind::property) bad("qualifier key '" + pid + "' is not a property id");
          if (!snaks.is_array()) bad("qualifier snaks must be an array");
          for (const json& snak : snaks) {
            auto value = snak_value(snak, *attr, skolems);
            if (value) {
              f.attrs[*attr].insert(std::move(*value));
            } else {
              ++novalue_qualifiers;
            }
          }
        }
      }
      report.novalue_qualifiers_skipped += novalue_qualifiers;
      f.attrs[kRank].insert(rank == "preferred" ? kPreferred : rank == "normal" ? kNormal : kDeprecated);
    } catch (const std::exception& e) {
      store.set_skolem_counter(counter);
      ++report.malformed_snaks;
      skip("malformed", e.what());
      return;
    }
    if (rank == "deprecated") ++report.deprecated_kept;
    report.skolems_created += skolems;
    ++report.facts_emitted;
    store.assert_fact(std::move(f));
  }

  void document(const json& doc) {
    ++report.documents;
    const std::string sid = str_member(doc, "id");
    auto subject = EntityRef::parse(sid);
    if (!subject || (subject->kind != EntityRef::Kind::item && subject->kind != EntityRef::Kind::property)) {
      bad("unsupported entity id '" + sid + "'");
    }
    auto claims = doc.find("claims");
    if (claims == doc.end() || claims->is_array()) return;  // empty claims serialize as []
    for (const auto& [pid, statements] : claims->items()) {
      auto property = EntityRef::parse(pid);
      if (!property || property->kind != EntityRef::Kind::property) bad("claim key '" + pid + "' is not a property id");
      for (const json& st : statements) statement(*subject, *property, st);
    }
  }
};

}  // namespace

IngestReport ingest_entities(const std::vector<json>& documents, Store& store, const IngestOptions& options) {
  IngestReport report;
  Ingester ing{store, options, report};
  for (const json& doc : documents) ing.document(doc);
  return report;
}

const std::map<std::string, Term>& wikidata_aliases() {
  static const std::map<std::string, Term> kAliases = [] {
    std::map<std::string, Term> m;
    auto p = [&](const char* name, const char* id) { m.emplace(name, EntityRef::property(id)); };
    auto q = [&](const char* name, const char* id) { m.emplace(name, EntityRef::item(id)); };
    p("instance_of", "P31");
    p("subclass_of", "P279");
    p("subproperty_of", "P1647");
    p("spouse", "P26");
    p("start_time", "P580");
    p("end_time", "P582");
    p("point_in_time", "P585");
    p("location", "P276");
    p("date_of_birth", "P569");
    p("sex_or_gender", "P21");
    p("father", "P22");
    p("property_constraint", "P2302");
    p("series_ordinal", "P1545");
    q("female", "Q6581072");
    q("human", "Q5");
    q("person", "Q215627");
    q("female_human", "Q84048852");
    q("distinct_values_constraint", "Q21502410");
    q("single_value_constraint", "Q19474404");
    q("symmetric_constraint", "Q21510862");
    q("symmetric_property", "Q18647518");
    q("transitive_property", "Q18647515");
    q("Wikidata_property", "Q18616576");
    m.emplace("rank", kRank);
    m.emplace("preferred", kPreferred);
    m.emplace("normal", kNormal);
    m.emplace("deprecated", kDeprecated);
    return m;
  }();
  return kAliases;
}

std::vector<lang::Rule> typing_rules(const PropertyRegistry& registry) {
  std::vector<lang::Rule> out;
  for (const auto& [property, datatype] : registry) {
    lang::Rule r;
    r.label = "typing_" + property.id;
    lang::Atom body;
    body.pred = lang::ObjectTerm::of(property);
    body.args = {lang::ObjectTerm::var("s"), lang::ObjectTerm::var("o")};
    lang::Atom head;
    head.kind = lang::Atom::Kind::datatype_rel;
    head.rel = std::string(datatype_name(datatype));
    head.args = {lang::ObjectTerm::var("o")};
    r.body = {std::move(body)};
    r.head = std::move(head);
    out.push_back(std::move(r));
  }
  return out;
}

const char* builtin_ontology_source() {
  return R"(% Ontology rules over the Wikidata vocabulary.
[subclass_transitive] subclass_of(c, d), subclass_of(d, e) -> subclass_of(c, e).
[instance_propagation] instance_of(y, c), subclass_of(c, d) -> instance_of(y, d).
[subproperty_transitive] subproperty_of(p, q), subproperty_of(q, r) -> subproperty_of(p, r).
[subproperty_application] instance_of(p, Wikidata_property), subproperty_of(p, q), p(x, y) -> q(x, y).
[symmetric_property] instance_of(p, symmetric_property), p(y, x) -> p(x, y).
[transitive_property] instance_of(p, transitive_property), p(x, y), p(y, z) -> p(x, z).
)";
}

std::vector<lang::Rule> builtin_ontology_rules() { return lang::parse_program(builtin_ontology_source()).rules; }

}  // namespace emars::wikidata
