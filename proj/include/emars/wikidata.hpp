#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emars/ast.hpp"
#include "emars/store.hpp"

// Wikibase entity JSON to eMARS facts, plus the Wikidata rule prelude.
namespace emars::wikidata {

/// Reserved attribute carrying the statement rank, outside the P namespace.
inline const EntityRef kRank = EntityRef::symbol("rank");
inline const EntityRef kPreferred = EntityRef::symbol("preferred");
inline const EntityRef kNormal = EntityRef::symbol("normal");
inline const EntityRef kDeprecated = EntityRef::symbol("deprecated");

/// Property id -> value datatype. Entity-valued properties are not listed.
using PropertyRegistry = std::map<EntityRef, Datatype>;

/// Accepts a JSON object {"P569": "TimeValue", ...}. Values may be datatype
/// predicate names or Wikibase datatype ids ("time", "quantity", "url", ...);
/// "wikibase-item" and the other entity datatypes are skipped. Throws
/// DatatypeError on an unknown name.
PropertyRegistry registry_from_json(const nlohmann::json& j);
PropertyRegistry load_registry(const std::string& path);

struct IngestOptions {
  bool keep_deprecated = false;
  const PropertyRegistry* registry = nullptr;
};

struct IngestReport {
  std::size_t documents = 0;
  std::size_t statements = 0;
  std::size_t facts_emitted = 0;
  std::size_t skolems_created = 0;
  std::size_t novalue_skipped = 0;
  std::size_t novalue_qualifiers_skipped = 0;
  std::size_t deprecated_skipped = 0;
  std::size_t deprecated_kept = 0;
  std::size_t references_ignored = 0;
  std::size_t malformed_snaks = 0;
  /// One record per skipped statement: {"kind": "novalue" | "malformed" |
  /// "deprecated", "subject", "property", "statement", "reason"?}.
  std::vector<nlohmann::json> skips;

  nlohmann::json to_json() const;
  bool operator==(const IngestReport&) const = default;
};

/// Reads entity documents from a JSON array, a single document, an
/// entity-data response {"entities": {...}}, or JSON lines (dump style,
/// trailing commas and bracket lines tolerated). Throws FormatError.
std::vector<nlohmann::json> read_entity_documents(std::istream& in);

/// Converts a Wikibase snak datavalue. `snak_datatype` disambiguates string
/// values ("url" gives an IriValue). Entity ids become EntityRefs. Throws
/// FormatError or DatatypeError on malformed input.
Term convert_datavalue(const nlohmann::json& datavalue, const std::string& snak_datatype = "");

/// Closed bounds of a Wikibase time value, e.g. precision 9 on
/// +2005-00-00T00:00:00Z gives [2005-01-01T00:00:00, 2005-12-31T23:59:59].
/// before/after widen the range by that many precision units.
TimeValue convert_time(const std::string& timestamp, int precision, std::int64_t before, std::int64_t after,
                       int tz_minutes, const std::string& calendar);

IngestReport ingest_entities(const std::vector<nlohmann::json>& documents, Store& store,
                             const IngestOptions& options = {});

/// Aliases available in every rule and constraint file: instance_of -> P31,
/// subclass_of -> P279, female_human -> Q84048852, rank -> #rank, ...
const std::map<std::string, Term>& wikidata_aliases();

/// One rule per registered property, p(s, o) -> Datatype(o).
std::vector<lang::Rule> typing_rules(const PropertyRegistry& registry);

/// The six ontology rules: subclass and subproperty transitivity, instance
/// propagation, subproperty application (guarded by Wikidata_property),
/// symmetric and transitive property rules.
std::vector<lang::Rule> builtin_ontology_rules();
const char* builtin_ontology_source();

}  // namespace emars::wikidata
