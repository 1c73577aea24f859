#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "emars/datavalue.hpp"

namespace emars {

/// Non-value domain element. Items and properties carry their Wikidata ids,
/// skolems a store-generated "_:skN" id, symbols any other name (reserved
/// attributes such as rank, rule-local predicates).
struct EntityRef {
  enum class Kind { item, property, skolem, symbol };

  Kind kind = Kind::symbol;
  std::string id;

  static EntityRef item(std::string id) { return {Kind::item, std::move(id)}; }
  static EntityRef property(std::string id) { return {Kind::property, std::move(id)}; }
  static EntityRef skolem(std::string id) { return {Kind::skolem, std::move(id)}; }
  static EntityRef symbol(std::string id) { return {Kind::symbol, std::move(id)}; }

  /// Reads "Q42", "P31", "_:sk3" or "#rank". Anything else is not an entity.
  static std::optional<EntityRef> parse(std::string_view text);

  /// Inverse of parse.
  std::string str() const;

  bool operator==(const EntityRef&) const = default;
  /// Kind first, then shorter ids first so Q9 sorts before Q10.
  std::strong_ordering operator<=>(const EntityRef& o) const;
};

using Term = std::variant<EntityRef, DataValue>;

inline bool is_entity(const Term& t) { return t.index() == 0; }
inline bool is_value(const Term& t) { return t.index() == 1; }
inline const EntityRef* as_entity(const Term& t) { return std::get_if<EntityRef>(&t); }
inline const DataValue* as_value(const Term& t) { return std::get_if<DataValue>(&t); }

/// Total order used for every canonical sort: entities before values.
std::weak_ordering compare_terms(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

std::size_t hash_value(const EntityRef& e);
std::size_t hash_value(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return hash_value(t); }
};
struct EntityHash {
  std::size_t operator()(const EntityRef& e) const { return hash_value(e); }
};

/// Rule-syntax form: entities as ids, values as literals.
std::string format_term(const Term& t);

/// Inverse of format_term; throws DatatypeError on anything else.
Term parse_term(std::string_view text);

std::size_t hash_combine(std::size_t seed, std::size_t v);

}  // namespace emars
