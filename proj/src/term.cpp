#include "emars/term.hpp"

#include <cctype>
#include <functional>

#include "emars/error.hpp"
#include "emars/literal.hpp"

namespace emars {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool is_symbol_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

}  // namespace

std::optional<EntityRef> EntityRef::parse(std::string_view text) {
  if (text.size() > 1 && text[0] == 'Q' && all_digits(text.substr(1))) return item(std::string(text));
  if (text.size() > 1 && text[0] == 'P' && all_digits(text.substr(1))) return property(std::string(text));
  if (text.starts_with("_:") && text.size() > 2) return skolem(std::string(text));
  if (text.starts_with("#") && is_symbol_name(text.substr(1))) return symbol(std::string(text.substr(1)));
  return std::nullopt;
}

std::string EntityRef::str() const { return kind == Kind::symbol ? "#" + id : id; }

std::strong_ordering EntityRef::operator<=>(const EntityRef& o) const {
  if (auto c = kind <=> o.kind; c != 0) return c;
  if (auto c = id.size() <=> o.id.size(); c != 0) return c;
  return id <=> o.id;
}

std::weak_ordering compare_terms(const Term& a, const Term& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  if (const auto* ea = as_entity(a)) return *ea <=> std::get<EntityRef>(b);
  const auto c = std::get<DataValue>(a) <=> std::get<DataValue>(b);
  if (c < 0) return std::weak_ordering::less;
  if (c > 0) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_value(const EntityRef& e) {
  return hash_combine(static_cast<std::size_t>(e.kind), std::hash<std::string>{}(e.id));
}

std::size_t hash_value(const Term& t) {
  if (const auto* e = as_entity(t)) return hash_value(*e);
  return hash_combine(0x51ed27, hash_value(std::get<DataValue>(t)));
}

std::string format_term(const Term& t) {
  if (const auto* e = as_entity(t)) return e->str();
  return format_value(std::get<DataValue>(t));
}

Term parse_term(std::string_view text) {
  if (auto e = EntityRef::parse(text)) return *e;
  return parse_value(text);
}

}  // namespace emars
