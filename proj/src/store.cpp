#include "emars/store.hpp"

#include <algorithm>
#include <charconv>

#include "emars/error.hpp"
#include "emars/theory.hpp"

namespace emars {

namespace {

constexpr std::string_view kSkolemPrefix = "_:sk";

std::weak_ordering compare_value_sets(const ValueSet& a, const ValueSet& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end(), compare_terms);
}

}  // namespace

std::weak_ordering compare_attrs(const AttributeSet& a, const AttributeSet& b) {
  return std::lexicographical_compare_three_way(
      a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) -> std::weak_ordering {
        if (auto c = x.first <=> y.first; c != 0) return c;
        return compare_value_sets(x.second, y.second);
      });
}

std::weak_ordering compare_facts(const Fact& a, const Fact& b) {
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  if (auto c = std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end(),
                                                      compare_terms);
      c != 0) {
    return c;
  }
  return compare_attrs(a.attrs, b.attrs);
}

std::size_t hash_value(const Fact& f) {
  std::size_t h = hash_value(f.predicate);
  for (const Term& t : f.args) h = hash_combine(h, hash_value(t));
  for (const auto& [k, vs] : f.attrs) {
    h = hash_combine(h, hash_value(k) * 31);
    for (const Term& v : vs) h = hash_combine(h, hash_value(v));
  }
  return h;
}

std::string format_attrs(const AttributeSet& attrs) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, vs] : attrs) {
    for (const Term& v : vs) {
      if (!first) out += ", ";
      first = false;
      out += k.str() + ": " + format_term(v);
    }
  }
  return out + "}";
}

std::string format_fact(const Fact& f) {
  std::string out = f.predicate.str() + "(";
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (i) out += ", ";
    out += format_term(f.args[i]);
  }
  out += ")";
  if (!f.attrs.empty()) out += "@" + format_attrs(f.attrs);
  return out;
}

bool unify_slot(const PatternSlot& slot, const Term& t, Bindings& b) {
  if (slot.constant) return compare_terms(*slot.constant, t) == 0;
  if (slot.var.empty()) return true;
  auto [it, inserted] = b.emplace(slot.var, t);
  return inserted || compare_terms(it->second, t) == 0;
}

std::size_t Store::ArgKeyHash::operator()(const ArgKey& k) const {
  std::size_t h = k.predicate ? hash_value(*k.predicate) : 0x77;
  return hash_combine(hash_combine(h, k.pos), hash_value(k.term));
}

void Store::validate(const Fact& f) const {
  if (f.args.empty()) throw StoreError("fact " + format_fact(f) + " has no arguments");
  if (f.predicate.kind == EntityRef::Kind::symbol && DatatypeTheory::wikidata().relation(f.predicate.id) != nullptr) {
    throw StoreError("datatype relation " + f.predicate.id + " used as a fact predicate");
  }
  for (const auto& [k, vs] : f.attrs) {
    if (vs.empty()) throw StoreError("attribute " + k.str() + " has no values in " + format_fact(f));
  }
}

Store::AssertResult Store::assert_fact(Fact f) { return insert(std::move(f), true); }

Store::AssertResult Store::assert_derived(Fact f, Derivation d) {
  AssertResult r = insert(std::move(f), false);
  if (base_[r.id]) return r;
  if (r.inserted) founding_.emplace(r.id, d);
  add_derivation(r.id, std::move(d));
  return r;
}

Store::AssertResult Store::insert(Fact f, bool base) {
  validate(f);
  const std::size_t h = hash_value(f);
  auto& bucket = dedup_[h];
  for (FactId id : bucket) {
    if (facts_[id] == f) {
      if (base && !base_[id]) {
        base_[id] = true;
        provenance_.erase(id);
        founding_.erase(id);
      }
      return {id, false};
    }
  }
  const FactId id = static_cast<FactId>(facts_.size());
  bucket.push_back(id);

  auto note_skolem = [this](const Term& t) {
    const EntityRef* e = as_entity(t);
    if (e == nullptr || e->kind != EntityRef::Kind::skolem || !e->id.starts_with(kSkolemPrefix)) return;
    std::uint64_t n = 0;
    const char* begin = e->id.data() + kSkolemPrefix.size();
    const char* end = e->id.data() + e->id.size();
    auto [ptr, ec] = std::from_chars(begin, end, n);
    if (ec == std::errc() && ptr == end && n >= skolem_counter_) skolem_counter_ = n + 1;
  };

  by_predicate_[f.predicate].push_back(id);
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    by_arg_[ArgKey{f.predicate, i, f.args[i]}].push_back(id);
    by_any_arg_[ArgKey{std::nullopt, i, f.args[i]}].push_back(id);
    note_skolem(f.args[i]);
  }
  for (const auto& [k, vs] : f.attrs) {
    for (const Term& v : vs) note_skolem(v);
  }
  facts_.push_back(std::move(f));
  base_.push_back(base);
  return {id, true};
}

std::optional<FactId> Store::find(const Fact& f) const {
  auto it = dedup_.find(hash_value(f));
  if (it == dedup_.end()) return std::nullopt;
  for (FactId id : it->second) {
    if (facts_[id] == f) return id;
  }
  return std::nullopt;
}

std::span<const FactId> Store::by_predicate(const EntityRef& predicate) const {
  auto it = by_predicate_.find(predicate);
  if (it == by_predicate_.end()) return {};
  return it->second;
}

std::span<const FactId> Store::by_arg(const EntityRef& predicate, std::size_t pos, const Term& t) const {
  auto it = by_arg_.find(ArgKey{predicate, pos, t});
  if (it == by_arg_.end()) return {};
  return it->second;
}

std::span<const FactId> Store::by_any_arg(std::size_t pos, const Term& t) const {
  auto it = by_any_arg_.find(ArgKey{std::nullopt, pos, t});
  if (it == by_any_arg_.end()) return {};
  return it->second;
}

void Store::match_fact(const Pattern& pattern, FactId id, const Bindings& seed, std::vector<Match>& out) const {
  const Fact& f = facts_[id];
  if (f.args.size() != pattern.args.size()) return;
  Bindings b = seed;
  if (!unify_slot(pattern.predicate, f.predicate, b)) return;
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (!unify_slot(pattern.args[i], f.args[i], b)) return;
  }
  // Set atoms may be satisfied by several attribute pairs; enumerate them.
  auto rec = [&](auto& self, std::size_t k, const Bindings& cur) -> void {
    if (k == pattern.attrs.size()) {
      out.push_back(Match{id, cur});
      return;
    }
    const AttrConstraint& c = pattern.attrs[k];
    for (const auto& [attr, values] : f.attrs) {
      Bindings with_attr = cur;
      if (!unify_slot(c.attr, attr, with_attr)) continue;
      for (const Term& v : values) {
        Bindings next = with_attr;
        if (unify_slot(c.value, v, next)) self(self, k + 1, next);
      }
    }
  };
  rec(rec, 0, b);
}

std::vector<Match> Store::match(const Pattern& pattern) const {
  std::vector<Match> out;
  const EntityRef* pred = pattern.predicate.constant ? as_entity(*pattern.predicate.constant) : nullptr;
  if (pattern.predicate.constant && pred == nullptr) return out;

  std::optional<std::size_t> const_pos;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (pattern.args[i].constant) {
      const_pos = i;
      break;
    }
  }
  auto scan = [&](std::span<const FactId> ids) {
    for (FactId id : ids) match_fact(pattern, id, {}, out);
  };
  if (const_pos && pred) {
    scan(by_arg(*pred, *const_pos, *pattern.args[*const_pos].constant));
  } else if (pred) {
    scan(by_predicate(*pred));
  } else if (const_pos) {
    scan(by_any_arg(*const_pos, *pattern.args[*const_pos].constant));
  } else {
    for (FactId id = 0; id < facts_.size(); ++id) match_fact(pattern, id, {}, out);
  }
  return out;
}

EntityRef Store::fresh_skolem() { return EntityRef::skolem(std::string(kSkolemPrefix) + std::to_string(skolem_counter_++)); }

const std::vector<Derivation>& Store::derivations(FactId id) const {
  static const std::vector<Derivation> kNone;
  auto it = provenance_.find(id);
  return it == provenance_.end() ? kNone : it->second;
}

bool Store::derivation_less(const Derivation& a, const Derivation& b) const {
  if (a.rule_key != b.rule_key) return a.rule_key < b.rule_key;
  auto c = std::lexicographical_compare_three_way(
      a.premises.begin(), a.premises.end(), b.premises.begin(), b.premises.end(),
      [this](FactId x, FactId y) { return compare_facts(facts_[x], facts_[y]); });
  return c < 0;
}

void Store::add_derivation(FactId id, Derivation d) {
  auto& list = provenance_[id];
  for (const Derivation& existing : list) {
    if (!derivation_less(existing, d) && !derivation_less(d, existing)) return;
  }
  auto pos = std::lower_bound(list.begin(), list.end(), d,
                              [this](const Derivation& a, const Derivation& b) { return derivation_less(a, b); });
  list.insert(pos, std::move(d));
  if (list.size() > kMaxDerivations) list.pop_back();
}

const Derivation* Store::founding(FactId id) const {
  auto it = founding_.find(id);
  return it == founding_.end() ? nullptr : &it->second;
}

void Store::set_founding(FactId id, Derivation d) { founding_[id] = std::move(d); }

std::vector<Term> Store::active_domain() const {
  std::set<Term, TermLess> domain;
  for (const Fact& f : facts_) {
    domain.insert(f.predicate);
    domain.insert(f.args.begin(), f.args.end());
    for (const auto& [k, vs] : f.attrs) {
      domain.insert(k);
      domain.insert(vs.begin(), vs.end());
    }
  }
  return {domain.begin(), domain.end()};
}

std::vector<FactId> Store::canonical_order() const {
  std::vector<FactId> ids(facts_.size());
  for (FactId i = 0; i < ids.size(); ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [this](FactId a, FactId b) { return compare_facts(facts_[a], facts_[b]) < 0; });
  return ids;
}

}  // namespace emars
