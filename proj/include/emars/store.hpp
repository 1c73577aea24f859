#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "emars/term.hpp"

namespace emars {

using ValueSet = std::set<Term, TermLess>;

/// Attribute id -> non-empty set of values. std::map and std::set keep the
/// canonical order, so structural equality is set equality.
using AttributeSet = std::map<EntityRef, ValueSet>;

struct Fact {
  EntityRef predicate;
  std::vector<Term> args;
  AttributeSet attrs;

  bool operator==(const Fact&) const = default;
};

std::weak_ordering compare_facts(const Fact& a, const Fact& b);
std::weak_ordering compare_attrs(const AttributeSet& a, const AttributeSet& b);

struct FactLess {
  bool operator()(const Fact& a, const Fact& b) const { return compare_facts(a, b) < 0; }
};

std::size_t hash_value(const Fact& f);

/// Rule-syntax rendering, e.g. P26(Q1, Q2)@{P580: time(...)}.
std::string format_fact(const Fact& f);
std::string format_attrs(const AttributeSet& attrs);

using FactId = std::uint32_t;

struct Derivation {
  std::string rule_key;
  std::vector<FactId> premises;

  bool operator==(const Derivation&) const = default;
};

/// Constant, named variable, or (both unset) wildcard.
struct PatternSlot {
  std::optional<Term> constant;
  std::string var;

  static PatternSlot any() { return {}; }
  static PatternSlot of(Term t) { return {std::move(t), {}}; }
  static PatternSlot variable(std::string name) { return {std::nullopt, std::move(name)}; }
};

/// Set atom (attr : value) in S, S being the matched fact's attribute set.
struct AttrConstraint {
  PatternSlot attr;
  PatternSlot value;
};

struct Pattern {
  PatternSlot predicate;
  std::vector<PatternSlot> args;
  std::vector<AttrConstraint> attrs;
};

using Bindings = std::map<std::string, Term>;

struct Match {
  FactId fact;
  Bindings bindings;
};

/// A finite multi-attributed relational structure: deduplicated facts with
/// predicate and argument indexes. Not internally synchronized; concurrent
/// const access is safe.
class Store {
 public:
  struct AssertResult {
    FactId id;
    bool inserted;
  };

  static constexpr std::size_t kMaxDerivations = 8;

  /// Throws StoreError for facts without arguments, empty attribute value
  /// sets, or datatype relations used as predicates.
  AssertResult assert_fact(Fact f);
  /// The first derivation of a new fact is also pinned as its founding
  /// derivation; its premises all predate the fact, so explanations built
  /// from founding derivations are well-founded.
  AssertResult assert_derived(Fact f, Derivation d);
  /// Derived fact without a provenance record.
  AssertResult assert_derived(Fact f) { return insert(std::move(f), false); }

  std::optional<FactId> find(const Fact& f) const;
  bool contains(const Fact& f) const { return find(f).has_value(); }

  const Fact& fact(FactId id) const { return facts_[id]; }
  const std::vector<Fact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  bool is_base(FactId id) const { return base_[id]; }

  std::span<const FactId> by_predicate(const EntityRef& predicate) const;
  std::span<const FactId> by_arg(const EntityRef& predicate, std::size_t pos, const Term& t) const;
  std::span<const FactId> by_any_arg(std::size_t pos, const Term& t) const;

  /// Every (fact, bindings) unifying with the pattern, in fact-id order.
  std::vector<Match> match(const Pattern& pattern) const;
  /// Unifies one fact; appends one Match per way the attribute constraints
  /// can be satisfied.
  void match_fact(const Pattern& pattern, FactId id, const Bindings& seed, std::vector<Match>& out) const;

  EntityRef fresh_skolem();
  std::uint64_t skolem_counter() const { return skolem_counter_; }
  void set_skolem_counter(std::uint64_t n) { skolem_counter_ = n; }

  bool closed() const { return closed_; }
  void set_closed(bool c) { closed_ = c; }

  /// Up to kMaxDerivations records, the smallest by rule key then premise
  /// content, so the kept set does not depend on fact numbering.
  const std::vector<Derivation>& derivations(FactId id) const;
  void add_derivation(FactId id, Derivation d);
  const Derivation* founding(FactId id) const;
  void set_founding(FactId id, Derivation d);

  /// Entities and data values occurring anywhere in the store, sorted.
  std::vector<Term> active_domain() const;

  /// Fact ids sorted by canonical fact order.
  std::vector<FactId> canonical_order() const;

 private:
  struct ArgKey {
    std::optional<EntityRef> predicate;
    std::size_t pos;
    Term term;
    bool operator==(const ArgKey&) const = default;
  };
  struct ArgKeyHash {
    std::size_t operator()(const ArgKey& k) const;
  };

  void validate(const Fact& f) const;
  AssertResult insert(Fact f, bool base);
  bool derivation_less(const Derivation& a, const Derivation& b) const;

  std::vector<Fact> facts_;
  std::vector<bool> base_;
  std::unordered_map<std::size_t, std::vector<FactId>> dedup_;
  std::unordered_map<EntityRef, std::vector<FactId>, EntityHash> by_predicate_;
  std::unordered_map<ArgKey, std::vector<FactId>, ArgKeyHash> by_arg_;
  std::unordered_map<ArgKey, std::vector<FactId>, ArgKeyHash> by_any_arg_;
  std::unordered_map<FactId, std::vector<Derivation>> provenance_;
  std::unordered_map<FactId, Derivation> founding_;
  std::uint64_t skolem_counter_ = 0;
  bool closed_ = false;
};

/// Unifies a slot with a term under `b`, extending it on success.
bool unify_slot(const PatternSlot& slot, const Term& t, Bindings& b);

}  // namespace emars
