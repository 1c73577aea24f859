#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emars/plan.hpp"
#include "emars/store.hpp"

namespace emars {

struct ClosureLimits {
  std::size_t max_rounds = 64;
  std::size_t max_facts = 10'000'000;
  std::size_t max_attr_values_per_fact = 1000;
};

struct ClosureOptions {
  ClosureLimits limits;
  bool provenance = true;
  bool parallel = true;
};

/// A typing rule whose check failed on a matched value.
struct TypingFailure {
  std::string rule;
  std::string relation;
  std::vector<Term> args;
  std::vector<Fact> premises;
  bool operator==(const TypingFailure&) const = default;
};

struct ClosureReport {
  std::size_t rounds = 0;
  std::size_t facts_before = 0;
  std::size_t facts_after = 0;
  /// New facts per rule, credited to the rule of their founding derivation.
  std::map<std::string, std::size_t> derived_per_rule;
  bool limit_hit = false;
  std::string limit;  // "maxRounds", "maxFacts" or "maxAttrValuesPerFact"
  std::string diagnostic;
  std::vector<TypingFailure> typing_failures;
  double wall_ms = 0;

  nlohmann::json to_json(bool with_time = true) const;
};

/// A head fact with the match that produced it.
struct Derived {
  Fact fact;
  Derivation derivation;
};

/// Every head derivable from a match with at least one premise in
/// [delta_begin, delta_end), atoms before the delta atom restricted to
/// facts older than delta_begin. The store must hold exactly delta_end facts.
/// Results are in a fixed order independent of `parallel`.
std::vector<Derived> derive_round(const Store& store, const ExecutionPlan& plan, FactId delta_begin, FactId delta_end,
                                  bool parallel, std::vector<TypingFailure>* typing = nullptr);

/// Serial reference: the same round evaluated rule by rule without tasks.
std::vector<Derived> derive_round_serial(const Store& store, const ExecutionPlan& plan, FactId delta_begin,
                                         FactId delta_end, std::vector<TypingFailure>* typing = nullptr);

/// New facts of one semi-naive round with delta [delta_begin, store.size()),
/// deduplicated against the store, in canonical order.
std::vector<Fact> step(const Store& store, const ExecutionPlan& plan, FactId delta_begin);

/// Semi-naive forward chaining to the least fixpoint, or until a limit is
/// hit, in which case the facts of the offending round are not added.
/// Marks the store closed when the fixpoint is reached.
ClosureReport close(Store& store, const ExecutionPlan& plan, const ClosureOptions& options = {});

/// Naive evaluation: every round re-derives from the whole store.
ClosureReport close_naive(Store& store, const ExecutionPlan& plan, const ClosureLimits& limits = {});

/// Heads of `rule` with its relational atoms bound to `premises` in order.
std::vector<Fact> replay(const Store& store, const CompiledRule& rule, const std::vector<FactId>& premises);

}  // namespace emars
