#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "emars/plan.hpp"
#include "emars/store.hpp"

namespace emars {

struct Env {
  std::vector<std::optional<Term>> vars;
  std::vector<FactId> sets;  // fact bound to each body set variable
};

/// Facts a relational atom may match: ids in [begin, end), or a single fact.
struct AtomRange {
  FactId begin = 0;
  FactId end = std::numeric_limits<FactId>::max();
  std::optional<FactId> only;
};

struct HeadOutcome {
  enum class Kind { fact, blocked, typing_ok, typing_failed };
  Kind kind = Kind::blocked;
  /// The head fact; for typing heads, predicate is the relation name as a
  /// symbol and args the checked values.
  Fact fact;
};

/// Evaluates one compiled rule against a store.
class Matcher {
 public:
  Matcher(const CompiledRule& rule, const Store& store, const DatatypeTheory& theory)
      : rule_(rule), store_(store), theory_(theory) {}

  /// Calls `emit` for every body match, relational atom k ranging over
  /// ranges[k]. Datatype errors surface as EvaluationError naming the rule
  /// and the facts matched so far.
  void for_each_match(std::span<const AtomRange> ranges, const std::function<void(const Env&)>& emit) const;

  HeadOutcome head(const Env& env) const;

  /// Value of a term, or nullopt when it folds over no values.
  std::optional<Term> eval(const CTerm& t, const Env& env) const;

  /// Premises of a match, in body order.
  static std::vector<FactId> premises(const Env& env) { return env.sets; }

 private:
  bool unify(const CTerm& t, const Term& value, Env& env, std::vector<int>& undo) const;
  void run(std::span<const CAtom> steps, std::size_t i, Env& env, std::span<const AtomRange> ranges,
           const std::function<void(Env&)>& emit) const;
  bool filter(const CAtom& a, const Env& env) const;
  std::vector<Term> values(const EntityRef& attr, const Env& env) const;
  [[noreturn]] void rethrow(const std::exception& e, const Env& env) const;

  const CompiledRule& rule_;
  const Store& store_;
  const DatatypeTheory& theory_;
};

}  // namespace emars
