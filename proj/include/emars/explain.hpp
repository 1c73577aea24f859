#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emars/plan.hpp"
#include "emars/store.hpp"

namespace emars {

struct DerivationTree {
  FactId id = 0;
  Fact fact;
  bool base = false;
  std::string rule;  // empty for base facts
  /// Set when no provenance is recorded for a derived fact, or when the
  /// fact already occurs on the path from the root.
  std::string note;
  std::vector<DerivationTree> premises;
};

/// Derivation tree of a fact back to base facts, following founding
/// derivations. Throws EvaluationError when the fact is not in the store.
DerivationTree explain(const Store& store, const Fact& fact);
DerivationTree explain(const Store& store, FactId id);

std::string format_tree(const DerivationTree& tree);
nlohmann::json tree_to_json(const DerivationTree& tree);

/// True when every derived node is reproduced by replaying its rule on its
/// premises, recursively.
bool verify_tree(const Store& store, const ExecutionPlan& plan, const DerivationTree& tree);

}  // namespace emars
