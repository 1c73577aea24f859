#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "emars/ast.hpp"
#include "emars/theory.hpp"

namespace emars {

/// Validated per-attribute policies of a program. Attributes without an
/// entry are ignored.
class CharacterizationTable {
 public:
  /// Checks function and guard names, arities and datatypes against the
  /// theory. Throws CompileError.
  static CharacterizationTable build(const lang::Program& program, const DatatypeTheory& theory);

  const lang::Characterization* find(const EntityRef& attr) const;
  /// Declared datatype, from the characterization or a property declaration.
  std::optional<Datatype> datatype(const EntityRef& attr) const;
  const std::map<EntityRef, lang::Characterization>& entries() const { return entries_; }

 private:
  std::map<EntityRef, lang::Characterization> entries_;
  std::map<EntityRef, Datatype> datatypes_;
};

/// Attributes a rule's head already determines: constant keys of the head
/// pairs and of the function outputs. A variable key or a copied set
/// variable mentions every attribute.
struct Mentions {
  bool all = false;
  std::set<EntityRef> attrs;
  bool contains(const EntityRef& a) const { return all || attrs.count(a) > 0; }
};
Mentions mentioned_attrs(const lang::Rule& rule, const lang::FunctionDef* fn);

/// Left fold of a binary function over values, in order. `values` must not
/// be empty; a single value is returned unchanged.
Term fold_values(const FunctionInfo& fn, std::span<const Term> values);

}  // namespace emars
