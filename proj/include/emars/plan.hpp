#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emars/ast.hpp"
#include "emars/characterization.hpp"
#include "emars/store.hpp"
#include "emars/theory.hpp"

// Lazy execution plan: rules compiled to slot-addressed match programs plus
// a head recipe that applies characterizations while building each head,
// without materializing the expansion.
namespace emars {

/// Object term with variables resolved to slots.
struct CTerm {
  enum class Kind { constant, var, fn, fold };
  Kind kind = Kind::constant;
  Term constant;
  int var = -1;
  const FunctionInfo* fn = nullptr;
  std::vector<CTerm> args;
  EntityRef attr;          // fold
  std::vector<int> sets;   // fold
};

struct CAtom {
  enum class Mode { generate, assign, filter };
  lang::Atom::Kind kind = lang::Atom::Kind::relational;
  Mode mode = Mode::filter;
  CTerm pred;
  std::vector<CTerm> args;
  int set = -1;  // relational: its set slot; set_member: the set searched
  const RelationInfo* rel = nullptr;
  bool negated = false;
  EntityRef attr;
  std::vector<int> sets;  // absent, same_set
  int assign_side = -1;   // equality in assign mode: the argument receiving the value
  int relational_index = -1;
};

struct CClause {
  std::vector<CAtom> conditions;  // scheduled
  std::vector<std::pair<CTerm, CTerm>> outputs;
};

struct Handler {
  EntityRef attr;
  lang::Characterization::Kind kind = lang::Characterization::Kind::ignore;
  const FunctionInfo* fn = nullptr;  // combining function, or blend function
  const RelationInfo* guard = nullptr;
  std::vector<std::pair<EntityRef, const FunctionInfo*>> inputs;  // blend
  std::size_t self = 0;
};

struct CompiledRule {
  std::string key;
  lang::Rule source;  // normalized
  std::vector<CAtom> steps;
  std::size_t relational_count = 0;
  std::vector<std::string> var_names;
  std::vector<std::string> set_names;  // one per relational atom, in body order
  std::size_t env_vars = 0;            // rule slots plus clause-local slots

  CAtom head;
  int head_copy_set = -1;
  std::vector<std::pair<CTerm, CTerm>> head_pairs;
  std::vector<CClause> clauses;
  std::vector<Handler> handlers;

  bool typing() const { return head.kind == lang::Atom::Kind::datatype_rel; }
};

struct ExecutionPlan {
  std::vector<CompiledRule> rules;
  const DatatypeTheory* theory = nullptr;

  const CompiledRule* find(const std::string& key) const;
};

/// Normalizes and checks every rule, then compiles it. Characterizations of
/// the program drive the head recipes. Throws CompileError.
ExecutionPlan compile(const lang::Program& program, const DatatypeTheory& theory = DatatypeTheory::wikidata());

/// Key identifying a rule in provenance records: its label, or its printed
/// form without one.
std::string rule_key(const lang::Rule& rule);

}  // namespace emars
