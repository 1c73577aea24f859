#pragma once

#include <set>
#include <string>
#include <vector>

#include "emars/ast.hpp"

namespace emars::lang {

struct SafetyViolation {
  std::string var;
  std::string where;  // "head", "function application", "datatype atom", "equality", "set variable"
  SourceSpan span;
};

/// Variables of the head, of function applications and of datatype atoms
/// must be relational: bound by a body relational atom or one of its set
/// atoms, or equated to such a term. Variables equated to a computed value
/// may appear in attribute values but not in head arguments. Each offending
/// variable is reported once.
std::vector<SafetyViolation> check_safety(const Rule& rule);

/// Gives every body relational atom its own set variable: explicit set terms
/// become set atoms over a fresh variable, a variable shared by several atoms
/// is renamed apart with a sameset atom. Other atoms keep their order.
Rule normalize(const Rule& rule);

/// Set variables of body relational atoms, in body order.
std::vector<std::string> body_set_vars(const Rule& rule);

/// A name not in `used`, of the form prefix1, prefix2, ...
std::string fresh_name(const std::string& prefix, std::set<std::string>& used);

/// Every object and set variable name occurring in the rule.
std::set<std::string> rule_names(const Rule& rule);

void term_vars(const ObjectTerm& t, std::set<std::string>& out);
void atom_vars(const Atom& a, std::set<std::string>& out);

struct FreeVars {
  std::set<std::string> objects;
  std::set<std::string> sets;
};

/// Free object and set variables of a formula. A quantified name binds the
/// set variable when it is used in set position, the object variable
/// otherwise.
FreeVars free_vars(const Formula& f);

}  // namespace emars::lang
