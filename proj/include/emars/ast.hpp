#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emars/datavalue.hpp"
#include "emars/term.hpp"

// Abstract syntax of eMAPL rules, attribute functions, characterizations and
// constraint formulae.
namespace emars::lang {

/// Position in the source text. Spans never take part in AST equality.
struct SourceSpan {
  int line = 0;
  int column = 0;
  bool operator==(const SourceSpan&) const { return true; }
};

struct ObjectTerm {
  enum class Kind {
    constant,
    variable,
    fn_app,  // datatype function applied to args
    fold,    // left fold of `name` over all values of `attr` in `sets`, in order
  };

  Kind kind = Kind::constant;
  Term constant;
  std::string name;  // variable name, or function name for fn_app and fold
  std::vector<ObjectTerm> args;
  EntityRef attr;
  std::vector<std::string> sets;

  static ObjectTerm of(Term t);
  static ObjectTerm var(std::string name);
  static ObjectTerm app(std::string fn, std::vector<ObjectTerm> args);
  static ObjectTerm fold_of(std::string fn, EntityRef attr, std::vector<std::string> sets);

  bool is_var() const { return kind == Kind::variable; }
  bool operator==(const ObjectTerm&) const = default;
};

using AttrPair = std::pair<ObjectTerm, ObjectTerm>;

struct SetTerm {
  enum class Kind { variable, explicit_pairs };

  Kind kind = Kind::variable;
  std::string var;
  std::vector<AttrPair> pairs;

  static SetTerm variable(std::string name) { return {Kind::variable, std::move(name), {}}; }
  static SetTerm of(std::vector<AttrPair> pairs) { return {Kind::explicit_pairs, {}, std::move(pairs)}; }
  bool operator==(const SetTerm&) const = default;
};

struct Atom {
  enum class Kind {
    relational,    // pred(args)[@set]
    set_member,    // (args[0] : args[1]) in sets[0]
    datatype_rel,  // rel(args)
    equality,      // args[0] = args[1], or != when negated
    absent,        // no fact bound to any of `sets` has attribute `attr`
    same_set,      // sets[0] and sets[1] are equal attribute sets
  };

  Kind kind = Kind::relational;
  ObjectTerm pred;
  std::string rel;
  std::vector<ObjectTerm> args;
  std::optional<SetTerm> set;
  bool negated = false;
  EntityRef attr;
  std::vector<std::string> sets;
  SourceSpan span;

  bool operator==(const Atom&) const = default;
};

/// `with name(S1, ..)`; empty args before normalization means "all body
/// set variables in order".
struct FnRef {
  std::string name;
  std::vector<std::string> args;
  bool operator==(const FnRef&) const = default;
};

struct Rule {
  std::string label;
  std::vector<Atom> body;
  Atom head;
  std::optional<FnRef> fn;
  SourceSpan span;

  bool operator==(const Rule&) const = default;
};

/// One conditional of an attribute function: when all conditions hold for
/// some assignment, every output pair is added.
struct FunctionClause {
  std::vector<Atom> conditions;
  std::vector<AttrPair> outputs;
  bool operator==(const FunctionClause&) const = default;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<FunctionClause> clauses;
  SourceSpan span;
  bool operator==(const FunctionDef&) const = default;
};

struct Characterization {
  enum class Kind { ignore, additive, combine, blend };

  EntityRef attr;
  std::optional<Datatype> datatype;
  Kind kind = Kind::ignore;
  std::string fn;     // combine function, or blend function
  std::string guard;  // relation name; empty for no guard
  std::vector<std::pair<EntityRef, std::string>> inputs;  // blend: attribute and its combine function
  SourceSpan span;

  bool operator==(const Characterization&) const = default;
};

struct PropertyDecl {
  EntityRef property;
  Datatype datatype;
  SourceSpan span;
  bool operator==(const PropertyDecl&) const = default;
};

struct Formula {
  enum class Kind { atom, negation, conjunction, disjunction, implication, forall, exists, at_least, at_most, exactly };

  Kind kind = Kind::atom;
  Atom atom;
  std::vector<Formula> children;
  std::vector<std::string> vars;
  int count = 0;

  bool is_quantifier() const { return kind >= Kind::forall; }
  bool operator==(const Formula&) const = default;
};

struct Constraint {
  enum class Severity { violation, warning };

  std::string name;
  std::vector<std::string> params;
  Severity severity = Severity::violation;
  /// Groups of parameters that may be swapped without changing the meaning,
  /// e.g. (s1, o1) and (s2, o2); violations are reported once per orbit.
  std::vector<std::vector<std::string>> symmetric;
  Formula formula;
  SourceSpan span;

  bool operator==(const Constraint&) const = default;
};

struct Program {
  std::vector<PropertyDecl> properties;
  std::vector<Characterization> characterizations;
  std::vector<FunctionDef> functions;
  std::vector<Rule> rules;
  std::vector<Constraint> constraints;

  void append(Program other);
  bool operator==(const Program&) const = default;
};

}  // namespace emars::lang
