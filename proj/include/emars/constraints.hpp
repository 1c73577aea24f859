#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "emars/ast.hpp"
#include "emars/store.hpp"
#include "emars/theory.hpp"
#include "emars/wikidata.hpp"

namespace emars {

/// Which facts constraints see. Deprecated-rank facts are hidden unless
/// asked for; skolem-valued facts are visible unless hidden.
struct CheckOptions {
  bool include_deprecated = false;
  bool include_skolems = true;
  bool parallel = true;
  const DatatypeTheory* theory = &DatatypeTheory::wikidata();
};

struct Violation {
  std::string constraint;
  lang::Constraint::Severity severity = lang::Constraint::Severity::violation;
  std::vector<std::pair<std::string, Term>> bindings;  // in parameter order
  std::vector<Fact> witnesses;
  bool operator==(const Violation&) const = default;
};

using FormulaBindings = std::map<std::string, Term>;

/// Read-only view of a store for formula evaluation: the visible facts and
/// the active domain (their terms plus extra constants).
class Interpretation {
 public:
  Interpretation(const Store& store, const CheckOptions& options = {});

  const Store& store() const { return store_; }
  const std::vector<FactId>& facts() const { return facts_; }
  const DatatypeTheory& theory() const { return *options_.theory; }
  /// Sorted, deduplicated object domain including `extra`.
  std::vector<Term> domain(const std::vector<Term>& extra = {}) const;
  /// Distinct attribute sets of the visible facts, in canonical order.
  const std::vector<const AttributeSet*>& attribute_sets() const { return attr_sets_; }

 private:
  const Store& store_;
  CheckOptions options_;
  std::vector<FactId> facts_;
  std::vector<Term> domain_;
  std::vector<const AttributeSet*> attr_sets_;
};

/// Tarskian evaluation; quantifiers range over the active domain plus the
/// formula's constants, set quantifiers over the visible attribute sets.
/// Throws EvaluationError on unbound variables and datatype mismatches.
bool eval_formula(const Interpretation& interp, const lang::Formula& formula, const FormulaBindings& bindings = {});
bool eval_formula(const Store& store, const lang::Formula& formula, const FormulaBindings& bindings = {});

/// Negation normal form: negations only directly above atoms, implications
/// eliminated, counting quantifiers negated into their duals.
lang::Formula nnf(const lang::Formula& f, bool negate = false);

/// Parameters violations are reported over: the declared ones, or for an
/// undeclared closed constraint the variables of its leading foralls.
/// Throws CompileError when the formula has other free variables.
std::vector<std::string> violation_params(const lang::Constraint& c, lang::Formula* matrix = nullptr);

/// Satisfying bindings of the negated formula, found with generator atoms,
/// after symmetric deduplication, sorted.
std::vector<Violation> find_violations(const Interpretation& interp, const lang::Constraint& c);
std::vector<Violation> find_violations(const Store& store, const lang::Constraint& c, const CheckOptions& options = {});

/// Brute-force reference: every parameter tuple over the active domain
/// plus constants, evaluated directly. Same deduplication and order.
std::vector<Violation> find_violations_brute(const Interpretation& interp, const lang::Constraint& c);

/// distinct_values, symmetric and single_value, parameterized by
/// property_constraint facts.
std::vector<lang::Constraint> builtin_constraints();
const char* builtin_constraints_source();
/// Builtins some property_constraint fact activates.
std::vector<lang::Constraint> active_builtins(const Store& store);

/// Value-type checks p(s, o) -> Datatype(o) from a property registry.
std::vector<lang::Constraint> typing_constraints(const wikidata::PropertyRegistry& registry);

struct CheckReport {
  std::vector<Violation> violations;  // constraint order, then binding order
  std::vector<std::string> warnings;
  std::size_t constraints = 0;
};

CheckReport check(const Store& store, const std::vector<lang::Constraint>& constraints, const CheckOptions& options = {});

nlohmann::json violation_to_json(const Violation& v);
void write_violations_jsonl(std::ostream& out, const CheckReport& report);
void write_violations_table(std::ostream& out, const CheckReport& report);

}  // namespace emars
