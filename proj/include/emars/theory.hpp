#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emars/datavalue.hpp"
#include "emars/term.hpp"

namespace emars {

struct RelationInfo {
  std::string name;
  int arity = 0;
  /// Datatypes every argument may take; empty means any term.
  std::vector<Datatype> accepts;
  std::function<bool(std::span<const Term>)> eval;
};

struct FunctionInfo {
  std::string name;
  int arity = 0;
  /// Datatypes the first argument may take.
  std::vector<Datatype> accepts;
  /// Result datatype; nullopt when it is the datatype of the first argument.
  std::optional<Datatype> result;
  std::function<Term(std::span<const Term>)> eval;

  bool closed_on(Datatype d) const;
};

/// Relations and functions of a datatype theory. Every relation R has a
/// registered negation not_R.
class DatatypeTheory {
 public:
  /// The theory of the seven Wikidata datatypes.
  static const DatatypeTheory& wikidata();

  const RelationInfo* relation(std::string_view name) const;
  const FunctionInfo* function(std::string_view name) const;

  std::vector<std::string> relation_names() const;
  std::vector<std::string> function_names() const;

  void add_relation(RelationInfo info);
  void add_function(FunctionInfo info);
  void add_function_alias(const std::string& alias, const std::string& target);

 private:
  std::map<std::string, RelationInfo, std::less<>> relations_;
  std::map<std::string, FunctionInfo, std::less<>> functions_;
};

}  // namespace emars
