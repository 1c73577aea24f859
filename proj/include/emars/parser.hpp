#pragma once

#include <map>
#include <string>
#include <string_view>

#include "emars/ast.hpp"
#include "emars/theory.hpp"

namespace emars::lang {

struct ParseOptions {
  /// Names that read as constants, e.g. spouse -> P26. `alias` statements
  /// add to these for the rest of the file.
  std::map<std::string, Term, std::less<>> aliases;
  const DatatypeTheory* theory = &DatatypeTheory::wikidata();

  /// Options with the Wikidata alias prelude (instance_of, subclass_of, ...).
  static ParseOptions wikidata();
};

/// Parses a .marpl or .mapl file. Throws ParseError with line and column.
Program parse_program(std::string_view text, const ParseOptions& options = ParseOptions::wikidata());

Formula parse_formula(std::string_view text, const ParseOptions& options = ParseOptions::wikidata());

/// A single relational atom, e.g. "instance_of(?x, female_human)@{P580: ?t}",
/// as accepted by the query command.
Atom parse_atom(std::string_view text, const ParseOptions& options = ParseOptions::wikidata());

}  // namespace emars::lang
