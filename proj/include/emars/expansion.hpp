#pragma once

#include "emars/ast.hpp"
#include "emars/theory.hpp"

namespace emars {

/// Materialized expansion of a program: every rule is normalized and gets a
/// private function over all its body set variables. Additive attributes
/// become copy clauses; combining and blending attributes split the rule by
/// which inputs are present, adding a fold binding, a guard atom and a head
/// pair per variant. The result has no characterizations and no shared
/// functions; attributes its rules mention are left to the rules.
/// Throws CompileError.
lang::Program expand_materialized(const lang::Program& program, const DatatypeTheory& theory);

}  // namespace emars
