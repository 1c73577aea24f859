#pragma once

#include <string>

#include "emars/ast.hpp"

// Deterministic concrete syntax for ASTs. Constants print as ids (aliases are
// not reconstructed), variables as ?name, set variables bare, so that
// parse(print(x)) == x.
namespace emars::lang {

std::string print(const ObjectTerm& t);
std::string print(const SetTerm& s);
std::string print(const Atom& a);
std::string print(const Rule& r);
std::string print(const FunctionDef& f);
std::string print(const Characterization& c);
std::string print(const PropertyDecl& p);
std::string print(const Formula& f);
std::string print(const Constraint& c);
std::string print(const Program& p);

}  // namespace emars::lang
