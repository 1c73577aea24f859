#include "emars/ast.hpp"

namespace emars::lang {

ObjectTerm ObjectTerm::of(Term t) {
  ObjectTerm o;
  o.kind = Kind::constant;
  o.constant = std::move(t);
  return o;
}

ObjectTerm ObjectTerm::var(std::string name) {
  ObjectTerm o;
  o.kind = Kind::variable;
  o.name = std::move(name);
  return o;
}

ObjectTerm ObjectTerm::app(std::string fn, std::vector<ObjectTerm> args) {
  ObjectTerm o;
  o.kind = Kind::fn_app;
  o.name = std::move(fn);
  o.args = std::move(args);
  return o;
}

ObjectTerm ObjectTerm::fold_of(std::string fn, EntityRef attr, std::vector<std::string> sets) {
  ObjectTerm o;
  o.kind = Kind::fold;
  o.name = std::move(fn);
  o.attr = std::move(attr);
  o.sets = std::move(sets);
  return o;
}

void Program::append(Program other) {
  auto move_all = [](auto& into, auto& from) {
    for (auto& x : from) into.push_back(std::move(x));
  };
  move_all(properties, other.properties);
  move_all(characterizations, other.characterizations);
  move_all(functions, other.functions);
  move_all(rules, other.rules);
  move_all(constraints, other.constraints);
}

}  // namespace emars::lang
