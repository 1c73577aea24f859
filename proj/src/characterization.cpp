#include "emars/characterization.hpp"

#include <algorithm>

#include "emars/error.hpp"
#include "emars/printer.hpp"

namespace emars {

namespace {

[[noreturn]] void fail(const lang::Characterization& c, const std::string& msg) {
  throw CompileError(std::to_string(c.span.line) + ":" + std::to_string(c.span.column) + ": qualifier " +
                     c.attr.str() + ": " + msg);
}

bool accepts(const RelationInfo& r, Datatype d) {
  return r.accepts.empty() || std::find(r.accepts.begin(), r.accepts.end(), d) != r.accepts.end();
}

const FunctionInfo& binary_fn(const lang::Characterization& c, const DatatypeTheory& theory, const std::string& name,
                              std::optional<Datatype> d) {
  const FunctionInfo* fn = theory.function(name);
  if (fn == nullptr) fail(c, "unknown function " + name);
  if (fn->arity != 2) fail(c, "combining function " + name + " is not binary");
  if (d && !fn->closed_on(*d)) {
    fail(c, "function " + name + " does not map " + std::string(datatype_name(*d)) + " pairs to " +
                std::string(datatype_name(*d)));
  }
  return *fn;
}

}  // namespace

CharacterizationTable CharacterizationTable::build(const lang::Program& program, const DatatypeTheory& theory) {
  CharacterizationTable t;
  for (const lang::PropertyDecl& p : program.properties) t.datatypes_[p.property] = p.datatype;
  for (const lang::Characterization& c : program.characterizations) {
    if (c.datatype) {
      auto [it, fresh] = t.datatypes_.emplace(c.attr, *c.datatype);
      if (!fresh && it->second != *c.datatype) fail(c, "datatype conflicts with the property declaration");
    }
  }
  for (const lang::Characterization& c : program.characterizations) {
    if (!t.entries_.emplace(c.attr, c).second) fail(c, "declared twice");
    const auto d = t.datatype(c.attr);
    switch (c.kind) {
      case lang::Characterization::Kind::ignore:
      case lang::Characterization::Kind::additive:
        break;
      case lang::Characterization::Kind::combine: {
        binary_fn(c, theory, c.fn, d);
        if (!c.guard.empty()) {
          const RelationInfo* g = theory.relation(c.guard);
          if (g == nullptr) fail(c, "unknown relation " + c.guard);
          if (g->arity != 1) fail(c, "combining guard " + c.guard + " must be unary");
          if (d && !accepts(*g, *d)) fail(c, "guard " + c.guard + " does not accept " + std::string(datatype_name(*d)));
        }
        break;
      }
      case lang::Characterization::Kind::blend: {
        const bool has_self = std::any_of(c.inputs.begin(), c.inputs.end(), [&](const auto& in) { return in.first == c.attr; });
        if (!has_self) fail(c, "blend inputs must include the attribute itself");
        std::set<EntityRef> seen;
        for (const auto& [attr, fn] : c.inputs) {
          if (!seen.insert(attr).second) fail(c, "blend input " + attr.str() + " listed twice");
          binary_fn(c, theory, fn, t.datatype(attr));
        }
        const FunctionInfo* blend = theory.function(c.fn);
        if (blend == nullptr) fail(c, "unknown function " + c.fn);
        if (blend->arity != static_cast<int>(c.inputs.size())) {
          fail(c, "blend function " + c.fn + " takes " + std::to_string(blend->arity) + " arguments, " +
                      std::to_string(c.inputs.size()) + " inputs given");
        }
        if (d) {
          const auto first = t.datatype(c.inputs.front().first);
          const auto result = blend->result ? blend->result : first;
          if (result && *result != *d) fail(c, "blend function " + c.fn + " does not yield " + std::string(datatype_name(*d)));
        }
        if (!c.guard.empty()) {
          const RelationInfo* g = theory.relation(c.guard);
          if (g == nullptr) fail(c, "unknown relation " + c.guard);
          if (g->arity != static_cast<int>(c.inputs.size())) {
            fail(c, "blend guard " + c.guard + " takes " + std::to_string(g->arity) + " arguments, " +
                        std::to_string(c.inputs.size()) + " inputs given");
          }
        }
        break;
      }
    }
  }
  return t;
}

const lang::Characterization* CharacterizationTable::find(const EntityRef& attr) const {
  auto it = entries_.find(attr);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Datatype> CharacterizationTable::datatype(const EntityRef& attr) const {
  auto it = datatypes_.find(attr);
  if (it == datatypes_.end()) return std::nullopt;
  return it->second;
}

Mentions mentioned_attrs(const lang::Rule& rule, const lang::FunctionDef* fn) {
  Mentions m;
  auto key = [&](const lang::ObjectTerm& k) {
    const EntityRef* e = k.kind == lang::ObjectTerm::Kind::constant ? as_entity(k.constant) : nullptr;
    if (e) {
      m.attrs.insert(*e);
    } else {
      m.all = true;
    }
  };
  if (rule.head.set) {
    if (rule.head.set->kind == lang::SetTerm::Kind::variable) {
      m.all = true;
    } else {
      for (const auto& [k, v] : rule.head.set->pairs) key(k);
    }
  }
  if (fn) {
    for (const lang::FunctionClause& c : fn->clauses) {
      for (const auto& [k, v] : c.outputs) key(k);
    }
  }
  return m;
}

Term fold_values(const FunctionInfo& fn, std::span<const Term> values) {
  Term acc = values.front();
  for (std::size_t i = 1; i < values.size(); ++i) {
    const Term args[2] = {acc, values[i]};
    acc = fn.eval(args);
  }
  return acc;
}

}  // namespace emars
