#include "emars/expansion.hpp"

#include <map>

#include "emars/analysis.hpp"
#include "emars/characterization.hpp"
#include "emars/error.hpp"

namespace emars {

using namespace lang;

namespace {

struct Variant {
  std::vector<Atom> body;
  std::vector<AttrPair> head;
};

void rename_sets(ObjectTerm& t, const std::map<std::string, std::string>& m) {
  for (std::string& s : t.sets) {
    if (auto it = m.find(s); it != m.end()) s = it->second;
  }
  for (ObjectTerm& a : t.args) rename_sets(a, m);
}

void rename_sets(Atom& a, const std::map<std::string, std::string>& m) {
  for (std::string& s : a.sets) {
    if (auto it = m.find(s); it != m.end()) s = it->second;
  }
  for (ObjectTerm& t : a.args) rename_sets(t, m);
}

Atom equality(const std::string& var, ObjectTerm rhs) {
  Atom a;
  a.kind = Atom::Kind::equality;
  a.args = {ObjectTerm::var(var), std::move(rhs)};
  return a;
}

Atom absent(const EntityRef& attr, const std::vector<std::string>& sets) {
  Atom a;
  a.kind = Atom::Kind::absent;
  a.attr = attr;
  a.sets = sets;
  return a;
}

Atom guard(const std::string& rel, const std::vector<std::string>& vars) {
  Atom a;
  a.kind = Atom::Kind::datatype_rel;
  a.rel = rel;
  for (const std::string& v : vars) a.args.push_back(ObjectTerm::var(v));
  return a;
}

}  // namespace

Program expand_materialized(const Program& program, const DatatypeTheory& theory) {
  const CharacterizationTable table = CharacterizationTable::build(program, theory);
  std::map<std::string, const FunctionDef*> functions;
  for (const FunctionDef& f : program.functions) functions[f.name] = &f;

  Program out;
  out.properties = program.properties;
  for (std::size_t ri = 0; ri < program.rules.size(); ++ri) {
    Rule r = normalize(program.rules[ri]);
    if (r.head.kind != Atom::Kind::relational) {
      out.rules.push_back(std::move(r));
      continue;
    }
    const std::vector<std::string> body_sets = body_set_vars(r);
    std::set<std::string> used = rule_names(r);

    const FunctionDef* fn = nullptr;
    FunctionDef priv;
    priv.name = "_f" + std::to_string(ri);
    priv.params = body_sets;
    if (r.fn) {
      auto it = functions.find(r.fn->name);
      if (it == functions.end()) throw CompileError("rule uses undefined function " + r.fn->name);
      fn = it->second;
      const std::vector<std::string>& args = r.fn->args.empty() ? body_sets : r.fn->args;
      if (args.size() != fn->params.size()) {
        throw CompileError("function " + fn->name + " takes " + std::to_string(fn->params.size()) + " sets, " +
                           std::to_string(args.size()) + " given");
      }
      std::map<std::string, std::string> rename;
      for (std::size_t i = 0; i < args.size(); ++i) rename[fn->params[i]] = args[i];
      for (FunctionClause c : fn->clauses) {
        for (Atom& a : c.conditions) rename_sets(a, rename);
        for (auto& [k, v] : c.outputs) {
          rename_sets(k, rename);
          rename_sets(v, rename);
        }
        priv.clauses.push_back(std::move(c));
      }
    }

    const Mentions mentions = mentioned_attrs(r, fn);
    std::vector<std::vector<Variant>> choices;
    auto zname = [&](const EntityRef& attr, const EntityRef& input) {
      std::string n = "_z" + attr.id + "_" + input.id;
      while (!used.insert(n).second) n += "_";
      return n;
    };
    for (const auto& [attr, c] : table.entries()) {
      if (mentions.contains(attr)) continue;
      switch (c.kind) {
        case Characterization::Kind::ignore:
          break;
        case Characterization::Kind::additive:
          for (const std::string& s : body_sets) {
            Atom m;
            m.kind = Atom::Kind::set_member;
            m.args = {ObjectTerm::of(attr), ObjectTerm::var("_v")};
            m.sets = {s};
            priv.clauses.push_back({{std::move(m)}, {{ObjectTerm::of(attr), ObjectTerm::var("_v")}}});
          }
          break;
        case Characterization::Kind::combine: {
          const std::string z = zname(attr, attr);
          Variant present;
          present.body.push_back(equality(z, ObjectTerm::fold_of(c.fn, attr, body_sets)));
          if (!c.guard.empty()) present.body.push_back(guard(c.guard, {z}));
          present.head.push_back({ObjectTerm::of(attr), ObjectTerm::var(z)});
          Variant missing;
          missing.body.push_back(absent(attr, body_sets));
          choices.push_back({std::move(present), std::move(missing)});
          break;
        }
        case Characterization::Kind::blend: {
          std::vector<std::string> z;
          std::size_t self = 0;
          for (std::size_t k = 0; k < c.inputs.size(); ++k) {
            z.push_back(zname(attr, c.inputs[k].first));
            if (c.inputs[k].first == attr) self = k;
          }
          auto bind = [&](std::size_t k) {
            return equality(z[k], ObjectTerm::fold_of(c.inputs[k].second, c.inputs[k].first, body_sets));
          };
          std::vector<Variant> vs;
          Variant no_self;
          no_self.body.push_back(absent(attr, body_sets));
          vs.push_back(std::move(no_self));
          for (std::size_t j = 0; j < c.inputs.size(); ++j) {
            if (j == self) continue;
            Variant v;
            v.body.push_back(bind(self));
            for (std::size_t k = 0; k < j; ++k) {
              if (k != self) v.body.push_back(bind(k));
            }
            v.body.push_back(absent(c.inputs[j].first, body_sets));
            v.head.push_back({ObjectTerm::of(attr), ObjectTerm::var(z[self])});
            vs.push_back(std::move(v));
          }
          Variant all;
          for (std::size_t k = 0; k < c.inputs.size(); ++k) all.body.push_back(bind(k));
          if (!c.guard.empty()) all.body.push_back(guard(c.guard, z));
          std::vector<ObjectTerm> args;
          for (const std::string& n : z) args.push_back(ObjectTerm::var(n));
          all.head.push_back({ObjectTerm::of(attr), ObjectTerm::app(c.fn, std::move(args))});
          vs.push_back(std::move(all));
          choices.push_back(std::move(vs));
          break;
        }
      }
    }

    // Cross the variants of every attribute.
    std::vector<Variant> combos(1);
    for (const auto& options : choices) {
      std::vector<Variant> next;
      for (const Variant& base : combos) {
        for (const Variant& o : options) {
          Variant v = base;
          v.body.insert(v.body.end(), o.body.begin(), o.body.end());
          v.head.insert(v.head.end(), o.head.begin(), o.head.end());
          next.push_back(std::move(v));
        }
      }
      combos = std::move(next);
    }

    for (std::size_t k = 0; k < combos.size(); ++k) {
      Rule v = r;
      if (!r.label.empty() && combos.size() > 1) v.label = r.label + "_v" + std::to_string(k);
      v.body.insert(v.body.end(), combos[k].body.begin(), combos[k].body.end());
      if (!combos[k].head.empty()) {
        if (!v.head.set) v.head.set = SetTerm::of({});
        v.head.set->pairs.insert(v.head.set->pairs.end(), combos[k].head.begin(), combos[k].head.end());
      }
      v.fn = FnRef{priv.name, body_sets};
      out.rules.push_back(std::move(v));
    }
    out.functions.push_back(std::move(priv));
  }
  return out;
}

}  // namespace emars
