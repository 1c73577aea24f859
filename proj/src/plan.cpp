#include "emars/plan.hpp"

#include <algorithm>
#include <map>

#include "emars/analysis.hpp"
#include "emars/error.hpp"
#include "emars/printer.hpp"

namespace emars {

using namespace lang;

namespace {

struct Scope {
  std::map<std::string, int> vars;
  std::map<std::string, int> sets;
};

class RuleCompiler {
 public:
  RuleCompiler(const DatatypeTheory& theory, CompiledRule& out) : theory_(theory), out_(out) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw CompileError(std::to_string(out_.source.span.line) + ":" + std::to_string(out_.source.span.column) +
                       ": rule " + out_.key + ": " + msg);
  }

  int var_slot(Scope& scope, const std::string& name, int& next) {
    auto [it, fresh] = scope.vars.emplace(name, next);
    if (fresh) {
      ++next;
      if (static_cast<int>(out_.var_names.size()) < next) out_.var_names.resize(next);
      out_.var_names[it->second] = name;
    }
    return it->second;
  }

  int set_slot(const Scope& scope, const std::string& name) const {
    auto it = scope.sets.find(name);
    if (it == scope.sets.end()) fail("unknown set variable " + name);
    return it->second;
  }

  CTerm term(const ObjectTerm& t, Scope& scope, int& next) {
    CTerm c;
    switch (t.kind) {
      case ObjectTerm::Kind::constant:
        c.kind = CTerm::Kind::constant;
        c.constant = t.constant;
        break;
      case ObjectTerm::Kind::variable:
        c.kind = CTerm::Kind::var;
        c.var = var_slot(scope, t.name, next);
        break;
      case ObjectTerm::Kind::fn_app:
        c.kind = CTerm::Kind::fn;
        c.fn = theory_.function(t.name);
        if (c.fn == nullptr) fail("unknown function " + t.name);
        if (c.fn->arity != static_cast<int>(t.args.size())) fail("wrong number of arguments to " + t.name);
        for (const ObjectTerm& a : t.args) c.args.push_back(term(a, scope, next));
        break;
      case ObjectTerm::Kind::fold:
        c.kind = CTerm::Kind::fold;
        c.fn = theory_.function(t.name);
        if (c.fn == nullptr) fail("unknown function " + t.name);
        if (c.fn->arity != 2) fail("fold needs a binary function, " + t.name + " is not");
        c.attr = t.attr;
        for (const std::string& s : t.sets) c.sets.push_back(set_slot(scope, s));
        break;
    }
    return c;
  }

  CAtom atom(const Atom& a, Scope& scope, int& next) {
    CAtom c;
    c.kind = a.kind;
    c.negated = a.negated;
    c.attr = a.attr;
    for (const ObjectTerm& t : a.args) c.args.push_back(term(t, scope, next));
    switch (a.kind) {
      case Atom::Kind::relational:
        c.pred = term(a.pred, scope, next);
        if (a.set && a.set->kind == SetTerm::Kind::variable) c.set = set_slot(scope, a.set->var);
        if (c.pred.kind == CTerm::Kind::fn || c.pred.kind == CTerm::Kind::fold) fail("computed predicate");
        for (const CTerm& t : c.args) {
          if (t.kind == CTerm::Kind::fn || t.kind == CTerm::Kind::fold) {
            fail("function application as a relational argument; bind it with an equality instead");
          }
        }
        break;
      case Atom::Kind::set_member:
        c.set = set_slot(scope, a.sets.at(0));
        break;
      case Atom::Kind::datatype_rel:
        c.rel = theory_.relation(a.rel);
        if (c.rel == nullptr) fail("unknown datatype relation " + a.rel);
        if (c.rel->arity != static_cast<int>(a.args.size())) fail("wrong number of arguments to " + a.rel);
        break;
      case Atom::Kind::absent:
      case Atom::Kind::same_set:
        for (const std::string& s : a.sets) c.sets.push_back(set_slot(scope, s));
        break;
      case Atom::Kind::equality:
        break;
    }
    return c;
  }

  static void vars_of(const CTerm& t, std::vector<int>& out) {
    if (t.kind == CTerm::Kind::var) out.push_back(t.var);
    for (const CTerm& a : t.args) vars_of(a, out);
  }

  /// Orders atoms: the first ready non-relational atom in written order,
  /// otherwise the next relational atom.
  static void sets_of(const CTerm& t, std::vector<int>& out) {
    out.insert(out.end(), t.sets.begin(), t.sets.end());
    for (const CTerm& a : t.args) sets_of(a, out);
  }

  std::vector<CAtom> schedule(std::vector<CAtom> atoms, std::vector<bool> bound, std::vector<bool> sets_bound,
                              const std::vector<Atom>& source) {
    auto all_bound = [&](const CTerm& t) {
      std::vector<int> vs;
      vars_of(t, vs);
      std::vector<int> ss;
      sets_of(t, ss);
      return std::all_of(vs.begin(), vs.end(), [&](int v) { return bound[v]; }) &&
             std::all_of(ss.begin(), ss.end(), [&](int v) { return sets_bound[v]; });
    };
    auto sets_ready = [&](const CAtom& a) {
      if (a.kind == Atom::Kind::set_member && !sets_bound[a.set]) return false;
      return std::all_of(a.sets.begin(), a.sets.end(), [&](int v) { return sets_bound[v]; });
    };
    auto bind = [&](const CTerm& t) {
      std::vector<int> vs;
      vars_of(t, vs);
      for (int v : vs) bound[v] = true;
    };
    std::vector<CAtom> out;
    std::vector<bool> placed(atoms.size(), false);
    for (std::size_t done = 0; done < atoms.size(); ++done) {
      std::size_t pick = atoms.size();
      for (std::size_t i = 0; i < atoms.size() && pick == atoms.size(); ++i) {
        if (placed[i]) continue;
        CAtom& a = atoms[i];
        if (a.kind != Atom::Kind::relational && !sets_ready(a)) continue;
        switch (a.kind) {
          case Atom::Kind::relational:
            break;
          case Atom::Kind::set_member: {
            bool ok = true;
            for (const CTerm& t : a.args) {
              if (t.kind != CTerm::Kind::var && !all_bound(t)) ok = false;
            }
            if (ok) {
              a.mode = CAtom::Mode::generate;
              pick = i;
            }
            break;
          }
          case Atom::Kind::equality:
            if (all_bound(a.args[0]) && all_bound(a.args[1])) {
              a.mode = CAtom::Mode::filter;
              pick = i;
            } else if (!a.negated) {
              for (int side = 0; side < 2 && pick == atoms.size(); ++side) {
                const CTerm& lhs = a.args[side];
                if (lhs.kind == CTerm::Kind::var && !bound[lhs.var] && all_bound(a.args[1 - side])) {
                  a.mode = CAtom::Mode::assign;
                  a.assign_side = side;
                  pick = i;
                }
              }
            }
            break;
          default:
            if (std::all_of(a.args.begin(), a.args.end(), all_bound)) {
              a.mode = CAtom::Mode::filter;
              pick = i;
            }
            break;
        }
      }
      if (pick == atoms.size()) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (!placed[i] && atoms[i].kind == Atom::Kind::relational) {
            atoms[i].mode = CAtom::Mode::generate;
            pick = i;
            break;
          }
        }
      }
      if (pick == atoms.size()) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (!placed[i]) fail("cannot evaluate " + print(source[i]) + ": its variables are never bound");
        }
      }
      placed[pick] = true;
      for (const CTerm& t : atoms[pick].args) bind(t);
      if (atoms[pick].kind == Atom::Kind::relational) {
        bind(atoms[pick].pred);
        if (atoms[pick].set >= 0) sets_bound[atoms[pick].set] = true;
      }
      out.push_back(std::move(atoms[pick]));
    }
    return out;
  }

  void compile_body(Scope& scope, int& next) {
    int rel_index = 0;
    std::vector<CAtom> atoms;
    for (const Atom& a : out_.source.body) {
      CAtom c = atom(a, scope, next);
      if (a.kind == Atom::Kind::relational) c.relational_index = rel_index++;
      atoms.push_back(std::move(c));
    }
    out_.relational_count = static_cast<std::size_t>(rel_index);
    out_.steps = schedule(std::move(atoms), std::vector<bool>(next, false),
                          std::vector<bool>(out_.set_names.size(), false), out_.source.body);
  }

  void compile_function(const FunctionDef& fn, const std::vector<std::string>& args, const Scope& rule_scope,
                        int rule_vars) {
    if (args.size() != fn.params.size()) {
      fail("function " + fn.name + " takes " + std::to_string(fn.params.size()) + " sets, " +
           std::to_string(args.size()) + " given");
    }
    std::size_t env = static_cast<std::size_t>(rule_vars);
    for (const FunctionClause& clause : fn.clauses) {
      Scope local;
      for (std::size_t i = 0; i < args.size(); ++i) local.sets[fn.params[i]] = set_slot(rule_scope, args[i]);
      int next = rule_vars;
      CClause c;
      std::vector<CAtom> conds;
      for (const Atom& a : clause.conditions) {
        if (a.kind == Atom::Kind::relational) fail("function " + fn.name + " has a relational condition");
        conds.push_back(atom(a, local, next));
      }
      c.conditions = schedule(std::move(conds), std::vector<bool>(next, false),
                              std::vector<bool>(out_.set_names.size(), true), clause.conditions);
      std::vector<bool> bound(next, false);
      for (const CAtom& a : c.conditions) {
        std::vector<int> vs;
        for (const CTerm& t : a.args) vars_of(t, vs);
        for (int v : vs) bound[v] = true;
      }
      for (const auto& [k, v] : clause.outputs) {
        CTerm ck = term(k, local, next);
        CTerm cv = term(v, local, next);
        std::vector<int> vs;
        vars_of(ck, vs);
        vars_of(cv, vs);
        bound.resize(next, false);
        for (int x : vs) {
          if (!bound[x]) fail("function " + fn.name + " outputs unbound variable " + out_.var_names[x]);
        }
        c.outputs.emplace_back(std::move(ck), std::move(cv));
      }
      env = std::max(env, static_cast<std::size_t>(next));
      out_.clauses.push_back(std::move(c));
    }
    out_.env_vars = std::max(out_.env_vars, env);
  }

 private:
  const DatatypeTheory& theory_;
  CompiledRule& out_;
};

}  // namespace

std::string rule_key(const Rule& rule) {
  if (!rule.label.empty()) return rule.label;
  Rule r = rule;
  r.label.clear();
  return print(r);
}

const CompiledRule* ExecutionPlan::find(const std::string& key) const {
  for (const CompiledRule& r : rules) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

ExecutionPlan compile(const Program& program, const DatatypeTheory& theory) {
  const CharacterizationTable table = CharacterizationTable::build(program, theory);
  std::map<std::string, const FunctionDef*> functions;
  for (const FunctionDef& f : program.functions) {
    if (!functions.emplace(f.name, &f).second) throw CompileError("function " + f.name + " defined twice");
  }

  ExecutionPlan plan;
  plan.theory = &theory;
  std::set<std::string> keys;
  for (const Rule& original : program.rules) {
    CompiledRule out;
    out.key = rule_key(original);
    if (!keys.insert(out.key).second) {
      // Identical rules add nothing; labels must be unique.
      if (!original.label.empty()) throw CompileError("rule label " + original.label + " used twice");
      continue;
    }
    const auto violations = check_safety(original);
    if (!violations.empty()) {
      std::string msg;
      for (const auto& v : violations) msg += (msg.empty() ? "" : ", ") + v.var + " (" + v.where + ")";
      throw CompileError(std::to_string(original.span.line) + ":" + std::to_string(original.span.column) + ": rule " +
                         out.key + " is unsafe: " + msg);
    }
    out.source = normalize(original);
    RuleCompiler rc(theory, out);

    Scope scope;
    for (const std::string& s : body_set_vars(out.source)) {
      scope.sets[s] = static_cast<int>(out.set_names.size());
      out.set_names.push_back(s);
    }
    int next = 0;
    rc.compile_body(scope, next);

    const Atom& head = out.source.head;
    out.head = rc.atom(head, scope, next);
    if (head.kind == Atom::Kind::relational) {
      if (head.set) {
        if (head.set->kind == SetTerm::Kind::variable) {
          out.head_copy_set = rc.set_slot(scope, head.set->var);
        } else {
          for (const auto& [k, v] : head.set->pairs) {
            out.head_pairs.emplace_back(rc.term(k, scope, next), rc.term(v, scope, next));
          }
        }
      }
    } else if (head.kind != Atom::Kind::datatype_rel) {
      rc.fail("head must be a relational or datatype atom");
    }
    const int rule_vars = next;
    out.env_vars = static_cast<std::size_t>(rule_vars);

    const FunctionDef* fn = nullptr;
    if (out.source.fn) {
      auto it = functions.find(out.source.fn->name);
      if (it == functions.end()) rc.fail("undefined function " + out.source.fn->name);
      fn = it->second;
      const std::vector<std::string>& args = out.source.fn->args.empty() ? out.set_names : out.source.fn->args;
      rc.compile_function(*fn, args, scope, rule_vars);
    }

    if (!out.typing()) {
      const Mentions mentions = mentioned_attrs(out.source, fn);
      for (const auto& [attr, c] : table.entries()) {
        if (c.kind == Characterization::Kind::ignore || mentions.contains(attr)) continue;
        Handler h;
        h.attr = attr;
        h.kind = c.kind;
        if (!c.fn.empty()) h.fn = theory.function(c.fn);
        if (!c.guard.empty()) h.guard = theory.relation(c.guard);
        for (std::size_t k = 0; k < c.inputs.size(); ++k) {
          h.inputs.emplace_back(c.inputs[k].first, theory.function(c.inputs[k].second));
          if (c.inputs[k].first == attr) h.self = k;
        }
        out.handlers.push_back(std::move(h));
      }
    }
    plan.rules.push_back(std::move(out));
  }
  return plan;
}

}  // namespace emars
