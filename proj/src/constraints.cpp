#include "emars/constraints.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <set>

#include "emars/analysis.hpp"
#include "emars/characterization.hpp"
#include "emars/error.hpp"
#include "emars/fact_io.hpp"
#include "emars/parser.hpp"
#include "emars/printer.hpp"

namespace emars {

using namespace lang;

Interpretation::Interpretation(const Store& store, const CheckOptions& options) : store_(store), options_(options) {
  std::set<Term, TermLess> domain;
  std::vector<const AttributeSet*> sets;
  for (FactId id = 0; id < store.size(); ++id) {
    const Fact& f = store.fact(id);
    if (!options.include_deprecated) {
      auto it = f.attrs.find(wikidata::kRank);
      if (it != f.attrs.end() && it->second.count(wikidata::kDeprecated)) continue;
    }
    if (!options.include_skolems) {
      const bool skolem = std::any_of(f.args.begin(), f.args.end(), [](const Term& t) {
        const EntityRef* e = as_entity(t);
        return e && e->kind == EntityRef::Kind::skolem;
      });
      if (skolem) continue;
    }
    facts_.push_back(id);
    domain.insert(f.predicate);
    domain.insert(f.args.begin(), f.args.end());
    for (const auto& [k, vs] : f.attrs) {
      domain.insert(k);
      domain.insert(vs.begin(), vs.end());
    }
    sets.push_back(&f.attrs);
  }
  domain_.assign(domain.begin(), domain.end());
  std::sort(sets.begin(), sets.end(), [](const AttributeSet* a, const AttributeSet* b) { return compare_attrs(*a, *b) < 0; });
  sets.erase(std::unique(sets.begin(), sets.end(), [](const AttributeSet* a, const AttributeSet* b) { return *a == *b; }),
             sets.end());
  attr_sets_ = std::move(sets);
}

std::vector<Term> Interpretation::domain(const std::vector<Term>& extra) const {
  if (extra.empty()) return domain_;
  std::set<Term, TermLess> d(domain_.begin(), domain_.end());
  d.insert(extra.begin(), extra.end());
  return {d.begin(), d.end()};
}

namespace {

struct QEnv {
  std::map<std::string, Term> obj;
  std::map<std::string, const AttributeSet*> sets;
};

bool env_less(const QEnv& a, const QEnv& b) {
  auto c = std::lexicographical_compare_three_way(
      a.obj.begin(), a.obj.end(), b.obj.begin(), b.obj.end(), [](const auto& x, const auto& y) -> std::weak_ordering {
        if (auto c = x.first <=> y.first; c != 0) return c;
        return compare_terms(x.second, y.second);
      });
  if (c != 0) return c < 0;
  return std::lexicographical_compare(
      a.sets.begin(), a.sets.end(), b.sets.begin(), b.sets.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return compare_attrs(*x.second, *y.second) < 0;
      });
}

struct EnvLess {
  bool operator()(const QEnv& a, const QEnv& b) const { return env_less(a, b); }
};

void term_constants(const ObjectTerm& t, std::vector<Term>& out) {
  if (t.kind == ObjectTerm::Kind::constant) out.push_back(t.constant);
  if (t.kind == ObjectTerm::Kind::fold) out.push_back(t.attr);
  for (const ObjectTerm& a : t.args) term_constants(a, out);
}

void formula_constants(const Formula& f, std::vector<Term>& out) {
  if (f.kind == Formula::Kind::atom) {
    const Atom& a = f.atom;
    if (a.kind == Atom::Kind::relational) term_constants(a.pred, out);
    if (a.kind == Atom::Kind::absent) out.push_back(a.attr);
    for (const ObjectTerm& t : a.args) term_constants(t, out);
    if (a.set && a.set->kind == SetTerm::Kind::explicit_pairs) {
      for (const auto& [k, v] : a.set->pairs) {
        term_constants(k, out);
        term_constants(v, out);
      }
    }
    return;
  }
  for (const Formula& c : f.children) formula_constants(c, out);
}

bool uses_as_set(const Formula& f, const std::string& name) {
  return free_vars(f).sets.count(name) > 0;
}

class Evaluator {
 public:
  Evaluator(const Interpretation& interp, const Formula& top) : interp_(interp) {
    std::vector<Term> constants;
    formula_constants(top, constants);
    domain_ = interp.domain(constants);
  }

  const std::vector<Term>& domain() const { return domain_; }

  std::optional<Term> term(const ObjectTerm& t, const QEnv& env) const {
    switch (t.kind) {
      case ObjectTerm::Kind::constant: return t.constant;
      case ObjectTerm::Kind::variable: {
        auto it = env.obj.find(t.name);
        if (it == env.obj.end()) throw EvaluationError("unbound variable ?" + t.name);
        return it->second;
      }
      case ObjectTerm::Kind::fn_app: {
        const FunctionInfo* fn = interp_.theory().function(t.name);
        if (fn == nullptr) throw EvaluationError("unknown function " + t.name);
        std::vector<Term> args;
        for (const ObjectTerm& a : t.args) {
          auto v = term(a, env);
          if (!v) return std::nullopt;
          args.push_back(std::move(*v));
        }
        return fn->eval(args);
      }
      case ObjectTerm::Kind::fold: {
        const FunctionInfo* fn = interp_.theory().function(t.name);
        if (fn == nullptr) throw EvaluationError("unknown function " + t.name);
        std::vector<Term> vals;
        for (const std::string& s : t.sets) {
          const AttributeSet& attrs = set(s, env);
          if (auto it = attrs.find(t.attr); it != attrs.end()) vals.insert(vals.end(), it->second.begin(), it->second.end());
        }
        if (vals.empty()) return std::nullopt;
        return fold_values(*fn, vals);
      }
    }
    return std::nullopt;
  }

  const AttributeSet& set(const std::string& name, const QEnv& env) const {
    auto it = env.sets.find(name);
    if (it == env.sets.end()) throw EvaluationError("unbound set variable " + name);
    return *it->second;
  }

  static bool contains(const AttributeSet& attrs, const Term& k, const Term& v) {
    const EntityRef* e = as_entity(k);
    if (e == nullptr) return false;
    auto it = attrs.find(*e);
    return it != attrs.end() && it->second.count(v) > 0;
  }

  /// Visible facts that can match a relational atom, given its bound parts.
  std::vector<FactId> candidates(const Atom& a, const QEnv& env) const {
    std::optional<EntityRef> pred;
    if (bound(a.pred, env)) {
      auto p = term(a.pred, env);
      const EntityRef* e = p ? as_entity(*p) : nullptr;
      if (e == nullptr) return {};
      pred = *e;
    }
    std::span<const FactId> ids;
    bool indexed = false;
    for (std::size_t k = 0; k < a.args.size() && !indexed; ++k) {
      if (!bound(a.args[k], env)) continue;
      auto t = term(a.args[k], env);
      if (!t) return {};
      ids = pred ? interp_.store().by_arg(*pred, k, *t) : interp_.store().by_any_arg(k, *t);
      indexed = true;
    }
    if (!indexed && pred) {
      ids = interp_.store().by_predicate(*pred);
      indexed = true;
    }
    std::vector<FactId> out;
    const auto& visible = interp_.facts();
    if (!indexed) return visible;
    for (FactId id : ids) {
      if (std::binary_search(visible.begin(), visible.end(), id)) out.push_back(id);
    }
    return out;
  }

  bool holds(const Atom& a, const QEnv& env) const {
    try {
      return holds_unchecked(a, env);
    } catch (const EvaluationError&) {
      throw;
    } catch (const Error& e) {
      throw EvaluationError(std::string(e.what()) + " in " + print(a));
    }
  }

  bool holds_unchecked(const Atom& a, const QEnv& env) const {
    switch (a.kind) {
      case Atom::Kind::relational: {
        std::vector<Term> args;
        for (const ObjectTerm& t : a.args) {
          auto v = term(t, env);
          if (!v) return false;
          args.push_back(std::move(*v));
        }
        auto p = term(a.pred, env);
        for (FactId id : candidates(a, env)) {
          const Fact& f = interp_.store().fact(id);
          if (f.args != args || Term(f.predicate) != *p) continue;
          if (set_term_holds(a, f.attrs, env)) return true;
        }
        return false;
      }
      case Atom::Kind::set_member: {
        auto k = term(a.args[0], env);
        auto v = term(a.args[1], env);
        return k && v && contains(set(a.sets[0], env), *k, *v);
      }
      case Atom::Kind::datatype_rel: {
        const RelationInfo* rel = interp_.theory().relation(a.rel);
        if (rel == nullptr) throw EvaluationError("unknown relation " + a.rel);
        std::vector<Term> args;
        for (const ObjectTerm& t : a.args) {
          auto v = term(t, env);
          if (!v) return false;
          args.push_back(std::move(*v));
        }
        return rel->eval(args);
      }
      case Atom::Kind::equality: {
        auto l = term(a.args[0], env);
        auto r = term(a.args[1], env);
        if (!l || !r) return false;
        return (*l == *r) != a.negated;
      }
      case Atom::Kind::absent:
        return std::none_of(a.sets.begin(), a.sets.end(),
                            [&](const std::string& s) { return set(s, env).count(a.attr) > 0; });
      case Atom::Kind::same_set:
        return set(a.sets[0], env) == set(a.sets[1], env);
    }
    return false;
  }

  bool set_term_holds(const Atom& a, const AttributeSet& attrs, const QEnv& env) const {
    if (!a.set) return true;
    if (a.set->kind == SetTerm::Kind::variable) return set(a.set->var, env) == attrs;
    for (const auto& [k, v] : a.set->pairs) {
      auto kt = term(k, env);
      auto vt = term(v, env);
      if (!kt || !vt || !contains(attrs, *kt, *vt)) return false;
    }
    return true;
  }

  /// Calls `k` for every assignment of `vars` over the domain (object
  /// variables) or the attribute sets (set variables of `scope`).
  void assign(const std::vector<std::string>& vars, std::size_t i, QEnv& env, const Formula& scope,
              const std::function<void(QEnv&)>& k) const {
    if (i == vars.size()) {
      k(env);
      return;
    }
    const std::string& v = vars[i];
    if (uses_as_set(scope, v)) {
      auto saved = env.sets.find(v) == env.sets.end() ? nullptr : env.sets[v];
      for (const AttributeSet* s : interp_.attribute_sets()) {
        env.sets[v] = s;
        assign(vars, i + 1, env, scope, k);
      }
      if (saved) {
        env.sets[v] = saved;
      } else {
        env.sets.erase(v);
      }
    } else {
      std::optional<Term> saved;
      if (auto it = env.obj.find(v); it != env.obj.end()) saved = it->second;
      for (const Term& t : domain_) {
        env.obj[v] = t;
        assign(vars, i + 1, env, scope, k);
      }
      if (saved) {
        env.obj[v] = *saved;
      } else {
        env.obj.erase(v);
      }
    }
  }

  bool eval(const Formula& f, QEnv& env) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::atom: return holds(f.atom, env);
      case K::negation: return !eval(f.children[0], env);
      case K::conjunction:
        return std::all_of(f.children.begin(), f.children.end(), [&](const Formula& c) { return eval(c, env); });
      case K::disjunction:
        return std::any_of(f.children.begin(), f.children.end(), [&](const Formula& c) { return eval(c, env); });
      case K::implication: return !eval(f.children[0], env) || eval(f.children[1], env);
      default: break;
    }
    // Quantifiers: count satisfying tuples, stopping once the answer is known.
    std::size_t count = 0;
    bool all = true;
    const std::size_t stop = f.kind == K::at_least ? static_cast<std::size_t>(f.count)
                             : f.kind == K::exists ? 1
                                                   : static_cast<std::size_t>(f.count) + 1;
    struct Done {};
    try {
      assign(f.vars, 0, env, f.children[0], [&](QEnv& e) {
        if (eval(f.children[0], e)) {
          ++count;
          if (f.kind != K::forall && count >= stop) throw Done{};
        } else if (f.kind == K::forall) {
          all = false;
          throw Done{};
        }
      });
    } catch (const Done&) {
    }
    switch (f.kind) {
      case K::forall: return all;
      case K::exists: return count >= 1;
      case K::at_least: return count >= static_cast<std::size_t>(f.count);
      case K::at_most: return count <= static_cast<std::size_t>(f.count);
      default: return count == static_cast<std::size_t>(f.count);
    }
  }

  // ---- query route -------------------------------------------------------

  bool is_bound(const std::string& name, const QEnv& env, const Formula& scope) const {
    return uses_as_set(scope, name) ? env.sets.count(name) > 0 : env.obj.count(name) > 0;
  }

  bool bound(const ObjectTerm& t, const QEnv& env) const {
    std::set<std::string> vs;
    term_vars(t, vs);
    for (const std::string& s : t.sets) {
      if (!env.sets.count(s)) return false;
    }
    return std::all_of(vs.begin(), vs.end(), [&](const std::string& v) { return env.obj.count(v) > 0; });
  }

  std::vector<std::string> unbound_free(const Formula& f, const QEnv& env) const {
    const FreeVars fv = free_vars(f);
    std::vector<std::string> out;
    for (const std::string& v : fv.objects) {
      if (!env.obj.count(v)) out.push_back(v);
    }
    for (const std::string& s : fv.sets) {
      if (!env.sets.count(s)) out.push_back(s);
    }
    return out;
  }

  /// Binds the unbound free variables by enumeration, then tests directly.
  void filter(const Formula& f, QEnv& env, const std::function<void(QEnv&)>& k) const {
    assign(unbound_free(f, env), 0, env, f, [&](QEnv& e) {
      if (eval(f, e)) k(e);
    });
  }

  bool generates(const Formula& f, const QEnv& env) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::atom:
        switch (f.atom.kind) {
          case Atom::Kind::relational: return true;
          case Atom::Kind::set_member: return env.sets.count(f.atom.sets[0]) > 0;
          case Atom::Kind::equality:
            if (f.atom.negated) return false;
            for (int side = 0; side < 2; ++side) {
              const ObjectTerm& l = f.atom.args[side];
              if (l.is_var() && !env.obj.count(l.name) && bound(f.atom.args[1 - side], env)) return true;
            }
            return false;
          default: return false;
        }
      case K::conjunction:
      case K::exists:
        return true;
      case K::disjunction:
        return std::all_of(f.children.begin(), f.children.end(), [&](const Formula& c) { return generates(c, env); });
      case K::at_least: return f.count >= 1;
      default: return false;
    }
  }

  void unify_bind(const ObjectTerm& t, const Term& value, QEnv& env, std::vector<std::string>& undo, bool& ok) const {
    if (!ok) return;
    if (t.is_var() && !env.obj.count(t.name)) {
      env.obj[t.name] = value;
      undo.push_back(t.name);
      return;
    }
    auto v = term(t, env);
    ok = v && *v == value;
  }

  void generate_relational(const Atom& a, QEnv& env, const std::function<void(QEnv&)>& k) const {
    // Terms that cannot be unified by binding need their variables first.
    auto simple = [&](const ObjectTerm& t) { return t.is_var() || bound(t, env); };
    bool ok = simple(a.pred) && std::all_of(a.args.begin(), a.args.end(), simple);
    if (ok && a.set && a.set->kind == SetTerm::Kind::explicit_pairs) {
      for (const auto& [kt, vt] : a.set->pairs) ok = ok && simple(kt) && simple(vt);
    }
    if (!ok) {
      Formula f;
      f.atom = a;
      filter(f, env, k);
      return;
    }
    for (FactId id : candidates(a, env)) {
      const Fact& fact = interp_.store().fact(id);
      if (fact.args.size() != a.args.size()) continue;
      std::vector<std::string> undo;
      bool match = true;
      unify_bind(a.pred, fact.predicate, env, undo, match);
      for (std::size_t i = 0; i < a.args.size(); ++i) unify_bind(a.args[i], fact.args[i], env, undo, match);
      if (match) {
        if (!a.set) {
          k(env);
        } else if (a.set->kind == SetTerm::Kind::variable) {
          auto it = env.sets.find(a.set->var);
          if (it == env.sets.end()) {
            env.sets[a.set->var] = &fact.attrs;
            k(env);
            env.sets.erase(a.set->var);
          } else if (*it->second == fact.attrs) {
            k(env);
          }
        } else {
          pairs(a.set->pairs, 0, fact.attrs, env, k);
        }
      }
      for (const std::string& v : undo) env.obj.erase(v);
    }
  }

  void pairs(const std::vector<AttrPair>& ps, std::size_t i, const AttributeSet& attrs, QEnv& env,
             const std::function<void(QEnv&)>& k) const {
    if (i == ps.size()) {
      k(env);
      return;
    }
    for (const auto& [key, vals] : attrs) {
      for (const Term& v : vals) {
        std::vector<std::string> undo;
        bool ok = true;
        unify_bind(ps[i].first, key, env, undo, ok);
        unify_bind(ps[i].second, v, env, undo, ok);
        if (ok) pairs(ps, i + 1, attrs, env, k);
        for (const std::string& u : undo) env.obj.erase(u);
      }
    }
  }

  /// Projects `env` by restoring the outer bindings of `vars`.
  static QEnv project(const QEnv& env, const std::vector<std::string>& vars, const QEnv& outer) {
    QEnv p = env;
    for (const std::string& v : vars) {
      p.obj.erase(v);
      p.sets.erase(v);
      if (auto it = outer.obj.find(v); it != outer.obj.end()) p.obj[v] = it->second;
      if (auto it = outer.sets.find(v); it != outer.sets.end()) p.sets[v] = it->second;
    }
    return p;
  }

  void solve(const Formula& f, QEnv& env, const std::function<void(QEnv&)>& k) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::atom:
        if (f.atom.kind == Atom::Kind::relational) {
          generate_relational(f.atom, env, k);
          return;
        }
        if (f.atom.kind == Atom::Kind::set_member && env.sets.count(f.atom.sets[0])) {
          pairs({{f.atom.args[0], f.atom.args[1]}}, 0, set(f.atom.sets[0], env), env, k);
          return;
        }
        if (f.atom.kind == Atom::Kind::equality && !f.atom.negated) {
          for (int side = 0; side < 2; ++side) {
            const ObjectTerm& l = f.atom.args[side];
            if (l.is_var() && !env.obj.count(l.name) && bound(f.atom.args[1 - side], env)) {
              auto v = term(f.atom.args[1 - side], env);
              if (!v) return;
              env.obj[l.name] = *v;
              k(env);
              env.obj.erase(l.name);
              return;
            }
          }
        }
        filter(f, env, k);
        return;
      case K::conjunction: {
        std::vector<bool> done(f.children.size(), false);
        conj(f, done, f.children.size(), env, k);
        return;
      }
      case K::disjunction:
        for (const Formula& c : f.children) solve(c, env, k);
        return;
      case K::exists: {
        std::set<QEnv, EnvLess> seen;
        const QEnv outer = env;
        QEnv inner = env;
        for (const std::string& v : f.vars) {
          inner.obj.erase(v);
          inner.sets.erase(v);
        }
        solve(f.children[0], inner, [&](QEnv& e) { seen.insert(project(e, f.vars, outer)); });
        for (const QEnv& p : seen) {
          QEnv e = p;
          k(e);
        }
        return;
      }
      case K::at_least: {
        if (f.count < 1) {
          k(env);
          return;
        }
        std::map<QEnv, std::set<QEnv, EnvLess>, EnvLess> groups;
        const QEnv outer = env;
        QEnv inner = env;
        for (const std::string& v : f.vars) {
          inner.obj.erase(v);
          inner.sets.erase(v);
        }
        solve(f.children[0], inner, [&](QEnv& e) {
          // Counting needs every variable bound, not only the generated ones.
          assign(unbound_free(f.children[0], e), 0, e, f.children[0], [&](QEnv& full) {
            QEnv tuple;
            for (const std::string& v : f.vars) {
              if (auto it = full.obj.find(v); it != full.obj.end()) tuple.obj[v] = it->second;
              if (auto it = full.sets.find(v); it != full.sets.end()) tuple.sets[v] = it->second;
            }
            groups[project(full, f.vars, outer)].insert(std::move(tuple));
          });
        });
        for (const auto& [p, tuples] : groups) {
          if (tuples.size() >= static_cast<std::size_t>(f.count)) {
            QEnv e = p;
            k(e);
          }
        }
        return;
      }
      default:
        filter(f, env, k);
        return;
    }
  }

  void conj(const Formula& f, std::vector<bool>& done, std::size_t left, QEnv& env,
            const std::function<void(QEnv&)>& k) const {
    if (left == 0) {
      k(env);
      return;
    }
    std::size_t pick = f.children.size();
    for (std::size_t i = 0; i < f.children.size() && pick == f.children.size(); ++i) {
      if (!done[i] && unbound_free(f.children[i], env).empty()) pick = i;
    }
    for (std::size_t i = 0; i < f.children.size() && pick == f.children.size(); ++i) {
      if (!done[i] && generates(f.children[i], env)) pick = i;
    }
    for (std::size_t i = 0; i < f.children.size() && pick == f.children.size(); ++i) {
      if (!done[i]) pick = i;
    }
    done[pick] = true;
    solve(f.children[pick], env, [&](QEnv& e) { conj(f, done, left - 1, e, k); });
    done[pick] = false;
  }

 private:
  const Interpretation& interp_;
  std::vector<Term> domain_;
};

void collect_witness_atoms(const Formula& f, const std::set<std::string>& params, std::vector<const Atom*>& out) {
  if (f.kind == Formula::Kind::atom) {
    if (f.atom.kind != Atom::Kind::relational) return;
    std::set<std::string> vs;
    atom_vars(f.atom, vs);
    if (std::includes(params.begin(), params.end(), vs.begin(), vs.end()) &&
        (!f.atom.set || f.atom.set->kind == SetTerm::Kind::explicit_pairs)) {
      out.push_back(&f.atom);
    }
    return;
  }
  if (f.is_quantifier()) return;
  for (const Formula& c : f.children) collect_witness_atoms(c, params, out);
}

std::vector<Violation> finish(const Interpretation& interp, const Constraint& c, const std::vector<std::string>& params,
                              const Formula& matrix, const Evaluator& ev,
                              const std::set<std::vector<Term>, std::function<bool(const std::vector<Term>&, const std::vector<Term>&)>>& found) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < params.size(); ++i) index[params[i]] = i;

  auto tuple_less = [](const std::vector<Term>& a, const std::vector<Term>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), TermLess{});
  };
  // Orbits under swapping the symmetric groups: keep the member whose group
  // tuples are in canonical order, or the smallest member.
  std::vector<std::vector<Term>> kept;
  if (c.symmetric.empty()) {
    kept.assign(found.begin(), found.end());
  } else {
    std::map<std::vector<Term>, std::vector<Term>, decltype(tuple_less)> orbit(tuple_less);
    for (const std::vector<Term>& b : found) {
      std::vector<std::vector<Term>> groups;
      for (const auto& g : c.symmetric) {
        std::vector<Term> t;
        for (const std::string& v : g) t.push_back(b[index.at(v)]);
        groups.push_back(std::move(t));
      }
      std::sort(groups.begin(), groups.end(), tuple_less);
      std::vector<Term> canon = b;
      for (std::size_t gi = 0; gi < c.symmetric.size(); ++gi) {
        for (std::size_t vi = 0; vi < c.symmetric[gi].size(); ++vi) canon[index.at(c.symmetric[gi][vi])] = groups[gi][vi];
      }
      auto [it, fresh] = orbit.emplace(canon, b);
      if (!fresh && (b == canon || (it->second != canon && tuple_less(b, it->second)))) it->second = b;
    }
    for (auto& [canon, b] : orbit) kept.push_back(b);
    std::sort(kept.begin(), kept.end(), tuple_less);
  }

  std::vector<const Atom*> witness_atoms;
  collect_witness_atoms(matrix, {params.begin(), params.end()}, witness_atoms);

  std::vector<Violation> out;
  for (const std::vector<Term>& b : kept) {
    Violation v;
    v.constraint = c.name;
    v.severity = c.severity;
    QEnv env;
    for (std::size_t i = 0; i < params.size(); ++i) {
      v.bindings.emplace_back(params[i], b[i]);
      env.obj[params[i]] = b[i];
    }
    std::set<Fact, FactLess> witnesses;
    for (const Atom* a : witness_atoms) {
      try {
        std::vector<Term> args;
        bool ok = true;
        for (const ObjectTerm& t : a->args) {
          auto x = ev.term(t, env);
          if (!x) ok = false;
          if (ok) args.push_back(*x);
        }
        auto p = ev.term(a->pred, env);
        if (!ok || !p) continue;
        for (FactId id : ev.candidates(*a, env)) {
          const Fact& f = interp.store().fact(id);
          if (Term(f.predicate) == *p && f.args == args && ev.set_term_holds(*a, f.attrs, env)) witnesses.insert(f);
        }
      } catch (const Error&) {
      }
    }
    v.witnesses.assign(witnesses.begin(), witnesses.end());
    out.push_back(std::move(v));
  }
  return out;
}

using TupleSet = std::set<std::vector<Term>, std::function<bool(const std::vector<Term>&, const std::vector<Term>&)>>;

TupleSet make_tuple_set() {
  return TupleSet([](const std::vector<Term>& a, const std::vector<Term>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), TermLess{});
  });
}

}  // namespace

bool eval_formula(const Interpretation& interp, const Formula& formula, const FormulaBindings& bindings) {
  const Evaluator ev(interp, formula);
  QEnv env;
  env.obj = bindings;
  return ev.eval(formula, env);
}

bool eval_formula(const Store& store, const Formula& formula, const FormulaBindings& bindings) {
  const Interpretation interp(store);
  return eval_formula(interp, formula, bindings);
}

Formula nnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  auto neg_atom = [](const Formula& a) {
    if (a.atom.kind == Atom::Kind::equality) {
      Formula e = a;
      e.atom.negated = !e.atom.negated;
      return e;
    }
    Formula n;
    n.kind = K::negation;
    n.children = {a};
    return n;
  };
  auto node = [](K kind, std::vector<Formula> children) {
    Formula n;
    n.kind = kind;
    n.children = std::move(children);
    return n;
  };
  auto quant = [](K kind, const Formula& q, Formula body, int count) {
    Formula n;
    n.kind = kind;
    n.vars = q.vars;
    n.count = count;
    n.children = {std::move(body)};
    return n;
  };
  switch (f.kind) {
    case K::atom: return negate ? neg_atom(f) : f;
    case K::negation: return nnf(f.children[0], !negate);
    case K::conjunction:
    case K::disjunction: {
      std::vector<Formula> cs;
      for (const Formula& c : f.children) cs.push_back(nnf(c, negate));
      const bool conj = (f.kind == K::conjunction) != negate;
      return node(conj ? K::conjunction : K::disjunction, std::move(cs));
    }
    case K::implication:
      if (negate) return node(K::conjunction, {nnf(f.children[0], false), nnf(f.children[1], true)});
      return node(K::disjunction, {nnf(f.children[0], true), nnf(f.children[1], false)});
    case K::forall: return quant(negate ? K::exists : K::forall, f, nnf(f.children[0], negate), 0);
    case K::exists: return quant(negate ? K::forall : K::exists, f, nnf(f.children[0], negate), 0);
    case K::at_least:
      if (!negate) return quant(K::at_least, f, nnf(f.children[0]), f.count);
      if (f.count <= 0) return node(K::disjunction, {});  // false
      return quant(K::at_most, f, nnf(f.children[0]), f.count - 1);
    case K::at_most:
      if (!negate) return quant(K::at_most, f, nnf(f.children[0]), f.count);
      return quant(K::at_least, f, nnf(f.children[0]), f.count + 1);
    case K::exactly: {
      if (!negate) return quant(K::exactly, f, nnf(f.children[0]), f.count);
      Formula more = quant(K::at_least, f, nnf(f.children[0]), f.count + 1);
      if (f.count == 0) return more;
      return node(K::disjunction, {quant(K::at_most, f, nnf(f.children[0]), f.count - 1), std::move(more)});
    }
  }
  return f;
}

std::vector<std::string> violation_params(const Constraint& c, Formula* matrix) {
  std::vector<std::string> params = c.params;
  Formula body = c.formula;
  if (params.empty()) {
    while (body.kind == Formula::Kind::forall) {
      for (const std::string& v : body.vars) {
        if (uses_as_set(body.children[0], v)) {
          throw CompileError("constraint " + c.name + ": set variable " + v + " cannot be a reported parameter");
        }
        params.push_back(v);
      }
      Formula inner = body.children[0];
      body = std::move(inner);
    }
  }
  const FreeVars fv = free_vars(body);
  std::vector<std::string> undeclared;
  for (const std::string& v : fv.objects) {
    if (std::find(params.begin(), params.end(), v) == params.end()) undeclared.push_back("?" + v);
  }
  for (const std::string& s : fv.sets) undeclared.push_back(s);
  if (!undeclared.empty()) {
    std::string list;
    for (const std::string& v : undeclared) list += (list.empty() ? "" : ", ") + v;
    throw CompileError("constraint " + c.name + " has free variables not among its parameters: " + list);
  }
  for (const auto& g : c.symmetric) {
    for (const std::string& v : g) {
      if (std::find(params.begin(), params.end(), v) == params.end()) {
        throw CompileError("constraint " + c.name + ": symmetric group names unknown parameter " + v);
      }
    }
  }
  if (matrix) *matrix = std::move(body);
  return params;
}

std::vector<Violation> find_violations(const Interpretation& interp, const Constraint& c) {
  Formula matrix;
  const std::vector<std::string> params = violation_params(c, &matrix);
  const Evaluator ev(interp, matrix);
  const Formula query = nnf(matrix, true);
  TupleSet found = make_tuple_set();
  QEnv env;
  ev.solve(query, env, [&](QEnv& e) {
    ev.assign(ev.unbound_free(query, e), 0, e, query, [&](QEnv& full) {
      std::vector<Term> tuple;
      bool complete = true;
      for (const std::string& p : params) {
        auto it = full.obj.find(p);
        if (it == full.obj.end()) {
          complete = false;
          break;
        }
        tuple.push_back(it->second);
      }
      if (complete) {
        found.insert(std::move(tuple));
        return;
      }
      // Parameters the negation does not mention range over the domain.
      std::vector<std::string> rest;
      for (const std::string& p : params) {
        if (!full.obj.count(p)) rest.push_back(p);
      }
      ev.assign(rest, 0, full, query, [&](QEnv& all) {
        std::vector<Term> t;
        for (const std::string& p : params) t.push_back(all.obj.at(p));
        found.insert(std::move(t));
      });
    });
  });
  return finish(interp, c, params, matrix, ev, found);
}

std::vector<Violation> find_violations(const Store& store, const Constraint& c, const CheckOptions& options) {
  const Interpretation interp(store, options);
  return find_violations(interp, c);
}

std::vector<Violation> find_violations_brute(const Interpretation& interp, const Constraint& c) {
  Formula matrix;
  const std::vector<std::string> params = violation_params(c, &matrix);
  const Evaluator ev(interp, matrix);
  TupleSet found = make_tuple_set();
  QEnv env;
  Formula scope = matrix;
  ev.assign(params, 0, env, scope, [&](QEnv& e) {
    if (!ev.eval(matrix, e)) {
      std::vector<Term> t;
      for (const std::string& p : params) t.push_back(e.obj.at(p));
      found.insert(std::move(t));
    }
  });
  return finish(interp, c, params, matrix, ev, found);
}

const char* builtin_constraints_source() {
  return R"(% Property-constraint templates; each applies to the properties carrying
% the matching property_constraint statement.
constraint distinct_values(p, s1, o1, s2, o2) symmetric (s1, o1) (s2, o2) :
  property_constraint(p, distinct_values_constraint) and p(s1, o1) and p(s2, o2) and s1 != s2 -> o1 != o2.
constraint symmetric(p, x, y) :
  property_constraint(p, symmetric_constraint) and p(x, y) -> p(y, x).
constraint single_value(p, s) :
  property_constraint(p, single_value_constraint) -> exists<=1 o . p(s, o).
)";
}

std::vector<Constraint> builtin_constraints() { return parse_program(builtin_constraints_source()).constraints; }

std::vector<Constraint> active_builtins(const Store& store) {
  static const std::map<std::string, EntityRef> kTypes = {
      {"distinct_values", EntityRef::item("Q21502410")},
      {"symmetric", EntityRef::item("Q21510862")},
      {"single_value", EntityRef::item("Q19474404")},
  };
  const EntityRef pc = EntityRef::property("P2302");
  std::vector<Constraint> out;
  for (Constraint& c : builtin_constraints()) {
    const EntityRef& type = kTypes.at(c.name);
    const bool active = std::any_of(store.by_predicate(pc).begin(), store.by_predicate(pc).end(), [&](FactId id) {
      const Fact& f = store.fact(id);
      return f.args.size() == 2 && f.args[1] == Term(type);
    });
    if (active) out.push_back(std::move(c));
  }
  return out;
}

std::vector<Constraint> typing_constraints(const wikidata::PropertyRegistry& registry) {
  std::vector<Constraint> out;
  for (const auto& [property, datatype] : registry) {
    Constraint c;
    c.name = "value_type_" + property.id;
    c.params = {"s", "o"};
    Formula body;
    body.atom.kind = Atom::Kind::relational;
    body.atom.pred = ObjectTerm::of(property);
    body.atom.args = {ObjectTerm::var("s"), ObjectTerm::var("o")};
    Formula head;
    head.atom.kind = Atom::Kind::datatype_rel;
    head.atom.rel = std::string(datatype_name(datatype));
    head.atom.args = {ObjectTerm::var("o")};
    c.formula.kind = Formula::Kind::implication;
    c.formula.children = {std::move(body), std::move(head)};
    out.push_back(std::move(c));
  }
  return out;
}

CheckReport check(const Store& store, const std::vector<Constraint>& constraints, const CheckOptions& options) {
  CheckReport report;
  report.constraints = constraints.size();
  if (!store.closed()) report.warnings.push_back("store is not marked closed; constraints see only asserted facts");
  const Interpretation interp(store, options);
  const std::int64_t n = static_cast<std::int64_t>(constraints.size());
  std::vector<std::vector<Violation>> results(constraints.size());
  std::vector<std::exception_ptr> errors(constraints.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      results[i] = find_violations(interp, constraints[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const CompileError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError("constraint " + constraints[i].name + ": " + e.what());
    }
  }
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(report.violations));
  return report;
}

nlohmann::json violation_to_json(const Violation& v) {
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [name, t] : v.bindings) bindings[name] = term_to_json(t);
  nlohmann::json witnesses = nlohmann::json::array();
  for (const Fact& f : v.witnesses) witnesses.push_back(fact_to_json(f));
  return {{"constraint", v.constraint},
          {"severity", v.severity == Constraint::Severity::warning ? "warning" : "violation"},
          {"bindings", bindings},
          {"witnesses", witnesses}};
}

void write_violations_jsonl(std::ostream& out, const CheckReport& report) {
  for (const Violation& v : report.violations) out << violation_to_json(v).dump() << '\n';
}

void write_violations_table(std::ostream& out, const CheckReport& report) {
  std::vector<std::array<std::string, 3>> rows;
  rows.push_back({"CONSTRAINT", "SEVERITY", "BINDINGS"});
  for (const Violation& v : report.violations) {
    std::string b;
    for (const auto& [name, t] : v.bindings) b += (b.empty() ? "" : ", ") + name + "=" + format_term(t);
    rows.push_back({v.constraint, v.severity == Constraint::Severity::warning ? "warning" : "violation", b});
  }
  std::size_t w0 = 0;
  std::size_t w1 = 0;
  for (const auto& r : rows) {
    w0 = std::max(w0, r[0].size());
    w1 = std::max(w1, r[1].size());
  }
  for (const auto& r : rows) {
    out << r[0] << std::string(w0 - r[0].size() + 2, ' ') << r[1] << std::string(w1 - r[1].size() + 2, ' ') << r[2]
        << '\n';
  }
  for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
  out << report.violations.size() << " finding(s) over " << report.constraints << " constraint(s)\n";
}

}  // namespace emars
