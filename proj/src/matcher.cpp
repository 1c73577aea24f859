#include "emars/matcher.hpp"

#include <algorithm>

#include "emars/error.hpp"

namespace emars {

using lang::Atom;

namespace {

constexpr FactId kUnbound = std::numeric_limits<FactId>::max();

}  // namespace

std::optional<Term> Matcher::eval(const CTerm& t, const Env& env) const {
  switch (t.kind) {
    case CTerm::Kind::constant: return t.constant;
    case CTerm::Kind::var: return env.vars[t.var];
    case CTerm::Kind::fn: {
      std::vector<Term> args;
      args.reserve(t.args.size());
      for (const CTerm& a : t.args) {
        auto v = eval(a, env);
        if (!v) return std::nullopt;
        args.push_back(std::move(*v));
      }
      return t.fn->eval(args);
    }
    case CTerm::Kind::fold: {
      std::vector<Term> vals;
      for (int s : t.sets) {
        const AttributeSet& attrs = store_.fact(env.sets[s]).attrs;
        if (auto it = attrs.find(t.attr); it != attrs.end()) vals.insert(vals.end(), it->second.begin(), it->second.end());
      }
      if (vals.empty()) return std::nullopt;
      return fold_values(*t.fn, vals);
    }
  }
  return std::nullopt;
}

bool Matcher::unify(const CTerm& t, const Term& value, Env& env, std::vector<int>& undo) const {
  if (t.kind == CTerm::Kind::var && !env.vars[t.var]) {
    env.vars[t.var] = value;
    undo.push_back(t.var);
    return true;
  }
  auto v = eval(t, env);
  return v && *v == value;
}

bool Matcher::filter(const CAtom& a, const Env& env) const {
  switch (a.kind) {
    case Atom::Kind::equality: {
      auto l = eval(a.args[0], env);
      auto r = eval(a.args[1], env);
      if (!l || !r) return false;
      return (*l == *r) != a.negated;
    }
    case Atom::Kind::datatype_rel: {
      std::vector<Term> args;
      for (const CTerm& t : a.args) {
        auto v = eval(t, env);
        if (!v) return false;
        args.push_back(std::move(*v));
      }
      return a.rel->eval(args);
    }
    case Atom::Kind::absent:
      return std::none_of(a.sets.begin(), a.sets.end(),
                          [&](int s) { return store_.fact(env.sets[s]).attrs.count(a.attr) > 0; });
    case Atom::Kind::same_set:
      return store_.fact(env.sets[a.sets[0]]).attrs == store_.fact(env.sets[a.sets[1]]).attrs;
    default:
      return false;
  }
}

void Matcher::rethrow(const std::exception& e, const Env& env) const {
  std::string facts;
  for (FactId id : env.sets) {
    if (id == kUnbound) continue;
    facts += (facts.empty() ? "" : "; ") + format_fact(store_.fact(id));
  }
  throw EvaluationError("rule " + rule_.key + ": " + e.what() + (facts.empty() ? "" : " (matching " + facts + ")"));
}

void Matcher::run(std::span<const CAtom> steps, std::size_t i, Env& env, std::span<const AtomRange> ranges,
                  const std::function<void(Env&)>& emit) const {
  if (i == steps.size()) {
    emit(env);
    return;
  }
  const CAtom& a = steps[i];
  std::vector<int> undo;
  auto reset = [&] {
    for (int v : undo) env.vars[v].reset();
    undo.clear();
  };

  if (a.kind == Atom::Kind::relational) {
    const AtomRange& range = ranges[a.relational_index];
    std::optional<EntityRef> pred;
    if (auto p = eval(a.pred, env)) {
      const EntityRef* e = as_entity(*p);
      if (e == nullptr) return;  // a data value never names a predicate
      pred = *e;
    }
    auto try_fact = [&](FactId id) {
      const Fact& f = store_.fact(id);
      if (f.args.size() != a.args.size()) return;
      bool ok = unify(a.pred, f.predicate, env, undo);
      for (std::size_t k = 0; ok && k < a.args.size(); ++k) ok = unify(a.args[k], f.args[k], env, undo);
      if (ok) {
        env.sets[a.set] = id;
        run(steps, i + 1, env, ranges, emit);
        env.sets[a.set] = kUnbound;
      }
      reset();
    };
    if (range.only) {
      try_fact(*range.only);
      return;
    }
    std::span<const FactId> candidates;
    bool indexed = false;
    for (std::size_t k = 0; k < a.args.size() && !indexed; ++k) {
      auto t = eval(a.args[k], env);
      if (!t) continue;
      candidates = pred ? store_.by_arg(*pred, k, *t) : store_.by_any_arg(k, *t);
      indexed = true;
    }
    if (!indexed && pred) {
      candidates = store_.by_predicate(*pred);
      indexed = true;
    }
    const FactId end = std::min<FactId>(range.end, static_cast<FactId>(store_.size()));
    if (indexed) {
      auto it = std::lower_bound(candidates.begin(), candidates.end(), range.begin);
      for (; it != candidates.end() && *it < end; ++it) try_fact(*it);
    } else {
      for (FactId id = range.begin; id < end; ++id) try_fact(id);
    }
    return;
  }

  try {
    if (a.kind == Atom::Kind::set_member) {
      const AttributeSet& attrs = store_.fact(env.sets[a.set]).attrs;
      for (const auto& [k, vs] : attrs) {
        if (!unify(a.args[0], k, env, undo)) {
          reset();
          continue;
        }
        const std::size_t mark = undo.size();
        for (const Term& v : vs) {
          if (unify(a.args[1], v, env, undo)) run(steps, i + 1, env, ranges, emit);
          while (undo.size() > mark) {
            env.vars[undo.back()].reset();
            undo.pop_back();
          }
        }
        reset();
      }
      return;
    }
    if (a.mode == CAtom::Mode::assign) {
      auto v = eval(a.args[1 - a.assign_side], env);
      if (!v) return;
      const int slot = a.args[a.assign_side].var;
      env.vars[slot] = std::move(*v);
      run(steps, i + 1, env, ranges, emit);
      env.vars[slot].reset();
      return;
    }
    if (filter(a, env)) run(steps, i + 1, env, ranges, emit);
  } catch (const EvaluationError&) {
    throw;
  } catch (const Error& e) {
    rethrow(e, env);
  }
}

void Matcher::for_each_match(std::span<const AtomRange> ranges, const std::function<void(const Env&)>& emit) const {
  Env env;
  env.vars.assign(rule_.env_vars, std::nullopt);
  env.sets.assign(rule_.relational_count, kUnbound);
  run(rule_.steps, 0, env, ranges, [&](Env& e) { emit(e); });
}

std::vector<Term> Matcher::values(const EntityRef& attr, const Env& env) const {
  std::vector<Term> out;
  for (FactId id : env.sets) {
    const AttributeSet& attrs = store_.fact(id).attrs;
    if (auto it = attrs.find(attr); it != attrs.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

HeadOutcome Matcher::head(const Env& matched) const {
  HeadOutcome out;
  try {
    if (rule_.typing()) {
      out.fact.predicate = EntityRef::symbol(rule_.head.rel->name);
      for (const CTerm& t : rule_.head.args) out.fact.args.push_back(*eval(t, matched));
      out.kind = rule_.head.rel->eval(out.fact.args) ? HeadOutcome::Kind::typing_ok : HeadOutcome::Kind::typing_failed;
      return out;
    }

    Fact& f = out.fact;
    const Term pred = *eval(rule_.head.pred, matched);
    const EntityRef* p = as_entity(pred);
    if (p == nullptr) throw EvaluationError("head predicate " + format_term(pred) + " is not an entity");
    f.predicate = *p;
    for (const CTerm& t : rule_.head.args) f.args.push_back(*eval(t, matched));

    auto add = [&](const std::optional<Term>& k, std::optional<Term> v) {
      if (!k || !v) return;
      const EntityRef* attr = as_entity(*k);
      if (attr == nullptr) throw EvaluationError("attribute " + format_term(*k) + " is not an entity");
      f.attrs[*attr].insert(std::move(*v));
    };

    if (rule_.head_copy_set >= 0) f.attrs = store_.fact(matched.sets[rule_.head_copy_set]).attrs;
    for (const auto& [k, v] : rule_.head_pairs) add(eval(k, matched), eval(v, matched));

    if (!rule_.clauses.empty()) {
      Env env = matched;
      for (const CClause& c : rule_.clauses) {
        run(c.conditions, 0, env, {}, [&](Env& e) {
          for (const auto& [k, v] : c.outputs) add(eval(k, e), eval(v, e));
        });
      }
    }

    for (const Handler& h : rule_.handlers) {
      using K = lang::Characterization::Kind;
      switch (h.kind) {
        case K::ignore:
          break;
        case K::additive:
          for (Term& v : values(h.attr, matched)) f.attrs[h.attr].insert(std::move(v));
          break;
        case K::combine: {
          const std::vector<Term> vals = values(h.attr, matched);
          if (vals.empty()) break;
          Term z = fold_values(*h.fn, vals);
          if (h.guard && !h.guard->eval(std::span<const Term>(&z, 1))) return out;
          f.attrs[h.attr].insert(std::move(z));
          break;
        }
        case K::blend: {
          const std::vector<Term> self = values(h.attr, matched);
          if (self.empty()) break;
          std::vector<Term> z(h.inputs.size());
          z[h.self] = fold_values(*h.inputs[h.self].second, self);
          bool complete = true;
          for (std::size_t k = 0; k < h.inputs.size() && complete; ++k) {
            if (k == h.self) continue;
            const std::vector<Term> vals = values(h.inputs[k].first, matched);
            if (vals.empty()) {
              complete = false;
            } else {
              z[k] = fold_values(*h.inputs[k].second, vals);
            }
          }
          if (!complete) {
            f.attrs[h.attr].insert(z[h.self]);
            break;
          }
          if (h.guard && !h.guard->eval(z)) return out;
          f.attrs[h.attr].insert(h.fn->eval(z));
          break;
        }
      }
    }
    out.kind = HeadOutcome::Kind::fact;
  } catch (const EvaluationError&) {
    throw;
  } catch (const Error& e) {
    rethrow(e, matched);
  }
  return out;
}

}  // namespace emars
