#include "emars/analysis.hpp"

#include <algorithm>

namespace emars::lang {

void term_vars(const ObjectTerm& t, std::set<std::string>& out) {
  if (t.kind == ObjectTerm::Kind::variable) out.insert(t.name);
  for (const ObjectTerm& a : t.args) term_vars(a, out);
}

void atom_vars(const Atom& a, std::set<std::string>& out) {
  if (a.kind == Atom::Kind::relational) term_vars(a.pred, out);
  for (const ObjectTerm& t : a.args) term_vars(t, out);
  if (a.set && a.set->kind == SetTerm::Kind::explicit_pairs) {
    for (const auto& [k, v] : a.set->pairs) {
      term_vars(k, out);
      term_vars(v, out);
    }
  }
}

namespace {

bool has_fn(const ObjectTerm& t) {
  return t.kind == ObjectTerm::Kind::fn_app || t.kind == ObjectTerm::Kind::fold;
}

void collect_fn_args(const ObjectTerm& t, std::vector<std::string>& out) {
  if (t.kind == ObjectTerm::Kind::fn_app) {
    for (const ObjectTerm& a : t.args) {
      std::set<std::string> vs;
      term_vars(a, vs);
      out.insert(out.end(), vs.begin(), vs.end());
    }
  }
  for (const ObjectTerm& a : t.args) collect_fn_args(a, out);
}

void collect_set_refs(const ObjectTerm& t, std::vector<std::string>& out) {
  if (t.kind == ObjectTerm::Kind::fold) out.insert(out.end(), t.sets.begin(), t.sets.end());
  for (const ObjectTerm& a : t.args) collect_set_refs(a, out);
}

}  // namespace

std::vector<SafetyViolation> check_safety(const Rule& rule) {
  std::set<std::string> relational;
  std::set<std::string> body_sets;
  for (const Atom& a : rule.body) {
    if (a.kind == Atom::Kind::relational) {
      atom_vars(a, relational);
      if (a.set && a.set->kind == SetTerm::Kind::variable) body_sets.insert(a.set->var);
    } else if (a.kind == Atom::Kind::set_member) {
      for (const ObjectTerm& t : a.args) {
        if (t.is_var()) relational.insert(t.name);
      }
    }
  }

  // Equalities bind a fresh variable once the other side is known.
  std::set<std::string> bound = relational;
  std::set<std::string> computed;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Atom& a : rule.body) {
      if (a.kind != Atom::Kind::equality || a.negated) continue;
      for (int side = 0; side < 2; ++side) {
        const ObjectTerm& lhs = a.args[side];
        const ObjectTerm& rhs = a.args[1 - side];
        if (!lhs.is_var() || bound.count(lhs.name) || computed.count(lhs.name)) continue;
        std::set<std::string> need;
        term_vars(rhs, need);
        const bool ready = std::all_of(need.begin(), need.end(),
                                       [&](const std::string& v) { return bound.count(v) || computed.count(v); });
        if (!ready) continue;
        (has_fn(rhs) ? computed : bound).insert(lhs.name);
        changed = true;
      }
    }
  }
  auto known = [&](const std::string& v) { return bound.count(v) || computed.count(v); };

  std::vector<SafetyViolation> out;
  std::set<std::string> reported;
  auto report = [&](const std::string& v, const char* where, const SourceSpan& span) {
    if (reported.insert(v).second) out.push_back({v, where, span});
  };
  auto check_known = [&](const std::vector<std::string>& vars, const char* where, const SourceSpan& span) {
    for (const std::string& v : vars) {
      if (!known(v)) report(v, where, span);
    }
  };
  auto vars_of = [](const ObjectTerm& t) {
    std::set<std::string> s;
    term_vars(t, s);
    return std::vector<std::string>(s.begin(), s.end());
  };
  auto check_set = [&](const std::string& s, const SourceSpan& span) {
    if (!body_sets.count(s)) report(s, "set variable", span);
  };

  auto check_atom = [&](const Atom& a, bool in_head) {
    std::vector<std::string> fn_args;
    std::vector<std::string> set_refs;
    for (const ObjectTerm& t : a.args) {
      collect_fn_args(t, fn_args);
      collect_set_refs(t, set_refs);
    }
    if (a.set && a.set->kind == SetTerm::Kind::explicit_pairs) {
      for (const auto& [k, v] : a.set->pairs) {
        for (const ObjectTerm* t : {&k, &v}) {
          collect_fn_args(*t, fn_args);
          collect_set_refs(*t, set_refs);
        }
      }
    }
    check_known(fn_args, "function application", a.span);
    for (const std::string& s : set_refs) check_set(s, a.span);

    switch (a.kind) {
      case Atom::Kind::relational:
        if (in_head) {
          std::vector<std::string> arg_vars = vars_of(a.pred);
          for (const ObjectTerm& t : a.args) {
            auto vs = vars_of(t);
            arg_vars.insert(arg_vars.end(), vs.begin(), vs.end());
          }
          for (const std::string& v : arg_vars) {
            if (!bound.count(v)) report(v, "head", a.span);
          }
          if (a.set) {
            if (a.set->kind == SetTerm::Kind::variable) {
              check_set(a.set->var, a.span);
            } else {
              for (const auto& [k, v] : a.set->pairs) {
                check_known(vars_of(k), "head", a.span);
                check_known(vars_of(v), "head", a.span);
              }
            }
          }
        }
        break;
      case Atom::Kind::datatype_rel:
        for (const ObjectTerm& t : a.args) check_known(vars_of(t), in_head ? "head" : "datatype atom", a.span);
        break;
      case Atom::Kind::equality:
        for (const ObjectTerm& t : a.args) check_known(vars_of(t), "equality", a.span);
        break;
      case Atom::Kind::set_member:
      case Atom::Kind::absent:
      case Atom::Kind::same_set:
        for (const std::string& s : a.sets) check_set(s, a.span);
        break;
    }
  };

  for (const Atom& a : rule.body) check_atom(a, false);
  check_atom(rule.head, true);
  if (rule.fn) {
    for (const std::string& s : rule.fn->args) check_set(s, rule.span);
  }
  return out;
}

std::set<std::string> rule_names(const Rule& rule) {
  std::set<std::string> names;
  auto add_atom = [&](const Atom& a) {
    atom_vars(a, names);
    names.insert(a.sets.begin(), a.sets.end());
    if (a.set && a.set->kind == SetTerm::Kind::variable) names.insert(a.set->var);
  };
  for (const Atom& a : rule.body) add_atom(a);
  add_atom(rule.head);
  if (rule.fn) names.insert(rule.fn->args.begin(), rule.fn->args.end());
  return names;
}

std::string fresh_name(const std::string& prefix, std::set<std::string>& used) {
  for (int i = 1;; ++i) {
    std::string n = prefix + std::to_string(i);
    if (used.insert(n).second) return n;
  }
}

Rule normalize(const Rule& rule) {
  std::set<std::string> used = rule_names(rule);
  std::set<std::string> seen_sets;
  Rule out = rule;
  out.body.clear();
  for (const Atom& a : rule.body) {
    if (a.kind != Atom::Kind::relational) {
      out.body.push_back(a);
      continue;
    }
    Atom r = a;
    std::vector<Atom> extra;
    if (!a.set) {
      r.set = SetTerm::variable(fresh_name("_S", used));
    } else if (a.set->kind == SetTerm::Kind::explicit_pairs) {
      const std::string s = fresh_name("_S", used);
      r.set = SetTerm::variable(s);
      for (const auto& [k, v] : a.set->pairs) {
        Atom m;
        m.kind = Atom::Kind::set_member;
        m.args = {k, v};
        m.sets = {s};
        m.span = a.span;
        extra.push_back(std::move(m));
      }
    } else if (seen_sets.count(a.set->var)) {
      const std::string s = fresh_name("_S", used);
      Atom same;
      same.kind = Atom::Kind::same_set;
      same.sets = {a.set->var, s};
      same.span = a.span;
      r.set = SetTerm::variable(s);
      extra.push_back(std::move(same));
    }
    seen_sets.insert(r.set->var);
    out.body.push_back(std::move(r));
    for (Atom& e : extra) out.body.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> body_set_vars(const Rule& rule) {
  std::vector<std::string> out;
  for (const Atom& a : rule.body) {
    if (a.kind == Atom::Kind::relational && a.set && a.set->kind == SetTerm::Kind::variable) out.push_back(a.set->var);
  }
  return out;
}

namespace {

void formula_free(const Formula& f, std::set<std::string>& objects, std::set<std::string>& sets) {
  if (f.kind == Formula::Kind::atom) {
    atom_vars(f.atom, objects);
    for (const std::string& s : f.atom.sets) sets.insert(s);
    if (f.atom.set && f.atom.set->kind == SetTerm::Kind::variable) sets.insert(f.atom.set->var);
    for (const ObjectTerm& t : f.atom.args) {
      std::vector<std::string> refs;
      collect_set_refs(t, refs);
      sets.insert(refs.begin(), refs.end());
    }
    return;
  }
  std::set<std::string> o;
  std::set<std::string> s;
  for (const Formula& c : f.children) formula_free(c, o, s);
  for (const std::string& v : f.vars) {
    if (s.count(v)) {
      s.erase(v);
    } else {
      o.erase(v);
    }
  }
  objects.insert(o.begin(), o.end());
  sets.insert(s.begin(), s.end());
}

}  // namespace

FreeVars free_vars(const Formula& f) {
  FreeVars fv;
  formula_free(f, fv.objects, fv.sets);
  return fv;
}

}  // namespace emars::lang
