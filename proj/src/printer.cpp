#include "emars/printer.hpp"

namespace emars::lang {

namespace {

template <class T, class F>
std::string join(const std::vector<T>& xs, const char* sep, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += f(xs[i]);
  }
  return out;
}

std::string plain(const std::string& s) { return s; }

std::string print_pair(const AttrPair& p) { return print(p.first) + " : " + print(p.second); }

std::string print_child(const Formula& f) {
  if (f.kind == Formula::Kind::atom) return print(f);
  return "(" + print(f) + ")";
}

}  // namespace

std::string print(const ObjectTerm& t) {
  switch (t.kind) {
    case ObjectTerm::Kind::constant: return format_term(t.constant);
    case ObjectTerm::Kind::variable: return "?" + t.name;
    case ObjectTerm::Kind::fn_app:
      return t.name + "(" + join(t.args, ", ", [](const ObjectTerm& a) { return print(a); }) + ")";
    case ObjectTerm::Kind::fold:
      return "fold(" + t.name + ", " + t.attr.str() + ", " + join(t.sets, ", ", plain) + ")";
  }
  return "?";
}

std::string print(const SetTerm& s) {
  if (s.kind == SetTerm::Kind::variable) return s.var;
  return "{" + join(s.pairs, ", ", print_pair) + "}";
}

std::string print(const Atom& a) {
  auto args = [&] { return join(a.args, ", ", [](const ObjectTerm& t) { return print(t); }); };
  switch (a.kind) {
    case Atom::Kind::relational: {
      std::string out = print(a.pred) + "(" + args() + ")";
      if (a.set) out += "@" + print(*a.set);
      return out;
    }
    case Atom::Kind::set_member:
      return "(" + print(a.args[0]) + " : " + print(a.args[1]) + ") in " + a.sets[0];
    case Atom::Kind::datatype_rel: return a.rel + "(" + args() + ")";
    case Atom::Kind::equality: return print(a.args[0]) + (a.negated ? " != " : " = ") + print(a.args[1]);
    case Atom::Kind::absent: return "absent(" + a.attr.str() + ", " + join(a.sets, ", ", plain) + ")";
    case Atom::Kind::same_set: return "sameset(" + a.sets[0] + ", " + a.sets[1] + ")";
  }
  return "?";
}

std::string print(const Rule& r) {
  std::string out;
  if (!r.label.empty()) out += "[" + r.label + "] ";
  if (!r.body.empty()) out += join(r.body, ", ", [](const Atom& a) { return print(a); }) + " ";
  out += "-> " + print(r.head);
  if (r.fn) {
    out += " with " + r.fn->name;
    if (!r.fn->args.empty()) out += "(" + join(r.fn->args, ", ", plain) + ")";
  }
  return out + ".";
}

std::string print(const FunctionDef& f) {
  std::string out = "function " + f.name + "(" + join(f.params, ", ", plain) + ") {";
  for (const FunctionClause& c : f.clauses) {
    out += "\n  ";
    if (!c.conditions.empty()) out += join(c.conditions, ", ", [](const Atom& a) { return print(a); }) + " ";
    out += "=> " + join(c.outputs, ", ", print_pair) + ";";
  }
  return out + "\n}";
}

std::string print(const Characterization& c) {
  std::string out = "qualifier " + c.attr.str();
  if (c.datatype) out += " : " + std::string(datatype_name(*c.datatype));
  switch (c.kind) {
    case Characterization::Kind::ignore: out += " ignore"; break;
    case Characterization::Kind::additive: out += " additive"; break;
    case Characterization::Kind::combine: out += " combine fn=" + c.fn; break;
    case Characterization::Kind::blend:
      out += " blend combine(" + join(c.inputs, ", ", [](const auto& in) { return in.first.str() + "=" + in.second; }) +
             ") fn=" + c.fn;
      break;
  }
  if (!c.guard.empty()) out += " guard=" + c.guard;
  return out + ".";
}

std::string print(const PropertyDecl& p) {
  return "property " + p.property.str() + " : " + std::string(datatype_name(p.datatype)) + ".";
}

std::string print(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::atom: return print(f.atom);
    case K::negation: return "not " + print_child(f.children[0]);
    case K::conjunction: return join(f.children, " and ", print_child);
    case K::disjunction: return join(f.children, " or ", print_child);
    case K::implication: return print_child(f.children[0]) + " -> " + print_child(f.children[1]);
    default: break;
  }
  std::string q;
  switch (f.kind) {
    case K::forall: q = "forall"; break;
    case K::exists: q = "exists"; break;
    case K::at_least: q = "exists>=" + std::to_string(f.count); break;
    case K::at_most: q = "exists<=" + std::to_string(f.count); break;
    default: q = "exists=" + std::to_string(f.count); break;
  }
  return q + " " + join(f.vars, ", ", [](const std::string& v) { return "?" + v; }) + " . " +
         print_child(f.children[0]);
}

std::string print(const Constraint& c) {
  std::string out = "constraint " + c.name;
  if (!c.params.empty()) out += "(" + join(c.params, ", ", [](const std::string& v) { return "?" + v; }) + ")";
  if (c.severity == Constraint::Severity::warning) out += " warning";
  if (!c.symmetric.empty()) {
    out += " symmetric";
    for (const auto& g : c.symmetric) {
      out += " (" + join(g, ", ", [](const std::string& v) { return "?" + v; }) + ")";
    }
  }
  return out + " : " + print(c.formula) + ".";
}

std::string print(const Program& p) {
  std::string out;
  for (const auto& x : p.properties) out += print(x) + "\n";
  for (const auto& x : p.characterizations) out += print(x) + "\n";
  for (const auto& x : p.functions) out += print(x) + "\n";
  for (const auto& x : p.rules) out += print(x) + "\n";
  for (const auto& x : p.constraints) out += print(x) + "\n";
  return out;
}

}  // namespace emars::lang
