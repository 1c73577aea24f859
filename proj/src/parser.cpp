#include "emars/parser.hpp"

#include <set>

#include "emars/error.hpp"
#include "emars/lexer.hpp"
#include "emars/literal.hpp"
#include "emars/wikidata.hpp"

namespace emars::lang {

ParseOptions ParseOptions::wikidata() {
  ParseOptions o;
  for (const auto& [name, term] : wikidata::wikidata_aliases()) o.aliases.emplace(name, term);
  return o;
}

namespace {

const std::set<std::string, std::less<>> kReserved = {"and", "or", "not", "in", "with", "forall",
                                                      "exists", "fold", "absent", "sameset"};

void collect_vars(const ObjectTerm& t, std::set<std::string>& out) {
  if (t.kind == ObjectTerm::Kind::variable) out.insert(t.name);
  for (const ObjectTerm& a : t.args) collect_vars(a, out);
}

void collect_arg_vars(const Atom& a, std::set<std::string>& out) {
  for (const ObjectTerm& t : a.args) collect_vars(t, out);
  if (a.set && a.set->kind == SetTerm::Kind::explicit_pairs) {
    for (const auto& [k, v] : a.set->pairs) {
      collect_vars(k, out);
      collect_vars(v, out);
    }
  }
}

void collect_arg_vars(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::atom) collect_arg_vars(f.atom, out);
  out.insert(f.vars.begin(), f.vars.end());
  for (const Formula& c : f.children) collect_arg_vars(c, out);
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : toks_(tokenize(text)), theory_(*options.theory), aliases_(options.aliases) {}

  Program program() {
    Program p;
    while (!at(Tok::end)) statement(p);
    return p;
  }

  Formula formula_only() {
    bare_preds_.clear();
    Formula f = formula();
    if (at(Tok::dot)) next();
    expect(Tok::end, "end of formula");
    resolve_predicates(f);
    return f;
  }

  Atom atom_only() {
    bare_preds_.clear();
    Atom a = atom();
    if (at(Tok::dot)) next();
    expect(Tok::end, "end of atom");
    if (a.kind != Atom::Kind::relational) fail(toks_.front(), "expected a relational atom");
    std::set<std::string> vars;
    collect_arg_vars(a, vars);
    resolve_pred(a, vars);
    return a;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t, std::size_t k = 0) const { return peek(k).kind == t; }
  bool at_word(std::string_view w, std::size_t k = 0) const { return at(Tok::ident, k) && peek(k).text == w; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.column); }
  Token expect(Tok t, const char* what) {
    if (!at(t)) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
    next();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::ident || t.kind == Tok::number) return "'" + t.text + "'";
    if (t.kind == Tok::var) return "'?" + t.text + "'";
    return tok_name(t.kind);
  }
  static SourceSpan span_of(const Token& t) { return {t.line, t.column}; }

  std::string name(const char* what) {
    if (at(Tok::ident) || at(Tok::var)) return next().text;
    fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
  }

  std::vector<std::string> name_list(const char* what) {
    std::vector<std::string> out{name(what)};
    while (at(Tok::comma)) {
      next();
      out.push_back(name(what));
    }
    return out;
  }

  // Entity named by an identifier, alias, symbol or skolem.
  EntityRef entity(const char* what) {
    const Token t = peek();
    if (t.kind == Tok::symbol) {
      next();
      return EntityRef::symbol(t.text);
    }
    if (t.kind == Tok::skolem) {
      next();
      return *EntityRef::parse(t.text);
    }
    if (t.kind == Tok::ident) {
      next();
      if (auto it = aliases_.find(t.text); it != aliases_.end()) {
        if (const EntityRef* e = as_entity(it->second)) return *e;
        fail(t, "alias '" + t.text + "' does not name an entity");
      }
      if (auto e = EntityRef::parse(t.text)) return *e;
      fail(t, "'" + t.text + "' is not an entity id or alias");
    }
    fail(t, std::string("expected ") + what + ", found " + describe(t));
  }

  Datatype datatype() {
    const Token t = expect(Tok::ident, "datatype name");
    auto d = datatype_from_name(t.text);
    if (!d) fail(t, "unknown datatype '" + t.text + "'");
    return *d;
  }

  std::string function_name() {
    const Token t = expect(Tok::ident, "datatype function");
    if (theory_.function(t.text) == nullptr) fail(t, "unknown datatype function '" + t.text + "'");
    return t.text;
  }

  std::string relation_name() {
    const Token t = expect(Tok::ident, "datatype relation");
    if (theory_.relation(t.text) == nullptr) fail(t, "unknown datatype relation '" + t.text + "'");
    return t.text;
  }

  void statement(Program& p) {
    bare_preds_.clear();
    if (at_word("alias") && at(Tok::ident, 1)) return alias_decl();
    if (at_word("property") && !at(Tok::lparen, 1)) return p.properties.push_back(property_decl());
    if (at_word("qualifier") && !at(Tok::lparen, 1)) return p.characterizations.push_back(qualifier_decl());
    if (at_word("function") && at(Tok::ident, 1)) {
      FunctionDef f = function_def();
      for (const FunctionDef& g : p.functions) {
        if (g.name == f.name) throw ParseError("duplicate function '" + f.name + "'", f.span.line, f.span.column);
      }
      p.functions.push_back(std::move(f));
      return;
    }
    if (at_word("constraint") && at(Tok::ident, 1)) return p.constraints.push_back(constraint());
    p.rules.push_back(rule());
  }

  void alias_decl() {
    next();
    const Token n = expect(Tok::ident, "alias name");
    if (kReserved.count(n.text)) fail(n, "'" + n.text + "' is reserved");
    expect(Tok::eq, "'='");
    ObjectTerm t = object_term();
    if (t.kind != ObjectTerm::Kind::constant) fail(n, "alias must name a constant");
    expect(Tok::dot, "'.'");
    aliases_.insert_or_assign(n.text, t.constant);
  }

  PropertyDecl property_decl() {
    const Token kw = next();
    PropertyDecl d;
    d.span = span_of(kw);
    d.property = entity("property id");
    expect(Tok::colon, "':'");
    d.datatype = datatype();
    expect(Tok::dot, "'.'");
    return d;
  }

  Characterization qualifier_decl() {
    const Token kw = next();
    Characterization c;
    c.span = span_of(kw);
    c.attr = entity("qualifier id");
    if (at(Tok::colon)) {
      next();
      c.datatype = datatype();
    }
    const Token policy = expect(Tok::ident, "characterization");
    if (policy.text == "ignore") {
      c.kind = Characterization::Kind::ignore;
    } else if (policy.text == "additive") {
      c.kind = Characterization::Kind::additive;
    } else if (policy.text == "combine" || policy.text == "blend") {
      if (policy.text == "blend") {
        c.kind = Characterization::Kind::blend;
        expect_word("combine");
        expect(Tok::lparen, "'('");
        do {
          EntityRef a = entity("qualifier id");
          expect(Tok::eq, "'='");
          c.inputs.emplace_back(std::move(a), function_name());
        } while (at(Tok::comma) && (next(), true));
        expect(Tok::rparen, "')'");
      } else {
        c.kind = Characterization::Kind::combine;
      }
      expect_word("fn");
      expect(Tok::eq, "'='");
      c.fn = function_name();
      if (at_word("guard")) {
        next();
        expect(Tok::eq, "'='");
        c.guard = relation_name();
      }
    } else {
      fail(policy, "unknown characterization '" + policy.text + "'");
    }
    expect(Tok::dot, "'.'");
    return c;
  }

  FunctionDef function_def() {
    const Token kw = next();
    FunctionDef f;
    f.span = span_of(kw);
    f.name = expect(Tok::ident, "function name").text;
    expect(Tok::lparen, "'('");
    if (!at(Tok::rparen)) f.params = name_list("set variable");
    expect(Tok::rparen, "')'");
    expect(Tok::lbrace, "'{'");
    while (!at(Tok::rbrace)) {
      FunctionClause clause;
      if (!at(Tok::fat_arrow)) clause.conditions = conjunction_of_atoms(Tok::fat_arrow);
      expect(Tok::fat_arrow, "'=>'");
      clause.outputs.push_back(attr_pair());
      while (at(Tok::comma)) {
        next();
        clause.outputs.push_back(attr_pair());
      }
      expect(Tok::semicolon, "';'");
      f.clauses.push_back(std::move(clause));
    }
    expect(Tok::rbrace, "'}'");
    return f;
  }

  Constraint constraint() {
    const Token kw = next();
    Constraint c;
    c.span = span_of(kw);
    c.name = expect(Tok::ident, "constraint name").text;
    if (at(Tok::lparen)) {
      next();
      if (!at(Tok::rparen)) c.params = name_list("parameter");
      expect(Tok::rparen, "')'");
    }
    if (at_word("warning")) {
      next();
      c.severity = Constraint::Severity::warning;
    }
    if (at_word("symmetric")) {
      const Token s = next();
      while (at(Tok::lparen)) {
        next();
        c.symmetric.push_back(name_list("parameter"));
        expect(Tok::rparen, "')'");
      }
      if (c.symmetric.size() < 2) fail(s, "symmetric needs at least two parameter groups");
      for (const auto& g : c.symmetric) {
        if (g.size() != c.symmetric.front().size()) fail(s, "symmetric groups must have equal size");
      }
    }
    expect(Tok::colon, "':'");
    c.formula = formula();
    expect(Tok::dot, "'.'");
    resolve_predicates(c.formula, c.params);
    return c;
  }

  Rule rule() {
    Rule r;
    r.span = span_of(peek());
    if (at(Tok::lbrack)) {
      next();
      r.label = expect(Tok::ident, "rule label").text;
      expect(Tok::rbrack, "']'");
    }
    if (!at(Tok::arrow)) r.body = conjunction_of_atoms(Tok::arrow);
    expect(Tok::arrow, "'->'");
    r.head = atom();
    if (r.head.kind != Atom::Kind::relational && r.head.kind != Atom::Kind::datatype_rel) {
      fail(peek(), "rule head must be a relational or datatype atom");
    }
    if (at_word("with")) {
      next();
      FnRef f;
      f.name = expect(Tok::ident, "function name").text;
      if (at(Tok::lparen)) {
        next();
        if (!at(Tok::rparen)) f.args = name_list("set variable");
        expect(Tok::rparen, "')'");
      }
      r.fn = std::move(f);
    }
    expect(Tok::dot, "'.'");

    std::set<std::string> vars;
    for (const Atom& a : r.body) collect_arg_vars(a, vars);
    collect_arg_vars(r.head, vars);
    for (Atom& a : r.body) resolve_pred(a, vars);
    resolve_pred(r.head, vars);
    return r;
  }

  std::vector<Atom> conjunction_of_atoms(Tok stop) {
    std::vector<Atom> out{atom()};
    while (!at(stop) && (at(Tok::comma) || at_word("and"))) {
      next();
      out.push_back(atom());
    }
    return out;
  }

  AttrPair attr_pair() {
    ObjectTerm k = object_term();
    expect(Tok::colon, "':'");
    ObjectTerm v = object_term();
    return {std::move(k), std::move(v)};
  }

  SetTerm set_term() {
    if (at(Tok::lbrace)) {
      next();
      std::vector<AttrPair> pairs;
      if (!at(Tok::rbrace)) {
        pairs.push_back(attr_pair());
        while (at(Tok::comma)) {
          next();
          pairs.push_back(attr_pair());
        }
      }
      expect(Tok::rbrace, "'}'");
      return SetTerm::of(std::move(pairs));
    }
    return SetTerm::variable(expect(Tok::ident, "set variable or '{'").text);
  }

  std::vector<ObjectTerm> call_args() {
    expect(Tok::lparen, "'('");
    std::vector<ObjectTerm> args;
    if (!at(Tok::rparen)) {
      args.push_back(object_term());
      while (at(Tok::comma)) {
        next();
        args.push_back(object_term());
      }
    }
    expect(Tok::rparen, "')'");
    return args;
  }

  ObjectTerm fn_app(const Token& name_tok, std::vector<ObjectTerm> args) {
    const FunctionInfo* f = theory_.function(name_tok.text);
    if (f == nullptr) fail(name_tok, "unknown datatype function '" + name_tok.text + "'");
    if (static_cast<int>(args.size()) != f->arity) {
      fail(name_tok, "function '" + name_tok.text + "' takes " + std::to_string(f->arity) + " arguments");
    }
    return ObjectTerm::app(name_tok.text, std::move(args));
  }

  ObjectTerm object_term() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::var:
        next();
        return ObjectTerm::var(t.text);
      case Tok::symbol:
        next();
        return ObjectTerm::of(EntityRef::symbol(t.text));
      case Tok::skolem:
        next();
        return ObjectTerm::of(*EntityRef::parse(t.text));
      case Tok::literal:
        next();
        try {
          return ObjectTerm::of(parse_value(t.text));
        } catch (const DatatypeError& e) {
          fail(t, e.what());
        }
      case Tok::ident: {
        next();
        if (t.text == "fold" && at(Tok::lparen)) {
          next();
          std::string fn = function_name();
          expect(Tok::comma, "','");
          EntityRef a = entity("attribute id");
          std::vector<std::string> sets;
          while (at(Tok::comma)) {
            next();
            sets.push_back(expect(Tok::ident, "set variable").text);
          }
          expect(Tok::rparen, "')'");
          if (sets.empty()) fail(t, "fold needs at least one set variable");
          return ObjectTerm::fold_of(std::move(fn), std::move(a), std::move(sets));
        }
        if (at(Tok::lparen)) return fn_app(t, call_args());
        if (auto it = aliases_.find(t.text); it != aliases_.end()) return ObjectTerm::of(it->second);
        if (auto e = EntityRef::parse(t.text)) return ObjectTerm::of(*e);
        if (kReserved.count(t.text)) fail(t, "unexpected '" + t.text + "'");
        return ObjectTerm::var(t.text);
      }
      default:
        fail(t, "expected a term, found " + describe(t));
    }
  }

  Atom atom() {
    const Token t = peek();
    Atom a;
    a.span = span_of(t);
    if (t.kind == Tok::lparen) {
      next();
      a.kind = Atom::Kind::set_member;
      a.args.push_back(object_term());
      expect(Tok::colon, "':'");
      a.args.push_back(object_term());
      expect(Tok::rparen, "')'");
      expect_word("in");
      a.sets.push_back(expect(Tok::ident, "set variable").text);
      return a;
    }
    if (t.kind == Tok::ident && t.text == "absent" && at(Tok::lparen, 1)) {
      next();
      next();
      a.kind = Atom::Kind::absent;
      a.attr = entity("attribute id");
      while (at(Tok::comma)) {
        next();
        a.sets.push_back(expect(Tok::ident, "set variable").text);
      }
      expect(Tok::rparen, "')'");
      if (a.sets.empty()) fail(t, "absent needs at least one set variable");
      return a;
    }
    if (t.kind == Tok::ident && t.text == "sameset" && at(Tok::lparen, 1)) {
      next();
      next();
      a.kind = Atom::Kind::same_set;
      a.sets.push_back(expect(Tok::ident, "set variable").text);
      expect(Tok::comma, "','");
      a.sets.push_back(expect(Tok::ident, "set variable").text);
      expect(Tok::rparen, "')'");
      return a;
    }
    const bool callish = (t.kind == Tok::ident || t.kind == Tok::var || t.kind == Tok::symbol) && at(Tok::lparen, 1) &&
                         !(t.kind == Tok::ident && t.text == "fold");
    if (callish) {
      next();
      std::vector<ObjectTerm> args = call_args();
      if (at(Tok::eq) || at(Tok::neq)) {
        if (t.kind != Tok::ident) fail(t, "expected a datatype function before '='");
        return equality(fn_app(t, std::move(args)), a);
      }
      if (t.kind == Tok::ident && theory_.relation(t.text) != nullptr) {
        const RelationInfo* rel = theory_.relation(t.text);
        if (static_cast<int>(args.size()) != rel->arity) {
          fail(t, "relation '" + t.text + "' takes " + std::to_string(rel->arity) + " arguments");
        }
        if (at(Tok::at)) fail(peek(), "datatype atoms cannot carry attribute sets");
        a.kind = Atom::Kind::datatype_rel;
        a.rel = t.text;
        a.args = std::move(args);
        return a;
      }
      if (t.kind == Tok::ident && t.text.starts_with("not_")) fail(t, "unknown datatype relation '" + t.text + "'");
      a.kind = Atom::Kind::relational;
      a.pred = predicate(t);
      a.args = std::move(args);
      if (a.args.empty()) fail(t, "relational atoms need at least one argument");
      if (at(Tok::at)) {
        next();
        a.set = set_term();
      }
      return a;
    }
    return equality(object_term(), a);
  }

  Atom equality(ObjectTerm lhs, Atom a) {
    if (!at(Tok::eq) && !at(Tok::neq)) fail(peek(), "expected an atom, found " + describe(peek()));
    a.kind = Atom::Kind::equality;
    a.negated = next().kind == Tok::neq;
    a.args.push_back(std::move(lhs));
    a.args.push_back(object_term());
    return a;
  }

  ObjectTerm predicate(const Token& t) {
    if (t.kind == Tok::var) return ObjectTerm::var(t.text);
    if (t.kind == Tok::symbol) return ObjectTerm::of(EntityRef::symbol(t.text));
    if (auto it = aliases_.find(t.text); it != aliases_.end()) {
      if (!is_entity(it->second)) fail(t, "alias '" + t.text + "' does not name a predicate");
      return ObjectTerm::of(it->second);
    }
    if (auto e = EntityRef::parse(t.text)) return ObjectTerm::of(*e);
    if (kReserved.count(t.text)) fail(t, "unexpected '" + t.text + "'");
    bare_preds_.insert(t.text);
    return ObjectTerm::var(t.text);
  }

  // A bare identifier in predicate position is a variable only when it also
  // occurs as a term elsewhere; otherwise it names a rule-local predicate.
  void resolve_pred(Atom& a, const std::set<std::string>& vars) {
    if (a.kind != Atom::Kind::relational || !a.pred.is_var()) return;
    if (bare_preds_.count(a.pred.name) && !vars.count(a.pred.name)) {
      a.pred = ObjectTerm::of(EntityRef::symbol(a.pred.name));
    }
  }

  void resolve_predicates(Formula& f, const std::vector<std::string>& params = {}) {
    std::set<std::string> vars(params.begin(), params.end());
    collect_arg_vars(f, vars);
    resolve_formula(f, vars);
  }

  void resolve_formula(Formula& f, const std::set<std::string>& vars) {
    if (f.kind == Formula::Kind::atom) resolve_pred(f.atom, vars);
    for (Formula& c : f.children) resolve_formula(c, vars);
  }

  // formula := quantified | implication
  Formula formula() {
    if (at_word("forall") || at_word("exists")) return quantified();
    Formula lhs = disjunction();
    if (at(Tok::arrow)) {
      next();
      Formula f;
      f.kind = Formula::Kind::implication;
      f.children.push_back(std::move(lhs));
      f.children.push_back(formula());
      return f;
    }
    return lhs;
  }

  Formula quantified() {
    const Token q = next();
    Formula f;
    if (q.text == "forall") {
      f.kind = Formula::Kind::forall;
    } else if (at(Tok::ge) || at(Tok::le) || at(Tok::eq)) {
      const Tok op = next().kind;
      const Token n = expect(Tok::number, "count");
      f.count = std::stoi(n.text);
      f.kind = op == Tok::ge ? Formula::Kind::at_least : op == Tok::le ? Formula::Kind::at_most : Formula::Kind::exactly;
    } else {
      f.kind = Formula::Kind::exists;
    }
    f.vars = name_list("variable");
    expect(Tok::dot, "'.'");
    f.children.push_back(formula());
    return f;
  }

  Formula nary(Formula::Kind kind, Formula first, Formula (Parser::*sub)(), bool (Parser::*more)() const) {
    if (!(this->*more)()) return first;
    Formula f;
    f.kind = kind;
    f.children.push_back(std::move(first));
    while ((this->*more)()) {
      next();
      f.children.push_back((this->*sub)());
    }
    return f;
  }

  bool at_or() const { return at_word("or"); }
  bool at_and() const { return at_word("and") || at(Tok::comma); }

  Formula disjunction() { return nary(Formula::Kind::disjunction, conjunction(), &Parser::conjunction, &Parser::at_or); }
  Formula conjunction() { return nary(Formula::Kind::conjunction, unary(), &Parser::unary, &Parser::at_and); }

  Formula unary() {
    if (at_word("not")) {
      next();
      Formula f;
      f.kind = Formula::Kind::negation;
      f.children.push_back(unary());
      return f;
    }
    if (at_word("forall") || at_word("exists")) return quantified();
    if (at(Tok::lparen)) {
      const std::size_t save = pos_;
      try {
        Formula f;
        f.atom = atom();
        return f;
      } catch (const ParseError&) {
        pos_ = save;
      }
      next();
      Formula f = formula();
      expect(Tok::rparen, "')'");
      return f;
    }
    Formula f;
    f.atom = atom();
    return f;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const DatatypeTheory& theory_;
  std::map<std::string, Term, std::less<>> aliases_;
  std::set<std::string> bare_preds_;
};

}  // namespace

Program parse_program(std::string_view text, const ParseOptions& options) { return Parser(text, options).program(); }

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).formula_only();
}

Atom parse_atom(std::string_view text, const ParseOptions& options) { return Parser(text, options).atom_only(); }

}  // namespace emars::lang
