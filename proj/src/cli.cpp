#include "emars/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "emars/constraints.hpp"
#include "emars/engine.hpp"
#include "emars/error.hpp"
#include "emars/explain.hpp"
#include "emars/fact_io.hpp"
#include "emars/parser.hpp"
#include "emars/plan.hpp"
#include "emars/wikidata.hpp"

namespace emars::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Failure tied to an input file, carrying its exit code.
class InputError : public Error {
 public:
  InputError(const std::string& message, int code) : Error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path, kUsage);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

lang::Program load_program(const std::vector<std::string>& paths) {
  lang::Program program;
  for (const std::string& path : paths) {
    const std::string text = read_file(path);
    try {
      program.append(lang::parse_program(text));
    } catch (const ParseError& e) {
      throw InputError(path + ":" + e.what(), kParseError);
    }
  }
  return program;
}

Store load_store(const std::string& snapshot, const std::vector<std::string>& fact_files) {
  Store store;
  try {
    if (!snapshot.empty()) store = load_snapshot(snapshot);
  } catch (const FormatError& e) {
    throw InputError(snapshot + ": " + e.what(), kParseError);
  }
  for (const std::string& path : fact_files) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path, kUsage);
    try {
      if (read_facts(in, store) > 0) store.set_closed(false);
    } catch (const Error& e) {
      throw InputError(path + ": " + e.what(), kParseError);
    }
  }
  return store;
}

std::vector<json> load_documents(const std::vector<std::string>& paths) {
  std::vector<json> docs;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path, kUsage);
    try {
      for (json& d : wikidata::read_entity_documents(in)) docs.push_back(std::move(d));
    } catch (const Error& e) {
      throw InputError(path + ": " + e.what(), kParseError);
    }
  }
  return docs;
}

wikidata::PropertyRegistry load_registry(const std::string& path) {
  if (path.empty()) return {};
  try {
    return wikidata::load_registry(path);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what(), kParseError);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what(), kParseError);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path, kUsage);
  out << text;
}

void save(const Store& store, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path, kUsage);
  write_snapshot(store, out);
}

std::string human_ingest(const wikidata::IngestReport& r) {
  std::ostringstream o;
  o << "documents          " << r.documents << '\n'
    << "statements         " << r.statements << '\n'
    << "facts emitted      " << r.facts_emitted << '\n'
    << "skolems created    " << r.skolems_created << '\n'
    << "novalue skipped    " << r.novalue_skipped << " (+" << r.novalue_qualifiers_skipped << " qualifiers)\n"
    << "deprecated skipped " << r.deprecated_skipped << " (kept " << r.deprecated_kept << ")\n"
    << "references ignored " << r.references_ignored << '\n'
    << "malformed snaks    " << r.malformed_snaks << '\n';
  return o.str();
}

std::string human_closure(const ClosureReport& r, bool timing) {
  std::ostringstream o;
  o << "rounds       " << r.rounds << '\n' << "facts        " << r.facts_before << " -> " << r.facts_after << '\n';
  if (timing) o << "wall ms      " << r.wall_ms << '\n';
  for (const auto& [rule, n] : r.derived_per_rule) o << "  " << rule << ": " << n << '\n';
  if (r.limit_hit) o << "limit hit    " << r.limit << ": " << r.diagnostic << '\n';
  for (const TypingFailure& t : r.typing_failures) {
    o << "typing       " << t.rule << ": " << t.relation << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) o << (i ? ", " : "") << format_term(t.args[i]);
    o << ") fails\n";
  }
  return o.str();
}

struct Limits {
  std::size_t max_rounds = ClosureLimits{}.max_rounds;
  std::size_t max_facts = ClosureLimits{}.max_facts;
  std::size_t max_attr_values = ClosureLimits{}.max_attr_values_per_fact;

  void add(CLI::App* app) {
    app->add_option("--max-rounds", max_rounds, "Round limit")->capture_default_str();
    app->add_option("--max-facts", max_facts, "Fact limit")->capture_default_str();
    app->add_option("--max-attr-values", max_attr_values, "Attribute values per fact limit")->capture_default_str();
  }
  ClosureLimits get() const { return {max_rounds, max_facts, max_attr_values}; }
};

struct IngestArgs {
  std::vector<std::string> entities;
  std::string registry;
  bool keep_deprecated = false;
};

struct CloseArgs {
  std::vector<std::string> rules;
  bool ontology = false;
  bool no_provenance = false;
  bool serial = false;
  bool no_timing = false;
  Limits limits;
};

struct CheckArgs {
  std::vector<std::string> constraints;
  bool builtins = false;
  bool include_deprecated = false;
  bool hide_skolems = false;
};

struct Opts {
  bool human = false;
  std::string in;
  std::vector<std::string> facts;
  std::string out;
  std::string report;
  std::string out_dir;
  std::string pattern;
  std::optional<FactId> id;
  IngestArgs ingest;
  CloseArgs close;
  CheckArgs check;
};

lang::Program closure_program(const CloseArgs& a, const wikidata::PropertyRegistry& registry) {
  lang::Program program = load_program(a.rules);
  if (a.ontology) {
    for (lang::Rule& r : wikidata::builtin_ontology_rules()) program.rules.push_back(std::move(r));
  }
  for (lang::Rule& r : wikidata::typing_rules(registry)) program.rules.push_back(std::move(r));
  return program;
}

std::vector<lang::Constraint> constraint_set(const CheckArgs& a, const Store& store,
                                             const wikidata::PropertyRegistry& registry) {
  std::vector<lang::Constraint> cs = load_program(a.constraints).constraints;
  if (a.builtins) {
    for (lang::Constraint& c : active_builtins(store)) cs.push_back(std::move(c));
  }
  for (lang::Constraint& c : typing_constraints(registry)) cs.push_back(std::move(c));
  return cs;
}

CheckOptions check_options(const CheckArgs& a) {
  CheckOptions o;
  o.include_deprecated = a.include_deprecated;
  o.include_skolems = !a.hide_skolems;
  return o;
}

ClosureOptions closure_options(const CloseArgs& a) {
  ClosureOptions o;
  o.limits = a.limits.get();
  o.provenance = !a.no_provenance;
  o.parallel = !a.serial;
  return o;
}

std::string closure_text(const ClosureReport& r, const CloseArgs& a, bool human) {
  return human ? human_closure(r, !a.no_timing) : r.to_json(!a.no_timing).dump(2) + "\n";
}

std::string check_text(const CheckReport& r, bool human) {
  std::ostringstream o;
  if (human) {
    write_violations_table(o, r);
  } else {
    write_violations_jsonl(o, r);
  }
  return o.str();
}

int check_code(const CheckReport& r) {
  const bool any = std::any_of(r.violations.begin(), r.violations.end(),
                               [](const Violation& v) { return v.severity == lang::Constraint::Severity::violation; });
  return any ? kViolations : kOk;
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

int do_ingest(const Opts& o, std::ostream& out) {
  const auto registry = load_registry(o.ingest.registry);
  const auto docs = load_documents(o.ingest.entities);
  Store store;
  wikidata::IngestOptions io;
  io.keep_deprecated = o.ingest.keep_deprecated;
  io.registry = &registry;
  const auto report = wikidata::ingest_entities(docs, store, io);
  save(store, o.out);
  emit(out, o.report, o.human ? human_ingest(report) : report.to_json().dump(2) + "\n");
  return kOk;
}

int do_close(const Opts& o, std::ostream& out, std::ostream& err) {
  const auto registry = load_registry(o.ingest.registry);
  const ExecutionPlan plan = compile(closure_program(o.close, registry));
  Store store = load_store(o.in, o.facts);
  const ClosureReport report = close(store, plan, closure_options(o.close));
  save(store, o.out);
  emit(out, o.report, closure_text(report, o.close, o.human));
  if (report.limit_hit) {
    err << "limit exceeded: " << report.limit << ": " << report.diagnostic << '\n';
    return kLimitExceeded;
  }
  return kOk;
}

int do_check(const Opts& o, std::ostream& out, std::ostream& err) {
  const auto registry = load_registry(o.ingest.registry);
  // Parse constraint files before touching the store.
  load_program(o.check.constraints);
  const Store store = load_store(o.in, o.facts);
  const CheckReport report = check(store, constraint_set(o.check, store, registry), check_options(o.check));
  if (!o.human) {
    for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
  }
  emit(out, o.out, check_text(report, o.human));
  return check_code(report);
}

/// Query and explain patterns: a relational atom whose arguments are
/// constants or variables, with optional explicit attribute pairs.
Pattern to_pattern(const lang::Atom& a) {
  auto slot = [](const lang::ObjectTerm& t) {
    switch (t.kind) {
      case lang::ObjectTerm::Kind::constant: return PatternSlot::of(t.constant);
      case lang::ObjectTerm::Kind::variable: return t.name == "_" ? PatternSlot::any() : PatternSlot::variable(t.name);
      default: throw InputError("pattern terms must be constants or variables", kUsage);
    }
  };
  if (a.kind != lang::Atom::Kind::relational) throw InputError("pattern must be a relational atom", kUsage);
  Pattern p;
  p.predicate = slot(a.pred);
  for (const lang::ObjectTerm& t : a.args) p.args.push_back(slot(t));
  if (a.set && a.set->kind == lang::SetTerm::Kind::explicit_pairs) {
    for (const auto& [k, v] : a.set->pairs) p.attrs.push_back({slot(k), slot(v)});
  }
  return p;
}

Pattern parse_pattern(const std::string& text) {
  try {
    return to_pattern(lang::parse_atom(text));
  } catch (const ParseError& e) {
    throw InputError(std::string("pattern:") + e.what(), kParseError);
  }
}

bool deprecated(const Fact& f) {
  auto it = f.attrs.find(wikidata::kRank);
  return it != f.attrs.end() && it->second.count(wikidata::kDeprecated);
}

int do_query(const Opts& o, std::ostream& out) {
  const Pattern pattern = parse_pattern(o.pattern);
  const Store store = load_store(o.in, o.facts);
  std::set<FactId> seen;
  for (const Match& m : store.match(pattern)) {
    const Fact& f = store.fact(m.fact);
    if (deprecated(f) && !o.check.include_deprecated) continue;
    if (!seen.insert(m.fact).second && m.bindings.empty()) continue;
    if (o.human) {
      out << format_fact(f);
      for (const auto& [v, t] : m.bindings) out << "  ?" << v << '=' << format_term(t);
      out << '\n';
    } else {
      json b = json::object();
      for (const auto& [v, t] : m.bindings) b[v] = term_to_json(t);
      out << json{{"fact", fact_to_json(f)}, {"bindings", b}}.dump() << '\n';
    }
  }
  return kOk;
}

int do_explain(const Opts& o, std::ostream& out) {
  if (!o.id && o.pattern.empty()) throw InputError("explain needs a fact or --id", kUsage);
  const Store store = load_store(o.in, o.facts);
  std::vector<FactId> ids;
  if (o.id) {
    ids.push_back(*o.id);
  } else {
    std::set<FactId> seen;
    for (const Match& m : store.match(parse_pattern(o.pattern))) {
      if (seen.insert(m.fact).second) ids.push_back(m.fact);
    }
    if (ids.empty()) throw EvaluationError("no fact matches " + o.pattern);
  }
  for (FactId id : ids) {
    const DerivationTree tree = explain(store, id);
    out << (o.human ? format_tree(tree) : tree_to_json(tree).dump() + "\n");
  }
  return kOk;
}

int do_pipeline(const Opts& o, std::ostream& out, std::ostream& err) {
  // Every input is read and parsed before the first stage runs.
  const auto registry = load_registry(o.ingest.registry);
  const auto docs = load_documents(o.ingest.entities);
  const ExecutionPlan plan = compile(closure_program(o.close, registry));
  load_program(o.check.constraints);

  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);

  Store store;
  wikidata::IngestOptions io;
  io.keep_deprecated = o.ingest.keep_deprecated;
  io.registry = &registry;
  const auto ingest = wikidata::ingest_entities(docs, store, io);
  save(store, (dir / "base.snap").string());
  write_text((dir / "ingest_report.json").string(), ingest.to_json().dump(2) + "\n");

  const ClosureReport closure = close(store, plan, closure_options(o.close));
  save(store, (dir / "closed.snap").string());
  write_text((dir / "closure_report.json").string(), closure.to_json(!o.close.no_timing).dump(2) + "\n");
  if (closure.limit_hit) {
    err << "limit exceeded: " << closure.limit << ": " << closure.diagnostic << '\n';
    return kLimitExceeded;
  }

  const CheckReport report = check(store, constraint_set(o.check, store, registry), check_options(o.check));
  write_text((dir / "violations.jsonl").string(), check_text(report, false));
  if (o.human) {
    out << human_ingest(ingest) << human_closure(closure, !o.close.no_timing) << check_text(report, true);
  } else {
    out << json{{"facts_emitted", ingest.facts_emitted},
                {"facts_after_closure", closure.facts_after},
                {"rounds", closure.rounds},
                {"violations", report.violations.size()}}
               .dump()
        << '\n';
  }
  return check_code(report);
}

void add_ingest_inputs(CLI::App* sub, Opts& o, bool required) {
  auto* e = sub->add_option("--entities", o.ingest.entities, "Wikibase entity JSON files")->check(CLI::ExistingFile);
  if (required) e->required();
  sub->add_option("--registry", o.ingest.registry, "Property datatype registry (JSON map)")->check(CLI::ExistingFile);
  sub->add_flag("--keep-deprecated", o.ingest.keep_deprecated, "Keep deprecated statements with rank deprecated");
}

void add_close_inputs(CLI::App* sub, Opts& o) {
  sub->add_option("--rules", o.close.rules, ".marpl rule and characterization files")->check(CLI::ExistingFile);
  sub->add_flag("--ontology", o.close.ontology, "Add the built-in Wikidata ontology rules");
  sub->add_flag("--no-provenance", o.close.no_provenance, "Do not record derivations");
  sub->add_flag("--serial", o.close.serial, "Evaluate rounds without threads");
  sub->add_flag("--no-timing", o.close.no_timing, "Leave wall time out of the report");
  o.close.limits.add(sub);
}

void add_check_inputs(CLI::App* sub, Opts& o) {
  sub->add_option("--constraints", o.check.constraints, ".mapl constraint files")->check(CLI::ExistingFile);
  sub->add_flag("--builtins", o.check.builtins, "Add built-in constraint templates activated by the store");
  sub->add_flag("--include-deprecated", o.check.include_deprecated, "Let constraints see deprecated statements");
  sub->add_flag("--hide-skolems", o.check.hide_skolems, "Hide facts with unknown (somevalue) arguments");
}

void add_store_inputs(CLI::App* sub, Opts& o, bool required) {
  auto* in = sub->add_option("--in", o.in, "Input snapshot")->check(CLI::ExistingFile);
  sub->add_option("--facts", o.facts, "Fact files (JSON lines) added as base facts")->check(CLI::ExistingFile);
  if (required) in->required();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-attributed rule reasoning over Wikidata-style statements"};
  app.name("emars");
  app.set_config("--config", "", "Key-value config file; keys are flag names, [section] per subcommand");
  app.require_subcommand(1);
  Opts o;
  app.add_flag("--human", o.human, "Human-readable output instead of JSON");

  auto* ingest = app.add_subcommand("ingest", "Entity JSON to a store snapshot and ingest report");
  add_ingest_inputs(ingest, o, true);
  ingest->add_option("--out", o.out, "Output snapshot")->required();
  ingest->add_option("--report", o.report, "Write the report here instead of stdout");

  auto* closec = app.add_subcommand("close", "Close a store under rules");
  add_store_inputs(closec, o, false);
  add_close_inputs(closec, o);
  closec->add_option("--registry", o.ingest.registry, "Registry whose typing rules are added")->check(CLI::ExistingFile);
  closec->add_option("--out", o.out, "Output snapshot");
  closec->add_option("--report", o.report, "Write the report here instead of stdout");

  auto* checkc = app.add_subcommand("check", "Report constraint violations");
  add_store_inputs(checkc, o, false);
  add_check_inputs(checkc, o);
  checkc->add_option("--registry", o.ingest.registry, "Registry whose value-type constraints are added")
      ->check(CLI::ExistingFile);
  checkc->add_option("--out", o.out, "Write violations here instead of stdout");

  auto* query = app.add_subcommand("query", "Facts matching a pattern");
  add_store_inputs(query, o, false);
  query->add_option("pattern", o.pattern, "e.g. \"instance_of(?x, female_human)\"")->required();
  query->add_flag("--include-deprecated", o.check.include_deprecated, "Include deprecated statements");

  auto* explainc = app.add_subcommand("explain", "Derivation tree of a fact");
  add_store_inputs(explainc, o, true);
  auto* pat = explainc->add_option("fact", o.pattern, "Fact or pattern, e.g. \"spouse(Q2, Q1)\"");
  auto* idopt = explainc->add_option("--id", o.id, "Fact id in the snapshot");
  pat->excludes(idopt);

  auto* pipeline = app.add_subcommand("pipeline", "ingest, close and check in one run");
  add_ingest_inputs(pipeline, o, true);
  add_close_inputs(pipeline, o);
  add_check_inputs(pipeline, o);
  pipeline->add_option("--out-dir", o.out_dir, "Directory for snapshots and reports");

  for (CLI::App* sub : {ingest, closec, checkc, query, explainc, pipeline}) {
    sub->add_flag("--human", o.human, "Human-readable output instead of JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return do_ingest(o, out);
    if (*closec) return do_close(o, out, err);
    if (*checkc) return do_check(o, out, err);
    if (*query) return do_query(o, out);
    if (*explainc) return do_explain(o, out);
    return do_pipeline(o, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const CompileError& e) {
    err << "compile error: " << e.what() << '\n';
    return kParseError;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluationError;
  }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace emars::cli
