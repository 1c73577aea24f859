#include "emars/explain.hpp"

#include <algorithm>
#include <set>

#include "emars/engine.hpp"
#include "emars/error.hpp"
#include "emars/fact_io.hpp"

namespace emars {

namespace {

DerivationTree build(const Store& store, FactId id, std::set<FactId>& path) {
  DerivationTree t;
  t.id = id;
  t.fact = store.fact(id);
  t.base = store.is_base(id);
  if (t.base) return t;
  const Derivation* d = store.founding(id);
  if (d == nullptr) {
    // Without a founding record take a derivation avoiding the current path.
    for (const Derivation& cand : store.derivations(id)) {
      if (std::none_of(cand.premises.begin(), cand.premises.end(), [&](FactId p) { return path.count(p) > 0; })) {
        d = &cand;
        break;
      }
    }
  }
  if (d == nullptr) {
    t.note = store.derivations(id).empty() ? "no provenance recorded" : "every recorded derivation is circular";
    return t;
  }
  t.rule = d->rule_key;
  path.insert(id);
  for (FactId p : d->premises) {
    if (path.count(p)) {
      DerivationTree loop;
      loop.id = p;
      loop.fact = store.fact(p);
      loop.note = "cycle";
      t.premises.push_back(std::move(loop));
    } else {
      t.premises.push_back(build(store, p, path));
    }
  }
  path.erase(id);
  return t;
}

void format_into(const DerivationTree& t, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += format_fact(t.fact);
  if (t.base) {
    out += "  [base]";
  } else if (!t.rule.empty()) {
    out += "  <- " + t.rule;
  }
  if (!t.note.empty()) out += "  (" + t.note + ")";
  out += '\n';
  for (const DerivationTree& p : t.premises) format_into(p, depth + 1, out);
}

}  // namespace

DerivationTree explain(const Store& store, const Fact& fact) {
  auto id = store.find(fact);
  if (!id) throw EvaluationError("fact not in store: " + format_fact(fact));
  return explain(store, *id);
}

DerivationTree explain(const Store& store, FactId id) {
  if (id >= store.size()) throw EvaluationError("no fact with id " + std::to_string(id));
  std::set<FactId> path;
  return build(store, id, path);
}

std::string format_tree(const DerivationTree& tree) {
  std::string out;
  format_into(tree, 0, out);
  return out;
}

nlohmann::json tree_to_json(const DerivationTree& tree) {
  nlohmann::json j = {{"fact", fact_to_json(tree.fact)}, {"base", tree.base}};
  if (!tree.rule.empty()) j["rule"] = tree.rule;
  if (!tree.note.empty()) j["note"] = tree.note;
  if (!tree.premises.empty()) {
    j["premises"] = nlohmann::json::array();
    for (const DerivationTree& p : tree.premises) j["premises"].push_back(tree_to_json(p));
  }
  return j;
}

bool verify_tree(const Store& store, const ExecutionPlan& plan, const DerivationTree& tree) {
  if (tree.base) return true;
  if (!tree.note.empty()) return false;
  const CompiledRule* rule = plan.find(tree.rule);
  if (rule == nullptr) return false;
  std::vector<FactId> premises;
  for (const DerivationTree& p : tree.premises) premises.push_back(p.id);
  const std::vector<Fact> heads = replay(store, *rule, premises);
  if (std::find(heads.begin(), heads.end(), tree.fact) == heads.end()) return false;
  return std::all_of(tree.premises.begin(), tree.premises.end(),
                     [&](const DerivationTree& p) { return verify_tree(store, plan, p); });
}

}  // namespace emars
