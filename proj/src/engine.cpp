#include "emars/engine.hpp"

#include <algorithm>
#include <chrono>
#include <exception>

#include "emars/error.hpp"
#include "emars/fact_io.hpp"
#include "emars/matcher.hpp"

namespace emars {

namespace {

constexpr FactId kChunk = 512;

struct Task {
  std::size_t rule;
  int delta_pos;  // -1: every atom ranges over the whole store
  FactId lo;
  FactId hi;
};

void run_task(const Store& store, const ExecutionPlan& plan, const Task& t, FactId delta_begin, FactId delta_end,
              std::vector<Derived>& out, std::vector<TypingFailure>& typing) {
  const CompiledRule& rule = plan.rules[t.rule];
  const Matcher m(rule, store, *plan.theory);
  std::vector<AtomRange> ranges(rule.relational_count);
  for (int k = 0; k < static_cast<int>(ranges.size()); ++k) {
    if (t.delta_pos < 0 || k > t.delta_pos) {
      ranges[k] = {0, delta_end, std::nullopt};
    } else if (k < t.delta_pos) {
      ranges[k] = {0, delta_begin, std::nullopt};
    } else {
      ranges[k] = {t.lo, t.hi, std::nullopt};
    }
  }
  m.for_each_match(ranges, [&](const Env& env) {
    HeadOutcome h = m.head(env);
    switch (h.kind) {
      case HeadOutcome::Kind::fact:
        out.push_back({std::move(h.fact), {rule.key, Matcher::premises(env)}});
        break;
      case HeadOutcome::Kind::typing_failed: {
        TypingFailure f{rule.key, h.fact.predicate.id, std::move(h.fact.args), {}};
        for (FactId id : env.sets) f.premises.push_back(store.fact(id));
        typing.push_back(std::move(f));
        break;
      }
      default:
        break;
    }
  });
}

std::vector<Task> make_tasks(const ExecutionPlan& plan, FactId delta_begin, FactId delta_end, FactId chunk) {
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < plan.rules.size(); ++r) {
    const std::size_t n = plan.rules[r].relational_count;
    if (n == 0) {
      if (delta_begin == 0) tasks.push_back({r, -1, 0, 0});
      continue;
    }
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (FactId lo = delta_begin; lo < delta_end; lo += std::min(chunk, delta_end - lo)) {
        tasks.push_back({r, static_cast<int>(pos), lo, std::min<FactId>(delta_end, lo + chunk)});
      }
    }
  }
  return tasks;
}

void canonicalize(const Store& store, std::vector<Derived>& ds) {
  auto cmp = [&](const Derived& a, const Derived& b) {
    if (auto c = compare_facts(a.fact, b.fact); c != 0) return c;
    if (auto c = a.derivation.rule_key <=> b.derivation.rule_key; c != 0) return std::weak_ordering(c);
    return std::lexicographical_compare_three_way(
        a.derivation.premises.begin(), a.derivation.premises.end(), b.derivation.premises.begin(),
        b.derivation.premises.end(), [&](FactId x, FactId y) { return compare_facts(store.fact(x), store.fact(y)); });
  };
  std::sort(ds.begin(), ds.end(), [&](const Derived& a, const Derived& b) { return cmp(a, b) < 0; });
  ds.erase(std::unique(ds.begin(), ds.end(), [&](const Derived& a, const Derived& b) { return cmp(a, b) == 0; }),
           ds.end());
}

std::vector<Derived> run_tasks(const Store& store, const ExecutionPlan& plan, const std::vector<Task>& tasks,
                               FactId delta_begin, FactId delta_end, bool parallel,
                               std::vector<TypingFailure>* typing) {
  const std::int64_t n = static_cast<std::int64_t>(tasks.size());
  std::vector<std::vector<Derived>> outs(tasks.size());
  std::vector<std::vector<TypingFailure>> typings(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        run_task(store, plan, tasks[i], delta_begin, delta_end, outs[i], typings[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) run_task(store, plan, tasks[i], delta_begin, delta_end, outs[i], typings[i]);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Derived> all;
  for (auto& o : outs) std::move(o.begin(), o.end(), std::back_inserter(all));
  if (typing) {
    for (auto& t : typings) std::move(t.begin(), t.end(), std::back_inserter(*typing));
  }
  canonicalize(store, all);
  return all;
}

std::string typing_key(const TypingFailure& f) {
  std::string k = f.rule + '\x1f' + f.relation;
  for (const Term& t : f.args) k += '\x1f' + format_term(t);
  for (const Fact& p : f.premises) k += '\x1f' + format_fact(p);
  return k;
}

/// Adds a round's derivations to the store. Returns the number of new
/// facts, or sets the report's limit fields and adds nothing.
std::size_t merge_round(Store& store, std::vector<Derived>& derived, bool provenance, const ClosureLimits& limits,
                        ClosureReport& report) {
  std::vector<std::pair<std::size_t, std::size_t>> fresh;  // [begin, end) groups of new facts
  for (std::size_t i = 0; i < derived.size();) {
    std::size_t j = i + 1;
    while (j < derived.size() && derived[j].fact == derived[i].fact) ++j;
    if (auto id = store.find(derived[i].fact)) {
      if (provenance && !store.is_base(*id)) {
        for (std::size_t k = i; k < j; ++k) store.add_derivation(*id, derived[k].derivation);
      }
    } else {
      fresh.emplace_back(i, j);
    }
    i = j;
  }
  for (const auto& [b, e] : fresh) {
    for (const auto& [attr, vs] : derived[b].fact.attrs) {
      if (vs.size() > limits.max_attr_values_per_fact) {
        report.limit_hit = true;
        report.limit = "maxAttrValuesPerFact";
        report.diagnostic = "attribute " + attr.str() + " would carry " + std::to_string(vs.size()) + " values (limit " +
                            std::to_string(limits.max_attr_values_per_fact) + ") on a fact derived by " +
                            derived[b].derivation.rule_key;
        return 0;
      }
    }
  }
  if (store.size() + fresh.size() > limits.max_facts) {
    report.limit_hit = true;
    report.limit = "maxFacts";
    report.diagnostic = "round " + std::to_string(report.rounds) + " would grow the store to " +
                        std::to_string(store.size() + fresh.size()) + " facts (limit " +
                        std::to_string(limits.max_facts) + ")";
    return 0;
  }
  for (const auto& [b, e] : fresh) {
    ++report.derived_per_rule[derived[b].derivation.rule_key];
    if (!provenance) {
      store.assert_derived(std::move(derived[b].fact));
      continue;
    }
    const FactId id = store.assert_derived(derived[b].fact, derived[b].derivation).id;
    for (std::size_t k = b + 1; k < e; ++k) store.add_derivation(id, derived[k].derivation);
  }
  return fresh.size();
}

template <class Round>
ClosureReport fixpoint(Store& store, const ClosureLimits& limits, bool provenance, Round round) {
  const auto t0 = std::chrono::steady_clock::now();
  ClosureReport report;
  report.facts_before = store.size();
  FactId delta_begin = 0;
  std::vector<TypingFailure> typing;
  bool done = false;
  while (!done) {
    if (report.rounds == limits.max_rounds) {
      report.limit_hit = true;
      report.limit = "maxRounds";
      report.diagnostic = "no fixpoint after " + std::to_string(limits.max_rounds) + " rounds";
      break;
    }
    ++report.rounds;
    const FactId delta_end = static_cast<FactId>(store.size());
    std::vector<Derived> derived = round(delta_begin, delta_end, typing);
    const std::size_t added = merge_round(store, derived, provenance, limits, report);
    done = added == 0;
    delta_begin = delta_end;
  }
  std::sort(typing.begin(), typing.end(),
            [](const TypingFailure& a, const TypingFailure& b) { return typing_key(a) < typing_key(b); });
  typing.erase(std::unique(typing.begin(), typing.end()), typing.end());
  report.typing_failures = std::move(typing);
  report.facts_after = store.size();
  store.set_closed(!report.limit_hit);
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

nlohmann::json ClosureReport::to_json(bool with_time) const {
  nlohmann::json typing = nlohmann::json::array();
  for (const TypingFailure& f : typing_failures) {
    nlohmann::json args = nlohmann::json::array();
    for (const Term& t : f.args) args.push_back(term_to_json(t));
    nlohmann::json premises = nlohmann::json::array();
    for (const Fact& p : f.premises) premises.push_back(fact_to_json(p));
    typing.push_back({{"rule", f.rule}, {"relation", f.relation}, {"args", args}, {"premises", premises}});
  }
  nlohmann::json j = {{"rounds", rounds},
                      {"facts_before", facts_before},
                      {"facts_after", facts_after},
                      {"derived_per_rule", derived_per_rule},
                      {"limit_hit", limit_hit},
                      {"typing_failures", typing}};
  if (limit_hit) {
    j["limit"] = limit;
    j["diagnostic"] = diagnostic;
  }
  if (with_time) j["wall_ms"] = wall_ms;
  return j;
}

std::vector<Derived> derive_round(const Store& store, const ExecutionPlan& plan, FactId delta_begin, FactId delta_end,
                                  bool parallel, std::vector<TypingFailure>* typing) {
  return run_tasks(store, plan, make_tasks(plan, delta_begin, delta_end, kChunk), delta_begin, delta_end, parallel,
                   typing);
}

std::vector<Derived> derive_round_serial(const Store& store, const ExecutionPlan& plan, FactId delta_begin,
                                         FactId delta_end, std::vector<TypingFailure>* typing) {
  const FactId whole = std::max<FactId>(1, delta_end - delta_begin);
  return run_tasks(store, plan, make_tasks(plan, delta_begin, delta_end, whole), delta_begin, delta_end, false,
                   typing);
}

std::vector<Fact> step(const Store& store, const ExecutionPlan& plan, FactId delta_begin) {
  std::vector<Derived> ds = derive_round_serial(store, plan, delta_begin, static_cast<FactId>(store.size()));
  std::vector<Fact> out;
  for (Derived& d : ds) {
    if (store.contains(d.fact) || (!out.empty() && out.back() == d.fact)) continue;
    out.push_back(std::move(d.fact));
  }
  return out;
}

ClosureReport close(Store& store, const ExecutionPlan& plan, const ClosureOptions& options) {
  return fixpoint(store, options.limits, options.provenance,
                  [&](FactId begin, FactId end, std::vector<TypingFailure>& typing) {
                    return options.parallel ? derive_round(store, plan, begin, end, true, &typing)
                                            : derive_round_serial(store, plan, begin, end, &typing);
                  });
}

ClosureReport close_naive(Store& store, const ExecutionPlan& plan, const ClosureLimits& limits) {
  return fixpoint(store, limits, true, [&](FactId, FactId end, std::vector<TypingFailure>& typing) {
    std::vector<Task> tasks;
    for (std::size_t r = 0; r < plan.rules.size(); ++r) tasks.push_back({r, -1, 0, 0});
    return run_tasks(store, plan, tasks, 0, end, false, &typing);
  });
}

std::vector<Fact> replay(const Store& store, const CompiledRule& rule, const std::vector<FactId>& premises) {
  if (premises.size() != rule.relational_count) {
    throw EvaluationError("rule " + rule.key + " has " + std::to_string(rule.relational_count) + " body atoms, " +
                          std::to_string(premises.size()) + " premises given");
  }
  const Matcher m(rule, store, DatatypeTheory::wikidata());
  std::vector<AtomRange> ranges;
  for (FactId p : premises) ranges.push_back({0, 0, p});
  std::vector<Fact> out;
  m.for_each_match(ranges, [&](const Env& env) {
    HeadOutcome h = m.head(env);
    if (h.kind == HeadOutcome::Kind::fact) out.push_back(std::move(h.fact));
  });
  return out;
}

}  // namespace emars
