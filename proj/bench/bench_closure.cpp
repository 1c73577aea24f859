// Serial reference vs OpenMP kernels: one derivation round, full closure
// and constraint checking over a synthetic ontology workload.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "emars/constraints.hpp"
#include "emars/engine.hpp"
#include "emars/parser.hpp"
#include "emars/plan.hpp"
#include "emars/wikidata.hpp"

using namespace emars;

namespace {

EntityRef item(int n) { return EntityRef::item("Q" + std::to_string(n)); }

const lang::Program& ontology() {
  static const lang::Program p = [] {
    std::ifstream in(std::string(EMARS_SOURCE_DIR) + "/rules/wikidata_ontology.marpl");
    std::stringstream s;
    s << in.rdbuf();
    return lang::parse_program(s.str());
  }();
  return p;
}

/// `classes` subclass chain with `per_class` instances each, plus a
/// symmetric property linking neighbouring instances.
Store workload(int classes, int per_class) {
  const EntityRef inst = EntityRef::property("P31"), sub = EntityRef::property("P279");
  const EntityRef spouse = EntityRef::property("P26");
  Store s;
  for (int c = 0; c + 1 < classes; ++c) s.assert_fact({sub, {item(c + 1), item(c + 2)}, {}});
  s.assert_fact({inst, {spouse, item(18647518)}, {}});
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const int n = 100000 + c * per_class + i;
      s.assert_fact({inst, {item(n), item(c + 1)}, {}});
      if (i % 2) s.assert_fact({spouse, {item(n), item(n - 1)}, {}});
    }
  }
  return s;
}

void BM_Round(benchmark::State& state, bool parallel) {
  const Store s = workload(static_cast<int>(state.range(0)), 50);
  const ExecutionPlan plan = compile(ontology());
  for (auto _ : state) {
    auto out = parallel ? derive_round(s, plan, 0, s.size(), true) : derive_round_serial(s, plan, 0, s.size());
    benchmark::DoNotOptimize(out);
  }
}

void BM_Close(benchmark::State& state, bool parallel) {
  const Store base = workload(static_cast<int>(state.range(0)), 50);
  const ExecutionPlan plan = compile(ontology());
  ClosureOptions o;
  o.parallel = parallel;
  o.provenance = false;
  for (auto _ : state) {
    Store s = base;
    benchmark::DoNotOptimize(close(s, plan, o));
  }
}

void BM_Check(benchmark::State& state, bool parallel) {
  Store s = workload(static_cast<int>(state.range(0)), 50);
  s.assert_fact({EntityRef::property("P2302"), {EntityRef::property("P26"), item(21510862)}, {}});
  s.assert_fact({EntityRef::property("P2302"), {EntityRef::property("P31"), item(19474404)}, {}});
  const auto cs = active_builtins(s);
  CheckOptions o;
  o.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(check(s, cs, o));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Round, serial, false)->Arg(10)->Arg(40);
BENCHMARK_CAPTURE(BM_Round, parallel, true)->Arg(10)->Arg(40);
BENCHMARK_CAPTURE(BM_Close, serial, false)->Arg(10)->Arg(40);
BENCHMARK_CAPTURE(BM_Close, parallel, true)->Arg(10)->Arg(40);
BENCHMARK_CAPTURE(BM_Check, serial, false)->Arg(10)->Arg(40);
BENCHMARK_CAPTURE(BM_Check, parallel, true)->Arg(10)->Arg(40);
BENCHMARK_MAIN();
